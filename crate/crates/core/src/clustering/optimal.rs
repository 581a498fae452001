use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::Error;
use crate::image::Histogram;
use crate::stats::{AtomTable, ClusterStats};

/// Relative slack under which f64 candidates are re-compared exactly.
const FILTER_TOLERANCE: f64 = 1e-9;

/// Exact minimum-squared-error partitions of the occupied levels into
/// `k = 1..=k_max` contiguous clusters.
///
/// `best[k-1][i]` is the optimal error of splitting atoms `i..g` into `k`
/// clusters. Candidates are ranked in f64 and any candidate within
/// [`FILTER_TOLERANCE`] of the float minimum is re-evaluated exactly, so the
/// stored values are exact minima.
#[derive(Debug, Clone)]
pub struct OptimalQuantizer {
    table: AtomTable,
    best: Vec<Vec<BigRational>>,
    approx: Vec<Vec<f64>>,
}

fn within(candidate: f64, floor: f64) -> bool {
    candidate <= floor + FILTER_TOLERANCE * floor.abs()
}

impl OptimalQuantizer {
    pub fn new(h: &Histogram, k_max: usize) -> Result<Self, Error> {
        let table = AtomTable::from_histogram(h);
        let g = table.len();
        if k_max == 0 {
            return Err(Error::ZeroClusters);
        }
        if k_max > g {
            return Err(Error::TooManyClusters { k: k_max, g });
        }

        let mut best: Vec<Vec<BigRational>> = Vec::with_capacity(k_max);
        let mut approx: Vec<Vec<f64>> = Vec::with_capacity(k_max);
        let ones: Vec<BigRational> = (0..g).map(|i| table.range(i, g - 1).error()).collect();
        approx.push(ones.iter().map(|e| e.to_f64().unwrap_or(f64::INFINITY)).collect());
        best.push(ones);

        for k in 2..=k_max {
            let prev_exact = &best[k - 2];
            let prev_approx = &approx[k - 2];
            let mut row_exact = vec![BigRational::zero(); g];
            let mut row_approx = vec![f64::INFINITY; g];
            // `i..g` must hold at least k atoms.
            for i in 0..=g - k {
                let candidates = || (i..=g - k).map(|j| (j, cost_f64(&table, i, j) + prev_approx[j + 1]));
                let floor = candidates().map(|(_, c)| c).fold(f64::INFINITY, f64::min);
                let mut value: Option<BigRational> = None;
                for (j, c) in candidates() {
                    if !within(c, floor) {
                        continue;
                    }
                    let exact = table.range(i, j).error() + &prev_exact[j + 1];
                    if value.as_ref().is_none_or(|v| exact < *v) {
                        value = Some(exact);
                    }
                }
                let value = value.expect("the float minimum is always a candidate");
                row_approx[i] = value.to_f64().unwrap_or(f64::INFINITY);
                row_exact[i] = value;
            }
            best.push(row_exact);
            approx.push(row_approx);
        }
        Ok(OptimalQuantizer { table, best, approx })
    }

    pub fn k_max(&self) -> usize {
        self.best.len()
    }

    /// Minimal squared error E_k.
    pub fn error(&self, k: usize) -> Result<&BigRational, Error> {
        self.check(k)?;
        Ok(&self.best[k - 1][0])
    }

    /// E_1..E_kmax.
    pub fn errors(&self) -> Vec<BigRational> {
        self.best.iter().map(|row| row[0].clone()).collect()
    }

    /// An optimal k-cluster partition; among optimal ones, the one with the
    /// lexicographically smallest sequence of cluster boundaries.
    pub fn partition(&self, k: usize) -> Result<(Vec<ClusterStats>, BigRational), Error> {
        self.check(k)?;
        let g = self.table.len();
        let mut clusters = Vec::with_capacity(k);
        let mut i = 0;
        for remaining in (2..=k).rev() {
            let target = &self.best[remaining - 1][i];
            let target_f = self.approx[remaining - 1][i];
            let next = &self.best[remaining - 2];
            let next_f = &self.approx[remaining - 2];
            let j = (i..=g - remaining)
                .find(|&j| {
                    within(cost_f64(&self.table, i, j) + next_f[j + 1], target_f)
                        && self.table.range(i, j).error() + &next[j + 1] == *target
                })
                .expect("an optimal boundary exists");
            clusters.push(self.table.range(i, j));
            i = j + 1;
        }
        clusters.push(self.table.range(i, g - 1));
        Ok((clusters, self.best[k - 1][0].clone()))
    }

    fn check(&self, k: usize) -> Result<(), Error> {
        if k == 0 {
            Err(Error::ZeroClusters)
        } else if k > self.best.len() {
            Err(Error::TooManyClusters { k, g: self.table.len().min(self.best.len()) })
        } else {
            Ok(())
        }
    }
}

fn cost_f64(table: &AtomTable, i: usize, j: usize) -> f64 {
    table.range(i, j).error_f64()
}

/// Minimum-squared-error partition of the occupied levels into `k` intervals.
pub fn optimal_partition(h: &Histogram, k: usize) -> Result<(Vec<ClusterStats>, BigRational), Error> {
    OptimalQuantizer::new(h, k)?.partition(k)
}

impl OptimalQuantizer {
    /// Sum of the squared errors of `clusters`.
    pub fn total_error(clusters: &[ClusterStats]) -> BigRational {
        clusters
            .iter()
            .fold(BigRational::from_integer(BigInt::zero()), |acc, c| acc + c.error())
    }
}
