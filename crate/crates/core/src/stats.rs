//! Exact cluster statistics and squared-error increments.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use crate::error::Error;
use crate::image::{Histogram, Level};

/// Pixel count, intensity sum and sum of squares over an interval of levels.
///
/// `lo` and `hi` are the lowest and highest occupied levels of the cluster.
/// All sums are exact integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClusterStats {
    pub lo: Level,
    pub hi: Level,
    pub n: u64,
    pub s: u64,
    pub ss: u128,
}

impl ClusterStats {
    pub fn singleton(level: Level, count: u64) -> Self {
        let v = level as u64;
        ClusterStats {
            lo: level,
            hi: level,
            n: count,
            s: count * v,
            ss: count as u128 * (v as u128 * v as u128),
        }
    }

    /// Union of two disjoint clusters.
    pub fn union(&self, other: &ClusterStats) -> ClusterStats {
        ClusterStats {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
            n: self.n + other.n,
            s: self.s + other.s,
            ss: self.ss + other.ss,
        }
    }

    /// A single occupied level.
    pub fn is_uniform(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mean(&self) -> BigRational {
        BigRational::new(BigInt::from(self.s), BigInt::from(self.n))
    }

    pub fn mean_f64(&self) -> f64 {
        self.s as f64 / self.n as f64
    }

    /// Mean rounded half-up to the nearest level.
    pub fn rounded_mean(&self) -> Level {
        ((2 * self.s as u128 + self.n as u128) / (2 * self.n as u128)) as Level
    }

    /// `n * ss - s^2`, the numerator of the squared error over `n`.
    pub(crate) fn error_numerator(&self) -> u128 {
        self.n as u128 * self.ss - self.s as u128 * self.s as u128
    }

    /// Squared error `ss - s^2 / n`.
    pub fn error(&self) -> BigRational {
        BigRational::new(BigInt::from(self.error_numerator()), BigInt::from(self.n))
    }

    pub fn error_f64(&self) -> f64 {
        self.error_numerator() as f64 / self.n as f64
    }
}

/// Exact stats of the occupied levels in `[lo, hi]`.
pub fn stats_of_interval(h: &Histogram, lo: Level, hi: Level) -> Result<ClusterStats, Error> {
    let mut acc: Option<ClusterStats> = None;
    if lo <= hi {
        for level in lo..=hi.min(h.maxval()) {
            let c = h.count(level);
            if c > 0 {
                let one = ClusterStats::singleton(level, c);
                acc = Some(match acc {
                    Some(a) => a.union(&one),
                    None => one,
                });
            }
        }
    }
    acc.ok_or(Error::EmptyInterval { lo, hi })
}

/// Squared-error increase `n_a n_b / (n_a + n_b) * (mean_a - mean_b)^2` of
/// merging two clusters, stored as `diff^2 / den` with
/// `diff = |n_b s_a - n_a s_b|` and `den = n_a n_b (n_a + n_b)`.
#[derive(Debug, Clone, Copy)]
pub struct Increment {
    diff: u128,
    den: u128,
}

const FILTER_TOLERANCE: f64 = 1e-12;

impl Increment {
    pub fn zero() -> Self {
        Increment { diff: 0, den: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.diff == 0
    }

    pub fn to_f64(&self) -> f64 {
        let d = self.diff as f64;
        d * d / self.den as f64
    }

    pub fn to_rational(&self) -> BigRational {
        let d = BigInt::from(self.diff);
        BigRational::new(&d * &d, BigInt::from(self.den))
    }

    fn cmp_exact(&self, other: &Self) -> Ordering {
        let a = BigUint::from(self.diff).pow(2u32) * BigUint::from(other.den);
        let b = BigUint::from(other.diff).pow(2u32) * BigUint::from(self.den);
        a.cmp(&b)
    }
}

impl Ord for Increment {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.diff == 0, other.diff == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (a, b) = (self.to_f64(), other.to_f64());
        let slack = FILTER_TOLERANCE * a.max(b);
        if a > b + slack {
            Ordering::Greater
        } else if b > a + slack {
            Ordering::Less
        } else {
            self.cmp_exact(other)
        }
    }
}

impl PartialOrd for Increment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Increment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Increment {}

/// Squared-error increment of merging `a` and `b`; equals `E(a ∪ b) - E(a) - E(b)`.
pub fn delta_e_merge(a: &ClusterStats, b: &ClusterStats) -> Increment {
    let left = b.n as u128 * a.s as u128;
    let right = a.n as u128 * b.s as u128;
    let diff = left.abs_diff(right);
    let den = a.n as u128 * b.n as u128 * (a.n as u128 + b.n as u128);
    Increment { diff, den }
}

/// Prefix sums over an ordered run of disjoint clusters ("atoms").
///
/// A histogram yields one atom per occupied level. Any contiguous atom range
/// can then be summarized in O(1).
#[derive(Debug, Clone)]
pub(crate) struct AtomTable {
    atoms: Vec<ClusterStats>,
    n: Vec<u64>,
    s: Vec<u64>,
    ss: Vec<u128>,
}

impl AtomTable {
    pub(crate) fn new(atoms: Vec<ClusterStats>) -> Result<Self, Error> {
        if atoms.is_empty() || atoms.iter().any(|a| a.n == 0 || a.lo > a.hi) {
            return Err(Error::InvalidAtoms);
        }
        if atoms.windows(2).any(|w| w[0].hi >= w[1].lo) {
            return Err(Error::InvalidAtoms);
        }
        let mut n = Vec::with_capacity(atoms.len() + 1);
        let mut s = Vec::with_capacity(atoms.len() + 1);
        let mut ss = Vec::with_capacity(atoms.len() + 1);
        n.push(0);
        s.push(0);
        ss.push(0);
        for a in &atoms {
            n.push(n.last().unwrap() + a.n);
            s.push(s.last().unwrap() + a.s);
            ss.push(ss.last().unwrap() + a.ss);
        }
        Ok(AtomTable { atoms, n, s, ss })
    }

    pub(crate) fn from_histogram(h: &Histogram) -> Self {
        let atoms = h.occupied().map(|(v, c)| ClusterStats::singleton(v, c)).collect();
        AtomTable::new(atoms).expect("histogram atoms are ordered and non-empty")
    }

    pub(crate) fn len(&self) -> usize {
        self.atoms.len()
    }

    pub(crate) fn atoms(&self) -> &[ClusterStats] {
        &self.atoms
    }

    /// Stats of atoms `first..=last`.
    pub(crate) fn range(&self, first: usize, last: usize) -> ClusterStats {
        ClusterStats {
            lo: self.atoms[first].lo,
            hi: self.atoms[last].hi,
            n: self.n[last + 1] - self.n[first],
            s: self.s[last + 1] - self.s[first],
            ss: self.ss[last + 1] - self.ss[first],
        }
    }

    /// Index of the atom whose level span contains `level`.
    pub(crate) fn index_of(&self, level: Level) -> Option<usize> {
        let i = self.atoms.partition_point(|a| a.hi < level);
        (i < self.atoms.len() && self.atoms[i].lo <= level).then_some(i)
    }
}
