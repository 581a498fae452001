//! Nested piecewise-constant approximations from a hierarchy.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::clustering::{Hierarchy, NodeId, OptimalQuantizer, Splitter};
use crate::error::Error;
use crate::image::{Histogram, Image, Level};
use crate::stats::Increment;

/// The k-cluster member of an expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxStep {
    pub k: usize,
    /// Cut nodes ordered by level.
    pub cut: Vec<NodeId>,
    pub error: BigRational,
    /// `sqrt(E_k / N)`.
    pub sigma: f64,
}

impl ApproxStep {
    pub fn means(&self, hier: &Hierarchy) -> Vec<BigRational> {
        self.cut.iter().map(|&id| hier.node(id).stats.mean()).collect()
    }
}

/// Greedy expansion of a hierarchy: `order[i]` is the node split to go from
/// `i + 1` to `i + 2` clusters and `errors[k - 1]` is E_k.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    order: Vec<NodeId>,
    errors: Vec<BigRational>,
    n_pixels: u64,
}

struct Frontier {
    delta_e: Increment,
    lo: Level,
    id: NodeId,
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        self.delta_e.cmp(&other.delta_e).then_with(|| other.lo.cmp(&self.lo))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

pub(crate) fn sigma_of(e: &BigRational, n: u64) -> f64 {
    libm::sqrt(e.to_f64().unwrap_or(0.0).max(0.0) / n as f64)
}

/// Expands `hier` into approximations with `1..=k_max` clusters, each time
/// splitting the frontier node with the largest squared-error drop (ties go
/// to the node with the smallest level).
pub fn expand(hier: &Hierarchy, k_max: usize) -> Result<Expansion, Error> {
    let g = hier.leaf_count();
    if k_max == 0 {
        return Err(Error::ZeroClusters);
    }
    if k_max > g {
        return Err(Error::TooManyClusters { k: k_max, g });
    }
    let push = |heap: &mut BinaryHeap<Frontier>, id: NodeId| {
        let node = hier.node(id);
        if let Some(split) = node.split {
            heap.push(Frontier { delta_e: split.delta_e, lo: node.stats.lo, id });
        }
    };
    let mut heap = BinaryHeap::new();
    push(&mut heap, hier.root());
    let mut error = hier.node(hier.root()).stats.error();
    let mut errors = vec![error.clone()];
    let mut order = Vec::with_capacity(k_max - 1);
    while errors.len() < k_max {
        let best = heap.pop().expect("fewer than g clusters leave a splittable node");
        let split = hier.node(best.id).split.expect("frontier nodes are split");
        error -= split.delta_e.to_rational();
        errors.push(error.clone());
        order.push(best.id);
        push(&mut heap, split.low);
        push(&mut heap, split.high);
    }
    Ok(Expansion { order, errors, n_pixels: hier.n_pixels() })
}

impl Expansion {
    pub fn k_max(&self) -> usize {
        self.errors.len()
    }

    /// E_1..E_kmax.
    pub fn errors(&self) -> &[BigRational] {
        &self.errors
    }

    pub fn split_order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn sigma(&self, k: usize) -> f64 {
        sigma_of(&self.errors[k - 1], self.n_pixels)
    }

    pub fn step(&self, hier: &Hierarchy, k: usize) -> Result<ApproxStep, Error> {
        if k == 0 {
            return Err(Error::ZeroClusters);
        }
        if k > self.k_max() {
            return Err(Error::TooManyClusters { k, g: self.k_max() });
        }
        let mut cut = vec![hier.root()];
        for &id in &self.order[..k - 1] {
            let split = hier.node(id).split.expect("expanded nodes are split");
            let at = cut.iter().position(|&c| c == id).expect("expanded node is on the frontier");
            cut.splice(at..=at, [split.low, split.high]);
        }
        Ok(ApproxStep { k, cut, error: self.errors[k - 1].clone(), sigma: self.sigma(k) })
    }

    /// All steps `k = 1..=k_max`.
    pub fn steps(&self, hier: &Hierarchy) -> Vec<ApproxStep> {
        let mut out = Vec::with_capacity(self.k_max());
        let mut cut = vec![hier.root()];
        for k in 1..=self.k_max() {
            if k > 1 {
                let id = self.order[k - 2];
                let split = hier.node(id).split.expect("expanded nodes are split");
                let at = cut.iter().position(|&c| c == id).expect("expanded node is on the frontier");
                cut.splice(at..=at, [split.low, split.high]);
            }
            out.push(ApproxStep { k, cut: cut.clone(), error: self.errors[k - 1].clone(), sigma: self.sigma(k) });
        }
        out
    }
}

/// Replaces each pixel by its cut cluster's mean, rounded half-up.
pub fn render(img: &Image, hier: &Hierarchy, step: &ApproxStep) -> Result<Image, Error> {
    let mut lut: Vec<Option<Level>> = vec![None; img.maxval() as usize + 1];
    for &id in &step.cut {
        let stats = hier.get(id).ok_or(Error::UnknownNode(id))?.stats;
        let mean = stats.rounded_mean();
        for level in stats.lo..=stats.hi.min(img.maxval()) {
            lut[level as usize] = Some(mean);
        }
    }
    let pixels = img
        .pixels()
        .iter()
        .map(|&p| lut[p as usize].ok_or(Error::MissingLevel(p)))
        .collect::<Result<Vec<_>, _>>()?;
    Image::new(img.width(), img.height(), img.maxval(), pixels)
}

/// Interior indices `i` (1-based) where `2 E_i > E_{i-1} + E_{i+1}`.
pub fn convexity_report(errors: &[BigRational]) -> Vec<usize> {
    let two = BigRational::from_integer(BigInt::from(2));
    errors
        .windows(3)
        .enumerate()
        .filter(|(_, w)| &two * &w[1] > &w[0] + &w[2])
        .map(|(i, _)| i + 2)
        .collect()
}

/// One row of the σ(k) curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub k: usize,
    pub optimal: (BigRational, f64),
    /// Per requested splitter, in request order.
    pub methods: Vec<(Splitter, BigRational, f64)>,
}

/// E_k and σ_k for the optimal partitions and for each splitter's expansion,
/// `k = 1..=k_max` (all occupied levels when `k_max` is `None`).
pub fn curve(h: &Histogram, splitters: &[Splitter], k_max: Option<usize>) -> Result<Vec<CurveRow>, Error> {
    let k_max = k_max.unwrap_or_else(|| h.occupied_count());
    let optimal = OptimalQuantizer::new(h, k_max)?;
    let n = h.total();
    let expansions = splitters
        .iter()
        .map(|&s| expand(&Hierarchy::build(h, s), k_max).map(|e| (s, e)))
        .collect::<Result<Vec<_>, _>>()?;
    let opt = optimal.errors();
    let rows = (1..=k_max)
        .map(|k| {
            let e = opt[k - 1].clone();
            let sigma = sigma_of(&e, n);
            CurveRow {
                k,
                optimal: (e, sigma),
                methods: expansions
                    .iter()
                    .map(|(s, ex)| (*s, ex.errors()[k - 1].clone(), ex.sigma(k)))
                    .collect(),
            }
        })
        .collect();
    Ok(rows)
}

/// True when `errors` strictly decreases to zero.
pub fn strictly_decreasing_to_zero(errors: &[BigRational]) -> bool {
    errors.windows(2).all(|w| w[1] < w[0]) && errors.last().is_some_and(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::build_hierarchy;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn qs(v: &[(i64, i64)]) -> Vec<BigRational> {
        v.iter().map(|&(n, d)| q(n, d)).collect()
    }

    #[test]
    fn worked_expansion() {
        let h = Histogram::from_pairs(3, &[(0, 2), (1, 1), (3, 1)]).unwrap();
        let hier = build_hierarchy(&h, Splitter::Otsu);
        let ex = expand(&hier, 3).unwrap();
        assert_eq!(ex.errors(), qs(&[(6, 1), (2, 3), (0, 1)]).as_slice());
        assert!(strictly_decreasing_to_zero(ex.errors()));
    }

    #[test]
    fn four_level_expansion() {
        let h = Histogram::from_counts(3, [1, 1, 1, 1].into()).unwrap();
        let hier = build_hierarchy(&h, Splitter::Otsu);
        let ex = expand(&hier, 4).unwrap();
        assert_eq!(ex.errors(), qs(&[(5, 1), (1, 1), (1, 2), (0, 1)]).as_slice());
        let steps = ex.steps(&hier);
        for (k, s) in steps.iter().enumerate() {
            assert_eq!(s.cut.len(), k + 1);
            assert_eq!(s, &ex.step(&hier, k + 1).unwrap());
        }
        assert_eq!(steps[1].sigma, 0.5);
    }

    #[test]
    fn expansion_bounds() {
        let h = Histogram::from_pairs(3, &[(0, 2), (1, 1), (3, 1)]).unwrap();
        let hier = build_hierarchy(&h, Splitter::Merge);
        assert_eq!(expand(&hier, 4), Err(Error::TooManyClusters { k: 4, g: 3 }));
        assert_eq!(expand(&hier, 0), Err(Error::ZeroClusters));
    }

    #[test]
    fn render_examples() {
        let img = Image::new(2, 2, 3, vec![0, 0, 1, 3]).unwrap();
        let hier = build_hierarchy(&img.histogram(), Splitter::Otsu);
        let ex = expand(&hier, 3).unwrap();
        assert_eq!(render(&img, &hier, &ex.step(&hier, 1).unwrap()).unwrap().pixels(), &[1, 1, 1, 1]);
        assert_eq!(render(&img, &hier, &ex.step(&hier, 2).unwrap()).unwrap().pixels(), &[0, 0, 0, 3]);
        assert_eq!(render(&img, &hier, &ex.step(&hier, 3).unwrap()).unwrap(), img);
    }

    #[test]
    fn render_uncovered_level() {
        let img = Image::new(2, 2, 3, vec![0, 0, 1, 3]).unwrap();
        let hier = build_hierarchy(&img.histogram(), Splitter::Otsu);
        let step = expand(&hier, 3).unwrap().step(&hier, 3).unwrap();
        let other = Image::new(1, 1, 3, vec![2]).unwrap();
        assert_eq!(render(&other, &hier, &step), Err(Error::MissingLevel(2)));
    }

    #[test]
    fn convexity_examples() {
        assert!(convexity_report(&qs(&[(5, 1), (1, 1), (1, 2), (0, 1)])).is_empty());
        assert!(convexity_report(&qs(&[(6, 1), (2, 3), (0, 1)])).is_empty());
        assert_eq!(convexity_report(&qs(&[(4, 1), (3, 1), (0, 1)])), vec![2]);
        assert!(convexity_report(&qs(&[(4, 1), (3, 1)])).is_empty());
    }

    #[test]
    fn curve_examples() {
        let h = Histogram::from_counts(3, [1, 1, 1, 1].into()).unwrap();
        let rows = curve(&h, &Splitter::ALL, None).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1].optimal.1, 0.5);
        let otsu = rows[1].methods.iter().find(|m| m.0 == Splitter::Otsu).unwrap();
        assert_eq!(otsu.2, 0.5);
        let sd = libm::sqrt(5.0 / 4.0);
        for m in &rows[0].methods {
            assert_eq!(m.1, rows[0].optimal.0);
            assert_eq!(m.2, sd);
        }
        for m in &rows[3].methods {
            assert_eq!(m.2, 0.0);
        }
        assert_eq!(rows[3].optimal.1, 0.0);
    }
}
