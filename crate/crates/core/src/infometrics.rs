//! Hartley, Shannon and integer information totals.

use alloc::vec;
use alloc::vec::Vec;

use crate::clustering::{Hierarchy, NodeId};
use crate::error::Error;
use crate::image::Histogram;
use crate::invariant::HuTable;

/// `n · log2(g)` bits.
pub fn hartley_total(n: u64, g: usize) -> f64 {
    n as f64 * libm::log2(g as f64)
}

/// `-Σ count · log2(count / N)` over the histogram levels.
pub fn shannon_total(h: &Histogram) -> f64 {
    shannon_of_counts(h.occupied().map(|(_, c)| c))
}

/// Shannon total of a partition given its cluster sizes.
pub fn shannon_of_counts<I: IntoIterator<Item = u64>>(counts: I) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let total: f64 = counts.iter().map(|&c| c as f64 * libm::log2(n / c as f64)).sum();
    total.max(0.0)
}

/// `Σ count(level) · bits(code(level))`.
pub fn integer_total(h: &Histogram, table: &HuTable) -> Result<u64, Error> {
    h.occupied()
        .map(|(level, count)| {
            table
                .code(level)
                .map(|code| count * code.bits() as u64)
                .ok_or(Error::MissingLevel(level))
        })
        .sum()
}

/// Splitting of the integer total at an antichain cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Bits carried by the truncated hierarchy above the cut.
    pub q0: u64,
    /// Bits inside each cut node's subtree, in cut order.
    pub parts: Vec<u64>,
}

impl Decomposition {
    pub fn total(&self) -> u64 {
        self.q0 + self.parts.iter().sum::<u64>()
    }
}

/// Splits the integer total at `cut`, which must contain exactly one
/// ancestor-or-self of every leaf.
///
/// `q0` counts, per pixel, the non-uniform strict ancestors of its cut node;
/// `parts[i]` is the integer total of `cut[i]`'s subtree seen as its own
/// hierarchy. Hence `q0 + Σ parts == hier.integer_total()`.
pub fn decompose_at_cut(hier: &Hierarchy, cut: &[NodeId]) -> Result<Decomposition, Error> {
    let mut slot = vec![usize::MAX; hier.nodes().len()];
    for (i, &id) in cut.iter().enumerate() {
        if hier.get(id).is_none() {
            return Err(Error::UnknownNode(id));
        }
        if slot[id] != usize::MAX {
            return Err(Error::NotAntichain);
        }
        slot[id] = i;
    }
    let mut parts = vec![0u64; cut.len()];
    let mut q0 = 0u64;
    for &leaf in hier.leaves() {
        let node = hier.node(leaf);
        let mut owner = None;
        for id in core::iter::once(leaf).chain(hier.ancestors(leaf)) {
            if slot[id] != usize::MAX {
                if owner.is_some() {
                    return Err(Error::NotAntichain);
                }
                owner = Some(id);
            }
        }
        let owner = owner.ok_or(Error::IncompleteCover(node.stats.lo))?;
        let above = hier.node(owner).depth as u64;
        let below = node.depth as u64 - above;
        q0 += node.stats.n * above;
        parts[slot[owner]] += node.stats.n * below;
    }
    Ok(Decomposition { q0, parts })
}

/// Storage depth used for "image volume".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VolumeBits {
    /// 8 bits when maxval ≤ 255, else 16.
    #[default]
    Auto,
    Fixed(u32),
}

impl VolumeBits {
    pub fn resolve(self, maxval: u16) -> u32 {
        match self {
            VolumeBits::Auto if maxval <= 255 => 8,
            VolumeBits::Auto => 16,
            VolumeBits::Fixed(b) => b,
        }
    }
}

/// `100 · q / (N · bits)`.
pub fn percent_of_volume(q_bits: f64, n_pixels: u64, bits: u32) -> f64 {
    100.0 * q_bits / (n_pixels as f64 * bits as f64)
}

/// Information totals of one image or one approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoReport {
    pub n_pixels: u64,
    /// Occupied levels, or clusters when describing an approximation.
    pub g: usize,
    pub q_hartley: f64,
    pub q_shannon: f64,
    pub q_integer: u64,
    pub pct_hartley: f64,
    pub pct_shannon: f64,
    pub pct_integer: f64,
}

impl InfoReport {
    fn assemble(n: u64, g: usize, shannon: f64, q_integer: u64, bits: u32) -> Self {
        let q_hartley = hartley_total(n, g);
        InfoReport {
            n_pixels: n,
            g,
            q_hartley,
            q_shannon: shannon,
            q_integer,
            pct_hartley: percent_of_volume(q_hartley, n, bits),
            pct_shannon: percent_of_volume(shannon, n, bits),
            pct_integer: percent_of_volume(q_integer as f64, n, bits),
        }
    }

    /// Totals over the full histogram with integer bits from `table`.
    pub fn for_image(h: &Histogram, table: &HuTable, volume: VolumeBits) -> Result<Self, Error> {
        let q = integer_total(h, table)?;
        let bits = volume.resolve(h.maxval());
        Ok(Self::assemble(h.total(), h.occupied_count(), shannon_total(h), q, bits))
    }

    /// Totals of the approximation whose clusters are the cut nodes, each
    /// treated as indivisible: Hartley and Shannon over the cluster sizes, and
    /// the integer part `q0` of the decomposition at the cut.
    pub fn for_cut(hier: &Hierarchy, cut: &[NodeId], maxval: u16, volume: VolumeBits) -> Result<Self, Error> {
        let d = decompose_at_cut(hier, cut)?;
        let shannon = shannon_of_counts(cut.iter().map(|&id| hier.node(id).stats.n));
        Ok(Self::assemble(hier.n_pixels(), cut.len(), shannon, d.q0, volume.resolve(maxval)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{build_hierarchy, Splitter};

    fn worked() -> Histogram {
        Histogram::from_pairs(3, &[(0, 2), (1, 1), (3, 1)]).unwrap()
    }

    #[test]
    fn hartley_examples() {
        assert_eq!(hartley_total(4, 1), 0.0);
        assert_eq!(hartley_total(4, 4), 8.0);
        assert!((hartley_total(4, 3) - 6.339850002884625).abs() < 1e-12);
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_total(&Histogram::from_pairs(9, &[(5, 12)]).unwrap()), 0.0);
        assert_eq!(shannon_total(&worked()), 6.0);
        assert_eq!(shannon_total(&Histogram::from_counts(3, [1, 1, 1, 1].into()).unwrap()), 8.0);
    }

    #[test]
    fn integer_examples() {
        let h = worked();
        let otsu = HuTable::encode(&build_hierarchy(&h, Splitter::Otsu));
        let balanced = HuTable::encode(&build_hierarchy(&h, Splitter::Balanced));
        assert_eq!(integer_total(&h, &otsu), Ok(7));
        assert_eq!(integer_total(&h, &balanced), Ok(6));
        let flat = Histogram::from_pairs(3, &[(2, 5)]).unwrap();
        let t = HuTable::encode(&build_hierarchy(&flat, Splitter::Otsu));
        assert_eq!(integer_total(&flat, &t), Ok(0));
        assert_eq!(integer_total(&h, &t), Err(Error::MissingLevel(0)));
    }

    #[test]
    fn decomposition_examples() {
        let hier = build_hierarchy(&worked(), Splitter::Otsu);
        let root = hier.node(hier.root()).split.unwrap();
        let d = decompose_at_cut(&hier, &[root.low, root.high]).unwrap();
        assert_eq!(d, Decomposition { q0: 4, parts: vec![3, 0] });
        assert_eq!(d.total(), 7);

        let d = decompose_at_cut(&hier, &[hier.root()]).unwrap();
        assert_eq!(d, Decomposition { q0: 0, parts: vec![7] });

        let d = decompose_at_cut(&hier, hier.leaves()).unwrap();
        assert_eq!(d, Decomposition { q0: 7, parts: vec![0, 0, 0] });
    }

    #[test]
    fn decomposition_rejects_bad_cuts() {
        let hier = build_hierarchy(&worked(), Splitter::Otsu);
        let root = hier.node(hier.root()).split.unwrap();
        assert_eq!(decompose_at_cut(&hier, &[hier.root(), root.low]), Err(Error::NotAntichain));
        assert_eq!(decompose_at_cut(&hier, &[root.low]), Err(Error::IncompleteCover(3)));
        assert_eq!(decompose_at_cut(&hier, &[root.low, root.low]), Err(Error::NotAntichain));
        assert_eq!(decompose_at_cut(&hier, &[99]), Err(Error::UnknownNode(99)));
    }

    #[test]
    fn volume_percentages() {
        assert_eq!(percent_of_volume(0.0, 4, 8), 0.0);
        assert_eq!(percent_of_volume(8.0, 4, VolumeBits::Auto.resolve(3)), 25.0);
        assert_eq!(percent_of_volume(32.0, 4, 8), 100.0);
        assert_eq!(VolumeBits::Auto.resolve(1023), 16);
        assert_eq!(VolumeBits::Fixed(16).resolve(3), 16);
    }

    #[test]
    fn report_for_finest_cut() {
        let h = worked();
        let hier = build_hierarchy(&h, Splitter::Balanced);
        let r = InfoReport::for_cut(&hier, hier.leaves(), 3, VolumeBits::Auto).unwrap();
        assert_eq!(r.q_integer, 6);
        assert_eq!(r.q_shannon, 6.0);
        assert_eq!(r.g, 3);
    }
}
