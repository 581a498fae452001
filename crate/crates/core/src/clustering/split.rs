use crate::error::Error;
use crate::image::{Histogram, Level};
use crate::stats::{delta_e_merge, AtomTable, ClusterStats};

/// Split index maximizing the squared-error drop over atoms `first..=last`.
/// Returns the last atom of the low part and whether the maximum was shared.
pub(crate) fn otsu_index(table: &AtomTable, first: usize, last: usize) -> (usize, bool) {
    let mut best = first;
    let mut best_gain = delta_e_merge(&table.range(first, first), &table.range(first + 1, last));
    let mut tied = false;
    for m in first + 1..last {
        let gain = delta_e_merge(&table.range(first, m), &table.range(m + 1, last));
        match gain.cmp(&best_gain) {
            core::cmp::Ordering::Greater => {
                best = m;
                best_gain = gain;
                tied = false;
            }
            core::cmp::Ordering::Equal => tied = true,
            core::cmp::Ordering::Less => {}
        }
    }
    (best, tied)
}

/// Split index minimizing `|n_low - n_high|` over atoms `first..=last`.
pub(crate) fn balanced_index(table: &AtomTable, first: usize, last: usize) -> (usize, bool) {
    let total = table.range(first, last).n;
    let mut best = first;
    let mut best_gap = u64::MAX;
    let mut tied = false;
    for m in first..last {
        let low = table.range(first, m).n;
        let gap = low.abs_diff(total - low);
        if gap < best_gap {
            best = m;
            best_gap = gap;
            tied = false;
        } else if gap == best_gap {
            tied = true;
        }
    }
    (best, tied)
}

fn atom_span(h: &Histogram, c: &ClusterStats) -> Result<(AtomTable, usize, usize), Error> {
    let table = AtomTable::from_histogram(h);
    let first = table.index_of(c.lo).ok_or(Error::EmptyInterval { lo: c.lo, hi: c.hi })?;
    let last = table.index_of(c.hi).ok_or(Error::EmptyInterval { lo: c.lo, hi: c.hi })?;
    if first == last {
        return Err(Error::UniformCluster);
    }
    Ok((table, first, last))
}

/// Otsu threshold of cluster `c`: levels `<= t` form the low sub-cluster.
pub fn split_otsu(h: &Histogram, c: &ClusterStats) -> Result<Level, Error> {
    let (table, first, last) = atom_span(h, c)?;
    let (m, _) = otsu_index(&table, first, last);
    Ok(table.atoms()[m].hi)
}

/// Threshold of `c` that best equalizes the pixel counts of the two halves.
pub fn split_balanced(h: &Histogram, c: &ClusterStats) -> Result<Level, Error> {
    let (table, first, last) = atom_span(h, c)?;
    let (m, _) = balanced_index(&table, first, last);
    Ok(table.atoms()[m].hi)
}
