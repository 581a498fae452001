use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{Node, NodeId, Split};
use crate::image::{Histogram, Level};
use crate::stats::{delta_e_merge, AtomTable, ClusterStats, Increment};

/// One bottom-up merge of two adjacent clusters.
///
/// Ids `0..g` are the initial uniform clusters in level order; the cluster
/// created by the `j`-th step has id `g + j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MergeStep {
    pub left: NodeId,
    pub right: NodeId,
    pub merged: NodeId,
    pub delta_e: Increment,
}

/// Candidate adjacent pair; the heap pops the smallest increment, leftmost first.
struct Candidate {
    delta_e: Increment,
    lo: Level,
    left: usize,
    right: usize,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        other.delta_e.cmp(&self.delta_e).then_with(|| other.lo.cmp(&self.lo))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

pub(crate) fn merge_steps(table: &AtomTable) -> (Vec<MergeStep>, usize) {
    let g = table.len();
    let mut stats: Vec<ClusterStats> = table.atoms().to_vec();
    let mut alive: Vec<bool> = alloc::vec![true; g];
    let mut left_of: Vec<Option<usize>> = (0..g).map(|i| i.checked_sub(1)).collect();
    let mut right_of: Vec<Option<usize>> = (0..g).map(|i| (i + 1 < g).then_some(i + 1)).collect();

    let candidate = |stats: &[ClusterStats], left: usize, right: usize| Candidate {
        delta_e: delta_e_merge(&stats[left], &stats[right]),
        lo: stats[left].lo,
        left,
        right,
    };

    let mut heap: BinaryHeap<Candidate> = (0..g.saturating_sub(1)).map(|i| candidate(&stats, i, i + 1)).collect();
    let mut steps = Vec::with_capacity(g.saturating_sub(1));
    let mut ties = 0;

    let is_live = |alive: &[bool], c: &Candidate| alive[c.left] && alive[c.right];

    while let Some(best) = heap.pop() {
        if !is_live(&alive, &best) {
            continue;
        }
        while heap.peek().is_some_and(|c| !is_live(&alive, c)) {
            heap.pop();
        }
        if heap.peek().is_some_and(|c| c.delta_e == best.delta_e) {
            ties += 1;
        }

        let merged = stats.len();
        stats.push(stats[best.left].union(&stats[best.right]));
        alive[best.left] = false;
        alive[best.right] = false;
        alive.push(true);
        let before = left_of[best.left];
        let after = right_of[best.right];
        left_of.push(before);
        right_of.push(after);
        if let Some(b) = before {
            right_of[b] = Some(merged);
            heap.push(candidate(&stats, b, merged));
        }
        if let Some(a) = after {
            left_of[a] = Some(merged);
            heap.push(candidate(&stats, merged, a));
        }
        steps.push(MergeStep { left: best.left, right: best.right, merged, delta_e: best.delta_e });
    }
    (steps, ties)
}

/// Tree whose splits are the merges read backward.
pub(crate) fn dendrogram(table: &AtomTable, steps: &[MergeStep]) -> (Vec<Node>, NodeId) {
    let mut nodes: Vec<Node> = table
        .atoms()
        .iter()
        .enumerate()
        .map(|(i, &stats)| Node { stats, split: None, parent: None, depth: 0, first: i, last: i })
        .collect();
    for step in steps {
        let (l, r) = (&nodes[step.left], &nodes[step.right]);
        let node = Node {
            stats: l.stats.union(&r.stats),
            split: Some(Split {
                threshold: l.stats.hi,
                low: step.left,
                high: step.right,
                delta_e: step.delta_e,
            }),
            parent: None,
            depth: 0,
            first: l.first,
            last: r.last,
        };
        nodes.push(node);
        nodes[step.left].parent = Some(step.merged);
        nodes[step.right].parent = Some(step.merged);
    }
    let root = nodes.len() - 1;
    (nodes, root)
}

/// Adjacent-pair merges, smallest increment first (leftmost on ties), until
/// one cluster remains.
pub fn merge_sequence(h: &Histogram) -> Vec<MergeStep> {
    merge_steps(&AtomTable::from_histogram(h)).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn worked_merge_order() {
        let h = Histogram::from_pairs(3, &[(0, 2), (1, 1), (3, 1)]).unwrap();
        let steps = merge_sequence(&h);
        assert_eq!(steps.len(), 2);
        assert_eq!((steps[0].left, steps[0].right, steps[0].merged), (0, 1, 3));
        assert_eq!(steps[0].delta_e.to_rational(), q(2, 3));
        assert_eq!((steps[1].left, steps[1].right, steps[1].merged), (3, 2, 4));
        assert_eq!(steps[1].delta_e.to_rational(), q(16, 3));
    }

    #[test]
    fn single_level_has_no_merges() {
        let h = Histogram::from_pairs(9, &[(4, 3)]).unwrap();
        assert!(merge_sequence(&h).is_empty());
    }

    #[test]
    fn equal_costs_merge_leftmost() {
        let h = Histogram::from_counts(3, [1, 1, 1, 1].into()).unwrap();
        let steps = merge_sequence(&h);
        assert_eq!((steps[0].left, steps[0].right), (0, 1));
        assert_eq!(steps[0].delta_e.to_rational(), q(1, 2));
        // {2},{3} at 1/2 beats {0,1},{2} at 3/2
        assert_eq!((steps[1].left, steps[1].right), (2, 3));
        assert_eq!((steps[2].left, steps[2].right), (4, 5));
    }
}
