//! Binary hierarchies of interval clusters.
//!
//! Clusters are always contiguous runs of *atoms*. For an image histogram an
//! atom is one occupied level, so the leaves of every hierarchy are exactly
//! the uniform clusters. Three splitters are supported:
//!
//! * [`Splitter::Otsu`] picks the threshold with the largest squared-error drop;
//! * [`Splitter::Balanced`] picks the threshold that best equalizes pixel counts;
//! * [`Splitter::Merge`] reverses bottom-up merging of adjacent clusters with the
//!   smallest squared-error increment.
//!
//! Ties are broken toward the smallest threshold or the leftmost pair, and the
//! number of tied decisions is recorded in [`Hierarchy::ties`].

mod merge;
mod optimal;
mod split;

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::image::{Histogram, Level};
use crate::stats::{delta_e_merge, AtomTable, ClusterStats, Increment};

pub use merge::{merge_sequence, MergeStep};
pub use optimal::{optimal_partition, OptimalQuantizer};
pub use split::{split_balanced, split_otsu};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Splitter {
    Otsu,
    Balanced,
    Merge,
}

impl Splitter {
    pub const ALL: [Splitter; 3] = [Splitter::Otsu, Splitter::Merge, Splitter::Balanced];

    pub fn name(&self) -> &'static str {
        match self {
            Splitter::Otsu => "otsu",
            Splitter::Balanced => "balanced",
            Splitter::Merge => "merge",
        }
    }
}

impl fmt::Display for Splitter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Splitter {
    type Err = UnknownSplitter;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "otsu" => Ok(Splitter::Otsu),
            "balanced" => Ok(Splitter::Balanced),
            "merge" => Ok(Splitter::Merge),
            _ => Err(UnknownSplitter),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownSplitter;

impl fmt::Display for UnknownSplitter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("splitter must be one of otsu, balanced, merge")
    }
}

/// How a non-uniform node divides: `low` holds levels `<= threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split {
    pub threshold: Level,
    pub low: NodeId,
    pub high: NodeId,
    /// `E(parent) - E(low) - E(high)`.
    pub delta_e: Increment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub stats: ClusterStats,
    pub split: Option<Split>,
    pub parent: Option<NodeId>,
    /// Number of splits between the root and this node.
    pub depth: usize,
    first: usize,
    last: usize,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }

    /// Inclusive range of atom indices covered by this node.
    pub fn atom_range(&self) -> (usize, usize) {
        (self.first, self.last)
    }
}

#[derive(Debug, Clone)]
pub struct Hierarchy {
    nodes: Vec<Node>,
    root: NodeId,
    splitter: Splitter,
    depth: usize,
    ties: usize,
    leaves: Vec<NodeId>,
    atoms: AtomTable,
}

/// Full hierarchy of `h` down to its uniform clusters.
pub fn build_hierarchy(h: &Histogram, splitter: Splitter) -> Hierarchy {
    Hierarchy::build(h, splitter)
}

impl Hierarchy {
    pub fn build(h: &Histogram, splitter: Splitter) -> Self {
        Self::with_table(AtomTable::from_histogram(h), splitter)
    }

    /// Hierarchy over arbitrary ordered, disjoint clusters treated as
    /// indivisible leaves.
    pub fn from_atoms(atoms: Vec<ClusterStats>, splitter: Splitter) -> Result<Self, Error> {
        Ok(Self::with_table(AtomTable::new(atoms)?, splitter))
    }

    fn with_table(table: AtomTable, splitter: Splitter) -> Self {
        let (nodes, root, ties) = match splitter {
            Splitter::Otsu | Splitter::Balanced => top_down(&table, splitter),
            Splitter::Merge => {
                let (steps, ties) = merge::merge_steps(&table);
                let (nodes, root) = merge::dendrogram(&table, &steps);
                (nodes, root, ties)
            }
        };
        let mut h = Hierarchy {
            nodes,
            root,
            splitter,
            depth: 0,
            ties,
            leaves: Vec::new(),
            atoms: table,
        };
        h.finish();
        h
    }

    /// Fills depths and the leaf index.
    fn finish(&mut self) {
        let mut leaves = vec![usize::MAX; self.atoms.len()];
        let mut stack = vec![(self.root, 0usize)];
        let mut depth = 0;
        while let Some((id, d)) = stack.pop() {
            let node = &mut self.nodes[id];
            node.depth = d;
            match node.split {
                Some(s) => {
                    stack.push((s.high, d + 1));
                    stack.push((s.low, d + 1));
                }
                None => {
                    leaves[node.first] = id;
                    depth = depth.max(d);
                }
            }
        }
        self.depth = depth;
        self.leaves = leaves;
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn get(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn splitter(&self) -> Splitter {
        self.splitter
    }

    /// Longest root-to-leaf split count T.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Decisions whose optimum was shared by more than one candidate.
    pub fn ties(&self) -> usize {
        self.ties
    }

    /// Leaf ids in increasing level order.
    pub fn leaves(&self) -> &[NodeId] {
        &self.leaves
    }

    /// Number of leaves g.
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn n_pixels(&self) -> u64 {
        self.nodes[self.root].stats.n
    }

    /// The leaf cluster containing `level`.
    pub fn leaf_for_level(&self, level: Level) -> Option<NodeId> {
        self.atoms.index_of(level).map(|i| self.leaves[i])
    }

    /// Strict ancestors of `id`, nearest first.
    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        core::iter::successors(self.nodes[id].parent, move |&p| self.nodes[p].parent)
    }

    /// All node ids under `id`, including `id`.
    pub fn subtree(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            out.push(n);
            if let Some(s) = self.nodes[n].split {
                stack.push(s.high);
                stack.push(s.low);
            }
        }
        out
    }

    /// Σ pixels × non-uniform clusters containing them, i.e. Σ n(leaf)·depth(leaf).
    pub fn integer_total(&self) -> u64 {
        self.leaves
            .iter()
            .map(|&l| self.nodes[l].stats.n * self.nodes[l].depth as u64)
            .sum()
    }
}

fn top_down(table: &AtomTable, splitter: Splitter) -> (Vec<Node>, NodeId, usize) {
    let g = table.len();
    let mut nodes = vec![Node {
        stats: table.range(0, g - 1),
        split: None,
        parent: None,
        depth: 0,
        first: 0,
        last: g - 1,
    }];
    let mut ties = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let (first, last) = (nodes[id].first, nodes[id].last);
        if first == last {
            continue;
        }
        let (m, tied) = match splitter {
            Splitter::Otsu => split::otsu_index(table, first, last),
            Splitter::Balanced => split::balanced_index(table, first, last),
            Splitter::Merge => unreachable!("merge hierarchies are built bottom-up"),
        };
        ties += tied as usize;
        let low_stats = table.range(first, m);
        let high_stats = table.range(m + 1, last);
        let low = nodes.len();
        let high = low + 1;
        for (stats, a, b) in [(low_stats, first, m), (high_stats, m + 1, last)] {
            nodes.push(Node { stats, split: None, parent: Some(id), depth: 0, first: a, last: b });
        }
        nodes[id].split = Some(Split {
            threshold: table.atoms()[m].hi,
            low,
            high,
            delta_e: delta_e_merge(&low_stats, &high_stats),
        });
        queue.push_back(low);
        queue.push_back(high);
    }
    (nodes, 0, ties)
}
