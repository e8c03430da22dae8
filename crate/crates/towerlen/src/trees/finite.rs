//! Finite trees of integer tuples and their ranks.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::relation::{Iteration, Relation};
use crate::error::{Error, Result};

pub type Node = Vec<i64>;

/// A prefix-closed set of tuples; the empty set is the empty tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TreeJson", into = "TreeJson")]
pub struct FiniteTree {
    nodes: BTreeSet<Node>,
}

#[derive(Serialize, Deserialize)]
struct TreeJson {
    nodes: Vec<Node>,
}

impl TryFrom<TreeJson> for FiniteTree {
    type Error = Error;
    fn try_from(j: TreeJson) -> Result<Self> {
        FiniteTree::new(j.nodes)
    }
}

impl From<FiniteTree> for TreeJson {
    fn from(t: FiniteTree) -> Self {
        TreeJson { nodes: t.nodes.into_iter().collect() }
    }
}

impl FiniteTree {
    pub fn new(nodes: impl IntoIterator<Item = Node>) -> Result<Self> {
        let nodes: BTreeSet<Node> = nodes.into_iter().collect();
        for n in &nodes {
            if !n.is_empty() && !nodes.contains(&n[..n.len() - 1]) {
                return Err(Error::Precondition(format!("tree is not closed under initial segments at {n:?}")));
            }
        }
        if !nodes.is_empty() && !nodes.contains(&vec![]) {
            return Err(Error::Precondition("nonempty tree without a root".into()));
        }
        Ok(FiniteTree { nodes })
    }

    pub fn empty() -> Self {
        FiniteTree { nodes: BTreeSet::new() }
    }

    /// Root plus a single path of the given depth.
    pub fn chain(depth: usize) -> Self {
        FiniteTree { nodes: (0..=depth).map(|k| vec![0; k]).collect() }
    }

    pub fn nodes(&self) -> &BTreeSet<Node> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, n: &[i64]) -> bool {
        self.nodes.contains(n)
    }

    pub fn children(&self, n: &[i64]) -> Vec<Node> {
        self.nodes.iter().filter(|m| m.len() == n.len() + 1 && m.starts_with(n)).cloned().collect()
    }

    /// Integers used as moves anywhere in the tree.
    pub fn alphabet(&self) -> BTreeSet<i64> {
        self.nodes.iter().filter_map(|n| n.last().copied()).collect()
    }

    /// `≺_T`: `a ≺ b` when `b` is a proper initial segment of `a`.
    pub fn relation(&self) -> (Vec<Node>, Relation) {
        let list: Vec<Node> = self.nodes.iter().cloned().collect();
        let index: BTreeMap<&Node, usize> = list.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut pairs = Vec::new();
        for (i, n) in list.iter().enumerate() {
            for k in 0..n.len() {
                pairs.push((i, index[&n[..k].to_vec()]));
            }
        }
        let size = list.len();
        (list, Relation::new(size, pairs))
    }

    /// `ρ(T)`: the number of derivative steps that empty the tree.
    pub fn rank(&self) -> u64 {
        match self.relation().1.iterate() {
            Iteration::WellFounded(k) => k as u64,
            Iteration::IllFounded(_) => unreachable!("finite trees are well-founded"),
        }
    }

    /// Rank of each node under `≺_T` (leaves have rank 0).
    pub fn node_ranks(&self) -> BTreeMap<Node, u64> {
        let mut out = BTreeMap::new();
        for n in self.nodes.iter().rev() {
            let r = self.children(n).iter().map(|c| out[c] + 1).max().unwrap_or(0);
            out.insert(n.clone(), r);
        }
        out
    }

    /// A random tree with `size` nodes; child labels are small integers.
    pub fn random<R: Rng>(rng: &mut R, size: usize) -> Self {
        if size == 0 {
            return Self::empty();
        }
        let mut list: Vec<Node> = vec![vec![]];
        let mut nodes: BTreeSet<Node> = list.iter().cloned().collect();
        while nodes.len() < size {
            let parent = list[rng.gen_range(0..list.len())].clone();
            let mut child = parent;
            child.push(rng.gen_range(0..4));
            if nodes.insert(child.clone()) {
                list.push(child);
            }
        }
        FiniteTree { nodes }
    }
}

/// Rank by the recursion `ρ(T) = 1 + max ρ(child subtrees)`; an oracle for
/// [`FiniteTree::rank`].
pub fn rank_by_recursion(t: &FiniteTree) -> u64 {
    if t.is_empty() {
        return 0;
    }
    fn height(t: &FiniteTree, n: &[i64]) -> u64 {
        t.children(n).iter().map(|c| 1 + height(t, c)).max().unwrap_or(0)
    }
    height(t, &[]) + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn ranks_of_small_trees() {
        assert_eq!(FiniteTree::empty().rank(), 0);
        assert_eq!(FiniteTree::chain(0).rank(), 1);
        for n in 0..6 {
            assert_eq!(FiniteTree::chain(n).rank(), n as u64 + 1);
        }
    }

    #[test]
    fn rejects_non_trees() {
        assert!(FiniteTree::new(vec![vec![], vec![1, 2]]).is_err());
        assert!(FiniteTree::new(vec![vec![1]]).is_err());
    }

    #[test]
    fn derivative_matches_recursion() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let size = rng.gen_range(1..60);
            let t = FiniteTree::random(&mut rng, size);
            assert_eq!(t.rank(), rank_by_recursion(&t));
            assert_eq!(t.node_ranks()[&vec![]] + 1, t.rank());
        }
    }

    #[test]
    fn json_round_trip() {
        let t: FiniteTree = serde_json::from_str(r#"{"nodes":[[],[0],[0,1]]}"#).unwrap();
        assert_eq!(t.rank(), 3);
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"nodes":[[],[0],[0,1]]}"#);
    }
}
