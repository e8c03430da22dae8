//! The index trees `I_α` and `I_α^plain`, materialized lazily.
//!
//! A node of `I_α^plain` is addressed by the path `[n₀, …, n_k]` of child
//! indices from the root. The node reached is the root of a copy of
//! `I_β^plain` and carries the label `β − 1`, where `β₀ = α` and
//! `β_{j+1} = (β_j − 1)_{n_j}`. Nodes of the forest `I_α` are addressed as
//! `[n, rest…]`: `rest` is a node of `I_{α_n}^plain`.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinals::Ordinal;

pub type Address = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexTree {
    pub alpha: Ordinal,
    pub plain: bool,
}

/// Side of the `σ_γ / ∂_γ` partition a node falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Sigma,
    Partial,
}

impl IndexTree {
    pub fn new(alpha: Ordinal, plain: bool) -> Result<Self> {
        if alpha.is_zero() {
            return Err(Error::Precondition("index trees start at alpha = 1".into()));
        }
        if plain && !alpha.is_successor() {
            return Err(Error::Precondition(format!("I_alpha^plain needs a successor alpha, got {alpha}")));
        }
        Ok(IndexTree { alpha, plain })
    }

    /// The `β` such that the node at `addr` roots a copy of `I_β^plain`.
    pub fn node_type(&self, addr: &[u64]) -> Result<Ordinal> {
        let (mut beta, rest) = if self.plain {
            (self.alpha.clone(), addr)
        } else {
            let (&n, rest) = addr.split_first().ok_or_else(|| Error::Precondition("a forest has no root node".into()))?;
            (self.alpha.fundamental(n), rest)
        };
        for &n in rest {
            beta = child_type(&beta, n).ok_or_else(|| Error::Precondition(format!("no node at address {addr:?}")))?;
        }
        Ok(beta)
    }

    /// `β − 1`, which is also the rank of the node in the tree order.
    pub fn label(&self, addr: &[u64]) -> Result<Ordinal> {
        Ok(self.node_type(addr)?.pred().expect("node types are successors"))
    }

    pub fn is_terminal(&self, addr: &[u64]) -> Result<bool> {
        Ok(self.node_type(addr)? == Ordinal::nat(1))
    }

    /// The first `breadth` children of a node (all nodes have either no
    /// children or infinitely many).
    pub fn children(&self, addr: &[u64], breadth: u64) -> Result<Vec<Address>> {
        let beta = self.node_type(addr)?;
        if beta == Ordinal::nat(1) {
            return Ok(vec![]);
        }
        Ok((0..breadth)
            .map(|n| {
                let mut a = addr.to_vec();
                a.push(n);
                a
            })
            .collect())
    }

    /// Nodes down to `depth` levels with `breadth` children each, in the
    /// canonical linear order.
    pub fn materialize(&self, breadth: u64, depth: usize) -> Result<Vec<(Address, Ordinal)>> {
        let mut out = Vec::new();
        let starts: Vec<Address> = if self.plain { vec![vec![]] } else { (0..breadth).map(|n| vec![n]).collect() };
        fn walk(t: &IndexTree, a: Address, breadth: u64, depth: usize, out: &mut Vec<(Address, Ordinal)>) -> Result<()> {
            if depth > 0 {
                for c in t.children(&a, breadth)? {
                    walk(t, c, breadth, depth - 1, out)?;
                }
            }
            let l = t.label(&a)?;
            out.push((a, l));
            Ok(())
        }
        for s in starts {
            walk(self, s, breadth, depth, &mut out)?;
        }
        Ok(out)
    }

    /// `ρ` computed by the recursion on `α`.
    pub fn rank(&self) -> Result<Ordinal> {
        let mut memo = HashMap::new();
        if self.plain {
            plain_rank(&self.alpha, &mut memo)
        } else if self.alpha.is_limit() {
            let seq = (0..4).map(|n| plain_rank(&self.alpha.fundamental(n), &mut memo)).collect::<Result<Vec<_>>>()?;
            Ordinal::limit_of(&seq).ok_or_else(|| Error::Inexact("ranks of the components do not form a fundamental sequence".into()))
        } else {
            plain_rank(&self.alpha, &mut memo)
        }
    }

    /// Position of a node in the canonical linear order of `I_α^plain`,
    /// as an ordinal `≤ ω^{α−1}`. Needs a finite `α`.
    pub fn linearize(&self, addr: &[u64]) -> Result<Ordinal> {
        if !self.plain {
            return Err(Error::Precondition("linearization is defined on plain index trees".into()));
        }
        let a = self.alpha.as_nat().ok_or_else(|| Error::Precondition("linearization labels need a finite alpha".into()))?;
        if a > u64::from(crate::ordinals::DEFAULT_EXPONENT_CAP) {
            return Err(Error::Precondition(format!("w^{} exceeds the ordinal cap", a - 1)));
        }
        let mut beta = a;
        let mut offset = Ordinal::zero();
        for &n in addr {
            if beta < 2 {
                return Err(Error::Precondition(format!("no node at address {addr:?}")));
            }
            offset = offset.add(&Ordinal::term((beta - 2) as u32, n));
            beta -= 1;
        }
        Ok(offset.add(&Ordinal::omega_pow((beta - 1) as u32)))
    }

    /// Which side of the `σ_γ / ∂_γ` partition the node lies on.
    pub fn part(&self, gamma: &Ordinal, addr: &[u64]) -> Result<Part> {
        let (mut beta, rest) = if self.plain {
            (self.alpha.clone(), addr)
        } else {
            if self.alpha <= *gamma {
                self.node_type(addr)?;
                return Ok(Part::Sigma);
            }
            let (&n, rest) = addr.split_first().ok_or_else(|| Error::Precondition("a forest has no root node".into()))?;
            (self.alpha.fundamental(n), rest)
        };
        let mut i = 0;
        loop {
            // Every node of I_β^plain with β ≤ γ lies in σ_γ.
            if beta <= *gamma {
                self.node_type(addr)?;
                return Ok(Part::Sigma);
            }
            if i == rest.len() {
                return Ok(Part::Partial);
            }
            beta = child_type(&beta, rest[i]).ok_or_else(|| Error::Precondition(format!("no node at address {addr:?}")))?;
            i += 1;
        }
    }
}

fn child_type(beta: &Ordinal, n: u64) -> Option<Ordinal> {
    let c = beta.pred()?;
    if c.is_zero() {
        return None;
    }
    Some(c.fundamental(n))
}

fn plain_rank(beta: &Ordinal, memo: &mut HashMap<Ordinal, Ordinal>) -> Result<Ordinal> {
    if let Some(r) = memo.get(beta) {
        return Ok(r.clone());
    }
    let c = beta.pred().ok_or_else(|| Error::Precondition(format!("{beta} is not a successor")))?;
    let r = if c.is_zero() {
        Ordinal::nat(1)
    } else if c.is_limit() {
        let seq = (0..4).map(|n| plain_rank(&c.fundamental(n), memo)).collect::<Result<Vec<_>>>()?;
        Ordinal::limit_of(&seq)
            .ok_or_else(|| Error::Inexact("child ranks do not form a fundamental sequence".into()))?
            .succ()
    } else {
        plain_rank(&c, memo)?.succ()
    };
    memo.insert(beta.clone(), r.clone());
    Ok(r)
}

/// The canonical linear order: lexicographic on addresses, except that a
/// node lies below all of its ancestors.
pub fn order_cmp(a: &[u64], b: &[u64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x.cmp(y);
        }
    }
    b.len().cmp(&a.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn small_trees() {
        let t1 = IndexTree::new(o("1"), true).unwrap();
        assert!(t1.children(&[], 5).unwrap().is_empty());
        assert_eq!(t1.rank().unwrap(), o("1"));
        let t2 = IndexTree::new(o("2"), true).unwrap();
        let kids = t2.children(&[], 5).unwrap();
        assert_eq!(kids.len(), 5);
        assert!(kids.iter().all(|k| t2.is_terminal(k).unwrap()));
    }

    #[test]
    fn structural_ranks() {
        for s in ["1", "2", "3", "w+1", "w*2+1", "w^2+1", "w^2+w+3"] {
            assert_eq!(IndexTree::new(o(s), true).unwrap().rank().unwrap(), o(s), "{s}");
        }
        for s in ["w", "w*3", "w^2", "5"] {
            assert_eq!(IndexTree::new(o(s), false).unwrap().rank().unwrap(), o(s), "{s}");
        }
    }

    #[test]
    fn linearize_i2() {
        let t = IndexTree::new(o("2"), true).unwrap();
        assert_eq!(t.linearize(&[]).unwrap(), o("w"));
        for n in 0..5 {
            assert_eq!(t.linearize(&[n]).unwrap(), Ordinal::nat(n + 1));
        }
    }

    #[test]
    fn linearize_respects_order() {
        let t = IndexTree::new(o("4"), true).unwrap();
        let nodes = t.materialize(3, 3).unwrap();
        for (a, _) in &nodes {
            for (b, _) in &nodes {
                assert_eq!(order_cmp(a, b), t.linearize(a).unwrap().cmp(&t.linearize(b).unwrap()));
            }
        }
        assert_eq!(t.linearize(&[]).unwrap(), o("w^3"));
    }

    #[test]
    fn partition_by_rank() {
        let t = IndexTree::new(o("w+2"), true).unwrap();
        for g in ["0", "1", "3", "w", "w+1"] {
            let gamma = o(g);
            for (a, label) in t.materialize(3, 3).unwrap() {
                let expect = if label >= gamma { Part::Partial } else { Part::Sigma };
                assert_eq!(t.part(&gamma, &a).unwrap(), expect, "gamma {g} node {a:?}");
            }
        }
    }

    #[test]
    fn plain_needs_successor() {
        assert!(IndexTree::new(o("w"), true).is_err());
        assert!(IndexTree::new(o("0"), false).is_err());
    }
}
