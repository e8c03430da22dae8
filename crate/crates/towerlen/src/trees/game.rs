//! Game ranks for closed payoff sets given by a finite tree.
//!
//! Bob wins a run while it stays in `T`; a position outside `T` is a win for
//! Alice. Moves range over the integers used in `T` plus one escape symbol
//! standing for every other element of the alphabet.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::finite::{FiniteTree, Node};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSpec {
    pub tree: FiniteTree,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameRanks {
    /// `σ_A(x)` for `x ∈ T`; positions outside `T` have rank 0.
    pub sigma: BTreeMap<String, u64>,
    pub pi: BTreeMap<String, u64>,
    /// `ρ(G_A)`, the least `α` with `π_A(∅) ≤ α`.
    pub rank: u64,
}

/// Moves available at a position: the tree's labels plus the escape move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Label(i64),
    Escape,
}

impl GameSpec {
    pub fn new(tree: FiniteTree) -> Self {
        GameSpec { tree }
    }

    pub fn moves(&self) -> Vec<Move> {
        let mut v: Vec<Move> = self.tree.alphabet().into_iter().map(Move::Label).collect();
        v.push(Move::Escape);
        v
    }

    fn is_alice_win(&self, x: Option<&Node>) -> bool {
        x.is_none_or(|n| !self.tree.contains(n))
    }

    /// Runs the mutual recursion on every position of `T`.
    pub fn ranks(&self) -> GameRanks {
        let moves = self.moves();
        let mut sigma: BTreeMap<Node, u64> = BTreeMap::new();
        let mut pi: BTreeMap<Node, u64> = BTreeMap::new();
        // Longer tuples first, so every successor position is already ranked.
        let mut order: Vec<&Node> = self.tree.nodes().iter().collect();
        order.sort_by_key(|n| std::cmp::Reverse(n.len()));
        for x in order {
            let succ = |m: &Move| -> Option<Node> {
                match m {
                    Move::Escape => None,
                    Move::Label(z) => {
                        let mut y = x.clone();
                        y.push(*z);
                        Some(y)
                    }
                }
            };
            let rank_at = |table: &BTreeMap<Node, u64>, y: &Option<Node>| -> u64 {
                if self.is_alice_win(y.as_ref()) {
                    0
                } else {
                    table[y.as_ref().unwrap()]
                }
            };
            // σ(x) ≤ α ⇔ some move z has π(x,z) < α.
            let s = moves.iter().map(|m| rank_at(&pi, &succ(m)) + 1).min().unwrap();
            // π(x) ≤ α ⇔ every move z has σ(x,z) < α.
            let p = moves.iter().map(|m| rank_at(&sigma, &succ(m)) + 1).max().unwrap();
            sigma.insert(x.clone(), s);
            pi.insert(x.clone(), p);
        }
        let rank = pi.get(&vec![]).copied().unwrap_or(0);
        GameRanks { sigma: stringify(sigma), pi: stringify(pi), rank }
    }
}

fn stringify(m: BTreeMap<Node, u64>) -> BTreeMap<String, u64> {
    m.into_iter().map(|(k, v)| (format!("{k:?}"), v)).collect()
}

/// One comparison of `ρ(G_A) ≤ α` against `ρ(T) ≤ α`.
#[derive(Clone, Debug, Serialize)]
pub struct Disagreement {
    pub alpha: u64,
    pub game_rank: u64,
    pub tree_rank: u64,
}

/// The values of `α ≤ max_alpha` at which the two sides disagree.
pub fn equivalence_failures(t: &FiniteTree, max_alpha: u64) -> Vec<Disagreement> {
    let g = GameSpec::new(t.clone()).ranks().rank;
    let r = t.rank();
    (0..=max_alpha)
        .filter(|&a| (g <= a) != (r <= a))
        .map(|alpha| Disagreement { alpha, game_rank: g, tree_rank: r })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_payoff_is_immediate() {
        let r = GameSpec::new(FiniteTree::empty()).ranks();
        assert_eq!(r.rank, 0);
        assert!(r.sigma.is_empty());
    }

    #[test]
    fn escape_caps_game_rank() {
        assert_eq!(GameSpec::new(FiniteTree::chain(0)).ranks().rank, 1);
        for n in 1..6 {
            let t = FiniteTree::chain(n);
            let r = GameSpec::new(t.clone()).ranks();
            assert_eq!(r.rank, 2);
            assert!(r.sigma.values().all(|&s| s == 1));
            assert!(r.rank <= t.rank());
        }
    }

    #[test]
    fn one_direction_always_holds() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let t = FiniteTree::random(&mut rng, 40);
            for d in equivalence_failures(&t, 10) {
                // Only "ρ(G) ≤ α but ρ(T) > α" can occur.
                assert!(d.game_rank <= d.alpha && d.tree_rank > d.alpha);
            }
        }
    }
}
