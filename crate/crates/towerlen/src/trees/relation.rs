//! Derivatives and ranks of finite binary relations.

use std::collections::BTreeSet;

/// A binary relation `a ≺ b` on the carrier `0..size`.
#[derive(Clone, Debug, Default)]
pub struct Relation {
    pub size: usize,
    pub pairs: Vec<(usize, usize)>,
}

/// Outcome of iterating the derivative from the whole carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Iteration {
    /// Emptied after this many steps: the rank of the relation.
    WellFounded(usize),
    /// Reached a nonempty fixed point.
    IllFounded(BTreeSet<usize>),
}

impl Relation {
    pub fn new(size: usize, pairs: Vec<(usize, usize)>) -> Self {
        Relation { size, pairs }
    }

    /// `D(A) = {y : ∃ a ∈ A, a ≺ y}`.
    pub fn derivative(&self, a: &BTreeSet<usize>) -> BTreeSet<usize> {
        self.pairs.iter().filter(|(x, _)| a.contains(x)).map(|&(_, y)| y).collect()
    }

    pub fn iterate(&self) -> Iteration {
        let mut cur: BTreeSet<usize> = (0..self.size).collect();
        let mut steps = 0;
        while !cur.is_empty() {
            let next = self.derivative(&cur);
            if next == cur {
                return Iteration::IllFounded(cur);
            }
            cur = next;
            steps += 1;
        }
        Iteration::WellFounded(steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_derivative() {
        let r = Relation::new(3, vec![(0, 1), (0, 2), (1, 2)]);
        let all: BTreeSet<usize> = (0..3).collect();
        assert_eq!(r.derivative(&all), [1, 2].into_iter().collect());
        assert_eq!(r.iterate(), Iteration::WellFounded(3));
    }

    #[test]
    fn empty_and_cyclic() {
        let e = Relation::new(2, vec![]);
        assert!(e.derivative(&(0..2).collect()).is_empty());
        let c = Relation::new(2, vec![(0, 1), (1, 0)]);
        assert_eq!(c.iterate(), Iteration::IllFounded([0, 1].into_iter().collect()));
    }
}
