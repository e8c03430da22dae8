//! Finite descriptions of infinite towers `A⁽⁰⁾ ← A⁽¹⁾ ← …` of free modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{BaseRing, Matrix};

/// One explicit level: its rank and the bond from the next level into it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub dim: usize,
    /// `dim × dim(next)`.
    pub bond: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    #[serde(default)]
    pub ring: BaseRing,
    #[serde(default)]
    pub prefix: Vec<Level>,
    pub tail: Tail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    Zero,
    Constant {
        dim: usize,
        bond: Matrix,
    },
    Sum {
        left: Box<TowerSpec>,
        right: Box<TowerSpec>,
    },
    Shift {
        tower: Box<TowerSpec>,
        by: usize,
    },
    /// Rib `k` is `ribs[k mod ribs.len()]`.
    Fishbone {
        spine: Box<TowerSpec>,
        ribs: Vec<TowerSpec>,
    },
    /// Levels known only up to a stage: `levels` followed by a top level of
    /// rank `top_dim`.
    Truncated {
        levels: Vec<Level>,
        top_dim: usize,
    },
    /// `ℤ^d ← ℤ^{d+1} ← …` by the coordinate projections.
    Projections {
        start_dim: usize,
    },
}

impl TowerSpec {
    pub fn constant(ring: BaseRing, bond: Matrix) -> Self {
        TowerSpec { ring, prefix: vec![], tail: Tail::Constant { dim: bond.rows(), bond } }
    }

    /// The tower `ℤ ←×k− ℤ ←×k− …`.
    pub fn scalar(k: i64) -> Self {
        Self::constant(BaseRing::integers(), Matrix::from_i64(&[&[k]]))
    }

    pub fn zero() -> Self {
        TowerSpec { ring: BaseRing::integers(), prefix: vec![], tail: Tail::Zero }
    }

    pub fn sum(left: TowerSpec, right: TowerSpec) -> Self {
        TowerSpec { ring: left.ring.clone(), prefix: vec![], tail: Tail::Sum { left: Box::new(left), right: Box::new(right) } }
    }

    pub fn shift(tower: TowerSpec, by: usize) -> Self {
        TowerSpec { ring: tower.ring.clone(), prefix: vec![], tail: Tail::Shift { tower: Box::new(tower), by } }
    }

    pub fn fishbone(spine: TowerSpec, ribs: Vec<TowerSpec>) -> Self {
        TowerSpec { ring: spine.ring.clone(), prefix: vec![], tail: Tail::Fishbone { spine: Box::new(spine), ribs } }
    }

    pub fn truncated(ring: BaseRing, levels: Vec<Level>, top_dim: usize) -> Self {
        TowerSpec { ring, prefix: vec![], tail: Tail::Truncated { levels, top_dim } }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("tower: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tower specs serialize")
    }
}
