//! Truncated phantom resolutions: `P_n^0 C = C_n`, and for successor `α`,
//! `P_n^α C` is the wedge sum over `C_n` of `P_k^{(α−1)_k} C` for `k ≥ n`.

use serde::Serialize;

use super::spec::{tree_length_certificate, ColimSpec};
use super::wedge::wedge_sum_with_purity;
use crate::error::{Error, Result};
use crate::ordinals::{Ordinal, FUNDAMENTAL_RULE};

#[derive(Clone, Debug, Serialize)]
pub struct PhantomLevel {
    pub n: usize,
    pub module: ColimSpec,
    pub top_rank: usize,
    /// Whether `C_n` is pure in each materialized stage of `P_n^α C`.
    pub cn_pure: Vec<bool>,
    pub tree_bound: String,
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhantomReport {
    pub alpha: String,
    pub rule: &'static str,
    pub breadth: usize,
    pub levels: Vec<PhantomLevel>,
}

/// `P_n^α C` with `breadth` arms `k = n, …, n + breadth − 1` at every wedge.
pub fn phantom_module(c: &ColimSpec, alpha: &Ordinal, n: usize, breadth: usize) -> Result<(ColimSpec, Vec<bool>)> {
    if alpha.is_zero() {
        return Ok((ColimSpec::finite(c.ring.clone(), c.rank(n)?), vec![true]));
    }
    let Some(pred) = alpha.pred() else {
        return Err(Error::Precondition(format!("phantom resolutions need a successor ordinal, got {alpha}")));
    };
    if breadth == 0 {
        return Err(Error::Precondition("breadth must be positive".into()));
    }
    let mut arms = Vec::with_capacity(breadth);
    let mut psi = Vec::with_capacity(breadth);
    for k in n..n + breadth {
        let a = if pred.is_limit() { pred.fundamental(k as u64) } else { pred.clone() };
        if a.is_limit() {
            return Err(Error::Precondition(format!("the recursion reaches the limit ordinal {a}")));
        }
        arms.push(phantom_module(c, &a, k, breadth)?.0);
        psi.push(c.compose(n, k)?);
    }
    let (w, pur) = wedge_sum_with_purity(c.rank(n)?, &arms, &psi, breadth)?;
    Ok((w, pur.m1_pure))
}

pub fn phantom_resolution(c: &ColimSpec, alpha: &Ordinal, breadth: usize, depth: usize) -> Result<PhantomReport> {
    let mut levels = Vec::new();
    for n in 0..=depth {
        let (module, cn_pure) = phantom_module(c, alpha, n, breadth)?;
        let bound = tree_length_certificate(&module)?;
        let top_rank = module.rank(module.known_stages().unwrap_or(0))?;
        levels.push(PhantomLevel { n, top_rank, cn_pure, within_bound: bound <= *alpha, tree_bound: bound.to_string(), module });
    }
    Ok(PhantomReport { alpha: alpha.to_string(), rule: FUNDAMENTAL_RULE, breadth, levels })
}
