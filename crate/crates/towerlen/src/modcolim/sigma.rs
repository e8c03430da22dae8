//! `σ_α C` and `∂_α C = C / σ_α C` through the derived dual tower `D_α`:
//! `σ_α C ∩ C_n` is the common kernel of the functionals in `D_α⁽ⁿ⁾`.

use serde::Serialize;

use super::dual::{coreduced_check, dual_tower};
use super::spec::{ColimSpec, ColimTail, Stage};
use crate::error::{Error, Result};
use crate::exactlin::height::no_vector_within;
use crate::exactlin::lattice::saturated_quotient;
use crate::exactlin::{kernel, Lattice, Matrix};
use crate::ordinals::{Ordinal, FUNDAMENTAL_RULE};
use crate::towers::{Depths, Exactness, Scope, Tower, Tri};

#[derive(Clone, Debug, Serialize)]
pub struct SigmaLevel {
    pub n: usize,
    pub rank: usize,
    pub derived_rank: usize,
    /// `D_α⁽ⁿ⁾` as used, zero when read as zero.
    pub derived: Lattice,
    /// `σ_α C ∩ C_n`.
    pub sigma: Lattice,
    pub exactness: Exactness,
    /// A stage-limited level without short vectors, read as zero.
    pub read_as_zero: bool,
    /// The dual of `∂_α C` at this stage is the saturation of `D_α⁽ⁿ⁾`.
    pub dual_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaPartial {
    pub alpha: String,
    pub rule: &'static str,
    pub ring: String,
    pub coreduced: Tri,
    pub levels: Vec<SigmaLevel>,
    /// `∂_α C` through the compared depth.
    pub partial: ColimSpec,
    pub injective_transitions: bool,
    pub consistent: Tri,
    pub scope: Scope,
}

pub fn sigma_partial(c: &ColimSpec, alpha: &Ordinal, d: &Depths) -> Result<SigmaPartial> {
    let core = coreduced_check(c, d)?;
    if core.fails() {
        return Err(Error::Precondition(format!("the module is not coreduced: {}", core.summary())));
    }
    let coreduced = if core.holds() { Tri::Yes } else { Tri::Unknown };
    let t = Tower::new(&dual_tower(c)?)?;
    let depth = c.known_stages().map_or(d.depth, |k| k.min(d.depth));
    let h = d.height();
    let mut scope = core.scope().unwrap_or(Scope::ToDepth(depth));
    let mut levels = Vec::new();
    let mut quotients = Vec::new();
    for n in 0..=depth {
        let der = t.derived(alpha, n)?;
        let rank = c.rank(n)?;
        let read_as_zero = matches!(der.exactness, Exactness::ToStage(_)) && no_vector_within(&der.lattice, &h);
        scope = scope.join(match der.exactness {
            Exactness::Exact => Scope::Exact,
            Exactness::ToStage(s) => Scope::ToStage(s),
            Exactness::LowerBoundOnly(k) => Scope::ToDepth(k),
        });
        let dl = if read_as_zero { Lattice::zero(rank) } else { der.lattice.clone() };
        let sigma = if dl.is_zero() { Lattice::full(rank) } else { kernel(dl.basis()) };
        let sq = saturated_quotient(&sigma)?;
        let dual = if sq.q.rows() == 0 { Lattice::zero(rank) } else { Lattice::from_generators(&sq.q, &c.ring) };
        let dual_matches = dual == dl.saturate();
        levels.push(SigmaLevel {
            n,
            rank,
            derived_rank: dl.rank(),
            derived: dl,
            sigma,
            exactness: der.exactness,
            read_as_zero,
            dual_matches,
        });
        quotients.push(sq);
    }
    let mut stages = Vec::new();
    let mut injective = true;
    for n in 0..depth {
        let tr = if quotients[n].q.rows() == 0 || quotients[n + 1].q.rows() == 0 {
            Matrix::zeros(quotients[n + 1].q.rows(), quotients[n].q.rows())
        } else {
            quotients[n + 1].q.mul(&c.transition(n)?)?.mul(&quotients[n].s)?
        };
        injective &= tr.rank() == tr.cols();
        stages.push(Stage { rank: quotients[n].q.rows(), transition: tr });
    }
    let partial = ColimSpec {
        ring: c.ring.clone(),
        stages,
        tail: ColimTail::StageLimited { top_rank: quotients[depth].q.rows() },
        construction: None,
    };
    let all_match = levels.iter().all(|l| l.dual_matches);
    let consistent = match (all_match, coreduced) {
        (false, _) => Tri::No,
        (true, Tri::Yes) => Tri::Yes,
        _ => Tri::Unknown,
    };
    Ok(SigmaPartial {
        alpha: alpha.to_string(),
        rule: FUNDAMENTAL_RULE,
        ring: c.ring.describe(),
        coreduced,
        levels,
        partial,
        injective_transitions: injective,
        consistent,
        scope,
    })
}

/// Checks that the bonds of the dual of `∂_α C`, read in `C_n`-coordinates,
/// carry `sat D_α⁽ⁿ⁺¹⁾` into `sat D_α⁽ⁿ⁾`.
pub fn partial_dual_consistent(sp: &SigmaPartial, c: &ColimSpec) -> Result<bool> {
    for n in 0..sp.levels.len().saturating_sub(1) {
        let pulled = sp.levels[n + 1].derived.saturate().image(&c.transition(n)?.transpose(), &c.ring)?;
        if !pulled.is_subset(&sp.levels[n].derived.saturate()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{BaseRing, Matrix};
    use crate::modcolim::spec::PAdicDigits;
    use crate::modcolim::wedge::gap_module;
    use crate::modcolim::xi::xi_module;

    fn depths() -> Depths {
        Depths { depth: 10, ..Depths::default() }
    }

    #[test]
    fn zero_module() {
        let z = ColimSpec::finite(BaseRing::integers(), 0);
        let s = sigma_partial(&z, &Ordinal::nat(1), &depths()).unwrap();
        assert!(s.levels.iter().all(|l| l.rank == 0 && l.sigma.is_zero()));
    }

    #[test]
    fn rejects_non_coreduced() {
        let z = ColimSpec::finite(BaseRing::integers(), 1);
        assert!(matches!(sigma_partial(&z, &Ordinal::nat(1), &depths()), Err(Error::Precondition(_))));
    }

    #[test]
    fn xi_partial_one_vanishes() {
        let d = PAdicDigits::random(3, 64, 2).unwrap();
        let c = xi_module(&d, 63).unwrap();
        let s = sigma_partial(&c, &Ordinal::nat(1), &depths()).unwrap();
        assert!(s.levels.iter().all(|l| l.sigma.is_full() && l.read_as_zero));
        assert!((0..=10).all(|n| s.partial.rank(n).unwrap() == 0));
        assert_eq!(s.consistent, Tri::Yes);
        let s0 = sigma_partial(&c, &Ordinal::zero(), &depths()).unwrap();
        assert!(s0.levels.iter().all(|l| l.sigma.is_zero()));
        for n in 0..10 {
            assert_eq!(s0.partial.rank(n).unwrap(), 2);
            assert_eq!(s0.partial.transition(n).unwrap().det().unwrap().magnitude(), &3u32.into());
        }
    }

    #[test]
    fn sum_with_gap_module() {
        let d = PAdicDigits::random(3, 64, 4).unwrap();
        let ring = BaseRing::local_at(3).unwrap();
        let loc = ColimSpec::constant(ring, Matrix::from_i64(&[&[3]])).unwrap();
        let c = ColimSpec::direct_sum(loc, gap_module(&d, 32).unwrap()).unwrap();
        for alpha in [Ordinal::zero(), Ordinal::nat(1)] {
            let s = sigma_partial(&c, &alpha, &depths()).unwrap();
            assert_eq!(s.consistent, Tri::Yes, "alpha {alpha}");
            assert!(s.injective_transitions);
            assert!(partial_dual_consistent(&s, &c).unwrap());
        }
    }
}
