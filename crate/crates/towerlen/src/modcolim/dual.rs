//! `Ext(−, R)` invariants through the dual tower `Hom(C_n, R)`.

use serde::Serialize;

use super::spec::{ColimSpec, ColimTail};
use crate::error::Result;
use crate::exactlin::Matrix;
use crate::ordinals::Ordinal;
use crate::towers::verdict::{self, LengthBound, LengthReport};
use crate::towers::{Depths, Level, Scope, Tail, Tower, TowerSpec, Tri, Verdict};

/// Levels `Hom(C_n, R) = R^{r_n}` with the transposed transitions as bonds.
pub fn dual_tower(c: &ColimSpec) -> Result<TowerSpec> {
    let ring = c.ring.clone();
    let prefix = |c: &ColimSpec| -> Vec<Level> {
        c.stages.iter().map(|s| Level { dim: s.rank, bond: s.transition.transpose() }).collect()
    };
    Ok(match &c.tail {
        ColimTail::Constant { rank, transition } => {
            TowerSpec { ring, prefix: prefix(c), tail: Tail::Constant { dim: *rank, bond: transition.transpose() } }
        }
        ColimTail::SplitInclusions { start_rank } => {
            TowerSpec { ring, prefix: prefix(c), tail: Tail::Projections { start_dim: *start_rank } }
        }
        ColimTail::StageLimited { top_rank } => TowerSpec::truncated(ring, prefix(c), *top_rank),
        ColimTail::Sum { left, right } => TowerSpec::sum(dual_tower(left)?, dual_tower(right)?),
    })
}

/// The transition of a dual bond, for round trips.
pub fn undual(bond: &Matrix) -> Matrix {
    bond.transpose()
}

fn tri(v: &Verdict) -> Tri {
    match v {
        Verdict::Holds { .. } => Tri::Yes,
        Verdict::Fails { .. } => Tri::No,
        Verdict::Unknown { .. } => Tri::Unknown,
    }
}

/// `Ext(C, R) = 0`: the dual tower is Mittag-Leffler.
pub fn is_projective(c: &ColimSpec, d: &Depths) -> Result<Verdict> {
    let t = Tower::new(&dual_tower(c)?)?;
    verdict::mittag_leffler(&t, d)
}

/// `Hom(C, R) = 0`: the dual tower has no infinite chains.
pub fn coreduced_check(c: &ColimSpec, d: &Depths) -> Result<Verdict> {
    let t = Tower::new(&dual_tower(c)?)?;
    verdict::reduced(&t, d)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtReport {
    pub r_projective_length: LengthBound,
    pub plain: Tri,
    pub coreduced: Tri,
    pub projective: Tri,
    pub scope: Scope,
    pub dual: LengthReport,
}

/// The (plain) `R`-projective length: the length of the reduced dual tower.
pub fn r_projective_length(c: &ColimSpec, max_alpha: &Ordinal, d: &Depths) -> Result<ExtReport> {
    let t = Tower::new(&dual_tower(c)?)?;
    let dual = verdict::ml_length(&t, max_alpha, d)?;
    let projective = tri(&verdict::mittag_leffler(&t, d)?);
    let coreduced = tri(&verdict::reduced(&t, d)?);
    debug_assert_eq!(projective == Tri::Yes, dual.length == LengthBound::Exactly(Ordinal::zero()));
    Ok(ExtReport {
        r_projective_length: dual.length.clone(),
        plain: dual.plain,
        coreduced,
        projective,
        scope: dual.scope,
        dual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::BaseRing;

    #[test]
    fn duals_transpose() {
        let c = ColimSpec::localization(3);
        let t = dual_tower(&c).unwrap();
        assert_eq!(t, TowerSpec::scalar(3));
        let s = dual_tower(&ColimSpec::split_inclusions(BaseRing::integers(), 2)).unwrap();
        assert_eq!(s.tail, Tail::Projections { start_dim: 2 });
        let m = Matrix::from_i64(&[&[1, 2], &[0, 3]]);
        let c = ColimSpec::constant(BaseRing::integers(), m.clone()).unwrap();
        let Tail::Constant { bond, .. } = dual_tower(&c).unwrap().tail else { panic!() };
        assert_eq!(undual(&bond), m);
    }

    #[test]
    fn projectivity() {
        let d = Depths::default();
        assert!(is_projective(&ColimSpec::split_inclusions(BaseRing::integers(), 1), &d).unwrap().holds());
        assert!(is_projective(&ColimSpec::finite(BaseRing::integers(), 2), &d).unwrap().holds());
        assert!(is_projective(&ColimSpec::localization(2), &d).unwrap().fails());
    }

    #[test]
    fn coreducedness() {
        let d = Depths::default();
        assert!(coreduced_check(&ColimSpec::finite(BaseRing::integers(), 1), &d).unwrap().fails());
        assert!(coreduced_check(&ColimSpec::localization(5), &d).unwrap().holds());
    }

    #[test]
    fn lengths() {
        let d = Depths::default();
        let w = Ordinal::omega();
        let r = r_projective_length(&ColimSpec::localization(2), &w, &d).unwrap();
        assert_eq!(r.r_projective_length, LengthBound::Exactly(Ordinal::nat(1)));
        assert_eq!((r.plain, r.projective, r.coreduced), (Tri::Yes, Tri::No, Tri::Yes));
        let r = r_projective_length(&ColimSpec::split_inclusions(BaseRing::integers(), 0), &w, &d).unwrap();
        assert_eq!(r.r_projective_length, LengthBound::Exactly(Ordinal::zero()));
        assert_eq!(r.projective, Tri::Yes);
    }
}
