//! The rank-two modules `Ξ(τ)` over `ℤ_(p)`.
//!
//! Stage `n` has basis `(f, g_n)` with `g_n = p^{-n}(e − τ_n f)` inside `K ⊕ K`,
//! where `e = (1, 0)` and `f = (0, 1)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::spec::{ColimSpec, ColimTail, Construction, PAdicDigits, Stage};
use crate::error::{Error, Result};
use crate::exactlin::{BaseRing, Lattice, Matrix};

/// `(a, b) ↦ (a + b c_n p, b p)` on `(f, g_n)`-coordinates.
pub fn xi_transition(d: &PAdicDigits, n: usize) -> Matrix {
    let p = BigInt::from(d.p);
    Matrix::from_rows(vec![vec![BigInt::one(), d.carry(n) * &p], vec![BigInt::zero(), p]], 2).expect("2x2")
}

/// `Ξ(τ)` known through stage `stages`.
pub fn xi_module(d: &PAdicDigits, stages: usize) -> Result<ColimSpec> {
    d.validate()?;
    if stages + 1 > d.truncations.len() {
        return Err(Error::Precondition(format!("{stages} stages need {} digits, got {}", stages + 1, d.truncations.len())));
    }
    let ring = BaseRing::local_at(d.p)?;
    let st = (0..stages).map(|n| Stage { rank: 2, transition: xi_transition(d, n) }).collect();
    ColimSpec::new(ring, st, ColimTail::StageLimited { top_rank: 2 }, Some(Construction::Xi { p: d.p }))
}

/// Coordinates of `e = p^n g_n + τ_n f` at stage `n`.
pub fn xi_element(d: &PAdicDigits, n: usize) -> Vec<BigInt> {
    vec![d.truncations[n].clone(), BigInt::from(d.p).pow(n as u32)]
}

/// Stage `n` basis `(f, g_n)` as columns in `(e, f)`-coordinates of `K ⊕ K`.
fn embedding(d: &PAdicDigits, n: usize) -> [[BigRational; 2]; 2] {
    let pn = BigRational::from_integer(BigInt::from(d.p).pow(n as u32));
    let tau = BigRational::from_integer(d.truncations[n].clone());
    let z = BigRational::zero;
    // f = (0, 1), g_n = (p^{-n}, −τ_n p^{-n})
    [[z(), pn.recip()], [BigRational::one(), -tau / pn]]
}

#[derive(Clone, Debug, Serialize)]
pub struct XiCheck {
    pub stage: usize,
    /// `e = p^n g_n + τ_n f` in `K ⊕ K`.
    pub relation: bool,
    /// The transition agrees with both embeddings into `K ⊕ K`.
    pub transition: bool,
    /// `e` is not divisible by `p` at this stage.
    pub well_pointed: bool,
}

/// Checks the defining relation, the transitions and well-pointedness
/// at stages `0..=stages`.
pub fn xi_checks(d: &PAdicDigits, stages: usize) -> Result<Vec<XiCheck>> {
    let c = xi_module(d, stages)?;
    let p = BigInt::from(d.p);
    let mut out = Vec::new();
    for n in 0..=stages {
        let emb = embedding(d, n);
        let e = xi_element(d, n);
        let img: Vec<BigRational> = (0..2)
            .map(|i| {
                (0..2).fold(BigRational::zero(), |acc, j| acc + &emb[i][j] * BigRational::from_integer(e[j].clone()))
            })
            .collect();
        let relation = img == [BigRational::one(), BigRational::zero()];
        let transition = if n < stages {
            let t = c.transition(n)?;
            let next = embedding(d, n + 1);
            (0..2).all(|i| {
                (0..2).all(|j| {
                    let via = (0..2).fold(BigRational::zero(), |acc, k| {
                        acc + &next[i][k] * BigRational::from_integer(t.get(k, j).clone())
                    });
                    via == emb[i][j]
                })
            })
        } else {
            true
        };
        let pc = Lattice::full(2).scaled(&p, &c.ring);
        out.push(XiCheck { stage: n, relation, transition, well_pointed: !pc.contains(&e) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modcolim::dual::{coreduced_check, dual_tower, r_projective_length};
    use crate::ordinals::Ordinal;
    use crate::towers::verdict::LengthBound;
    use crate::towers::{Depths, Tail, Tri};

    #[test]
    fn relation_and_transitions() {
        let d = PAdicDigits::random(3, 64, 1).unwrap();
        let checks = xi_checks(&d, 63).unwrap();
        assert_eq!(checks.len(), 64);
        assert!(checks.iter().all(|c| c.relation && c.transition && c.well_pointed));
        let c = xi_module(&d, 10).unwrap();
        for n in 0..10 {
            assert_eq!(c.transition(n).unwrap().apply(&xi_element(&d, n)), xi_element(&d, n + 1));
        }
        // p g_{n+1} = g_n − c_n p f
        let t = xi_transition(&d, 4);
        let p = BigInt::from(3);
        assert_eq!(t.apply(&[BigInt::zero(), BigInt::one()]), vec![d.carry(4) * &p, p]);
    }

    #[test]
    fn too_few_digits() {
        let d = PAdicDigits::random(3, 8, 1).unwrap();
        assert!(xi_module(&d, 8).is_err());
        assert!(xi_module(&d, 7).is_ok());
    }

    #[test]
    fn dual_bonds() {
        let d = PAdicDigits::random(5, 6, 3).unwrap();
        let t = dual_tower(&xi_module(&d, 5).unwrap()).unwrap();
        let Tail::Truncated { levels, top_dim } = t.tail else { panic!() };
        assert_eq!(top_dim, 2);
        let c = d.carry(2) * BigInt::from(5);
        assert_eq!(levels[2].bond, Matrix::from_rows(vec![vec![1.into(), 0.into()], vec![c, 5.into()]], 2).unwrap());
    }

    #[test]
    fn coreduced_plain_length_one() {
        let d = PAdicDigits::random(3, 64, 11).unwrap();
        let c = xi_module(&d, 63).unwrap();
        let depths = Depths::default();
        assert!(coreduced_check(&c, &depths).unwrap().holds());
        let r = r_projective_length(&c, &Ordinal::omega(), &depths).unwrap();
        assert_eq!(r.r_projective_length, LengthBound::Exactly(Ordinal::nat(1)));
        assert_eq!(r.plain, Tri::Yes);
        assert_eq!(r.projective, Tri::No);
    }
}
