//! Wedge sums `⊕_{(M₁, ψ_i)} M_i`: the direct sum of `M₁` and the arms with
//! `x ∈ M₁` identified with `ψ_i(x)` in every arm, divided by the pure hull.
//!
//! Stage `n` is `M₁ ⊕ arm₀ ⊕ … ⊕ arm_{n−1}`, every arm at its own stage `n`,
//! modulo the saturated span of the identifications.

use num_bigint::BigInt;
use serde::Serialize;

use super::spec::{ColimSpec, ColimTail, Construction, PAdicDigits, Stage};
use super::xi::{xi_element, xi_module};
use crate::error::{Error, Result};
use crate::exactlin::lattice::saturated_quotient;
use crate::exactlin::{BaseRing, Lattice, Matrix};

#[derive(Clone, Debug, Serialize)]
pub struct WedgePurity {
    /// Whether `ψ_i(M₁)` is pure in arm `i` at every stage up to the top.
    pub psi_pure: Vec<bool>,
    /// Whether `M₁` is pure in the wedge at each stage.
    pub m1_pure: Vec<bool>,
}

fn saturated_span(v: &Matrix, ring: &BaseRing) -> bool {
    v.rows() == 0 || Lattice::from_generators(&v.transpose(), ring).is_saturated()
}

/// The wedge sum known through stage `stages`; arm `i` joins at stage `i + 1`.
pub fn wedge_sum(m1: usize, arms: &[ColimSpec], psi: &[Matrix], stages: usize) -> Result<ColimSpec> {
    wedge_sum_with_purity(m1, arms, psi, stages).map(|(c, _)| c)
}

pub fn wedge_sum_with_purity(m1: usize, arms: &[ColimSpec], psi: &[Matrix], stages: usize) -> Result<(ColimSpec, WedgePurity)> {
    if arms.len() != psi.len() {
        return Err(Error::Shape(format!("{} arms but {} embeddings", arms.len(), psi.len())));
    }
    let ring = arms.first().map_or_else(BaseRing::integers, |a| a.ring.clone());
    for (i, (a, f)) in arms.iter().zip(psi).enumerate() {
        if a.ring != ring {
            return Err(Error::Precondition(format!("arm {i} is over {}, expected {ring}", a.ring)));
        }
        if f.cols() != m1 || f.rows() != a.rank(0)? {
            return Err(Error::Shape(format!("embedding {i} is {}x{}, expected {}x{m1}", f.rows(), f.cols(), a.rank(0)?)));
        }
        if f.rank() != m1 {
            return Err(Error::Precondition(format!("embedding {i} is not injective")));
        }
        if let Some(k) = a.known_stages() {
            if k < stages {
                return Err(Error::Precondition(format!("arm {i} is known only through stage {k}")));
            }
        }
    }
    let count = |n: usize| n.min(arms.len());
    // ψ_i pushed to stage n of arm i.
    let mut pushed: Vec<Matrix> = psi.to_vec();
    let mut psi_pure: Vec<bool> = pushed.iter().map(|f| saturated_span(f, &ring)).collect();
    let mut quotients = Vec::new();
    let mut m1_pure = Vec::new();
    for n in 0..=stages {
        let k = count(n);
        let dims: Vec<usize> = (0..k).map(|i| arms[i].rank(n)).collect::<Result<_>>()?;
        let total = m1 + dims.iter().sum::<usize>();
        let mut rel = Matrix::zeros(k * m1, total);
        let mut off = m1;
        for i in 0..k {
            for j in 0..m1 {
                rel.set(i * m1 + j, j, BigInt::from(1));
                for r in 0..dims[i] {
                    rel.set(i * m1 + j, off + r, -pushed[i].get(r, j).clone());
                }
            }
            off += dims[i];
        }
        let sat = Lattice::from_generators(&rel, &ring).saturate();
        let sq = saturated_quotient(&sat)?;
        m1_pure.push(saturated_span(&sq.q.submatrix(0..sq.q.rows(), 0..m1), &ring));
        quotients.push((sq, dims, total));
        if n < stages {
            for (i, f) in pushed.iter_mut().enumerate() {
                *f = arms[i].transition(n)?.mul(f)?;
                psi_pure[i] &= saturated_span(f, &ring);
            }
        }
    }
    let mut st = Vec::new();
    for n in 0..stages {
        let (sq, dims, total) = &quotients[n];
        let (next, ndims, ntotal) = &quotients[n + 1];
        let mut e = Matrix::zeros(*ntotal, *total);
        e.put_block(0, 0, &Matrix::identity(m1));
        let (mut r0, mut c0) = (m1, m1);
        for (i, d) in dims.iter().enumerate() {
            e.put_block(r0, c0, &arms[i].transition(n)?);
            r0 += ndims[i];
            c0 += d;
        }
        let t = next.q.mul(&e)?.mul(&sq.s)?;
        st.push(Stage { rank: sq.q.rows(), transition: t });
    }
    let top = quotients[stages].0.q.rows();
    let construction = arms
        .iter()
        .map(|a| a.construction.clone())
        .collect::<Option<Vec<_>>>()
        .map(|arms| Construction::Wedge { arms });
    let c = ColimSpec::new(ring, st, ColimTail::StageLimited { top_rank: top }, construction)?;
    Ok((c, WedgePurity { psi_pure, m1_pure }))
}

/// `M₁ = R` wedged with copies of `Ξ(τ)` along `1 ↦ p^i e`.
pub fn gap_module(d: &PAdicDigits, stages: usize) -> Result<ColimSpec> {
    let xi = xi_module(d, stages)?;
    let e = xi_element(d, 0);
    let p = BigInt::from(d.p);
    let arms = vec![xi; stages];
    let psi = (0..stages)
        .map(|i| {
            let s = p.pow(i as u32);
            Matrix::from_rows(e.iter().map(|x| vec![x * &s]).collect(), 1)
        })
        .collect::<Result<Vec<_>>>()?;
    wedge_sum(1, &arms, &psi, stages)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modcolim::dual::{coreduced_check, is_projective, r_projective_length};
    use crate::modcolim::spec::tree_length_certificate;
    use crate::ordinals::Ordinal;
    use crate::towers::verdict::LengthBound;
    use crate::towers::{Depths, Tri};

    #[test]
    fn wedge_of_integers_is_projective() {
        let z = BaseRing::integers();
        let arms = vec![ColimSpec::finite(z.clone(), 1); 6];
        let psi = vec![Matrix::identity(1); 6];
        let (w, pur) = wedge_sum_with_purity(1, &arms, &psi, 6).unwrap();
        assert!((0..=6).all(|n| w.rank(n).unwrap() == 1));
        assert!(pur.psi_pure.iter().all(|&x| x) && pur.m1_pure.iter().all(|&x| x));
        assert!(is_projective(&w, &Depths::default()).unwrap().holds());
        assert_eq!(tree_length_certificate(&w).unwrap(), Ordinal::nat(1));
    }

    #[test]
    fn single_arm() {
        let arm = ColimSpec::localization(2);
        let w = wedge_sum(1, std::slice::from_ref(&arm), &[Matrix::identity(1)], 5).unwrap();
        for n in 1..5 {
            assert_eq!(w.rank(n).unwrap(), 1);
            assert_eq!(w.transition(n).unwrap().get(0, 0).magnitude(), &2u32.into());
        }
    }

    #[test]
    fn gap_module_lengths() {
        let d = PAdicDigits::random(3, 64, 5).unwrap();
        let m = gap_module(&d, 32).unwrap();
        assert_eq!(m.rank(5).unwrap(), 6);
        assert_eq!(tree_length_certificate(&m).unwrap(), Ordinal::nat(2));
        let depths = Depths::default();
        assert!(coreduced_check(&m, &depths).unwrap().holds());
        let r = r_projective_length(&m, &Ordinal::omega(), &depths).unwrap();
        assert_eq!(r.r_projective_length, LengthBound::Exactly(Ordinal::nat(1)));
        assert_eq!(r.plain, Tri::No);
    }
}
