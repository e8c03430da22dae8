//! Infinite image intersections `⋂ₖ Mᵏ(ℤ^d)` and `⋂ₖ f(Mᵏ ℤ^d)`.
//!
//! The eventual image is the lattice of points of the generalized eigenspace
//! belonging to the irreducible factors `h` of the characteristic polynomial
//! with `h(0)` a unit of the ring. Every output is certified by `M·S = S`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use super::lattice::{kernel, Lattice};
use super::matrix::Matrix;
use super::poly::{charpoly, eval_matrix, irreducible_factors, mul, Poly};
use super::ring::BaseRing;
use crate::error::{Error, Result};

/// `⋂ₖ image(mᵏ)` over the ring.
pub fn eventual_image(m: &Matrix, ring: &BaseRing) -> Result<Lattice> {
    if !m.is_square() {
        return Err(Error::Shape(format!("eventual image of a {}x{} matrix", m.rows(), m.cols())));
    }
    let d = m.rows();
    if d == 0 {
        return Ok(Lattice::zero(0));
    }
    if ring.is_unit(&m.det()?) {
        return Ok(Lattice::full(d));
    }
    let g: Poly = irreducible_factors(&charpoly(m))
        .into_iter()
        .filter(|h| ring.is_unit(&h[0]))
        .fold(vec![BigInt::one()], |acc, h| mul(&acc, &h));
    if g.len() == 1 {
        return Ok(Lattice::zero(d));
    }
    let gm = eval_matrix(&g, m);
    let mut k = kernel(&gm);
    loop {
        let next = k.preimage(&gm, ring)?;
        if next == k {
            break;
        }
        k = next;
    }
    if k.image(m, ring)? != k {
        return Err(Error::Inexact("eventual image failed its m·S = S certificate".into()));
    }
    Ok(k)
}

/// `image(mᵏ)` for `k = 0..=depth` over the ring; used as a brute-force oracle.
pub fn image_chain(m: &Matrix, ring: &BaseRing, depth: usize) -> Vec<Lattice> {
    let mut out = vec![Lattice::full(m.rows())];
    for _ in 0..depth {
        let next = out.last().unwrap().image(m, ring).expect("square matrix");
        out.push(next);
    }
    out
}

/// The outcome of `⋂ₖ f(mᵏ ℤ^d)`.
#[derive(Clone, Debug, Serialize)]
pub struct StableImage {
    /// Exact value when `exact`, otherwise the smallest computed upper bound.
    pub lattice: Lattice,
    /// A certified sublattice of the true intersection.
    pub lower: Lattice,
    pub exact: bool,
    pub bad_primes: Vec<String>,
    /// Number of refinement rounds used for the upper bound.
    pub precision: usize,
}

/// `⋂ₖ f(mᵏ ℤ^d)` for square `m` (`d × d`) and `f : ℤ^d → ℤ^e`.
///
/// Writing `K = ker f`, the intersection is `f(⋂ₖ (mᵏℤ^d + K))`. Away from the
/// primes dividing the determinant of `m` on its stable image the chain is
/// constant from `k = d` on; at each such prime `ℓ` the limit contains the
/// `ℓ`-local eventual image plus `K`. That gives a certified lower bound. The
/// bound is exact when every such local eventual image has as many
/// dimensions as there are `ℓ`-adic unit roots; otherwise the chain gives
/// upper bounds, and equality with the lower bound certifies the answer.
pub fn stable_image_intersection(f: &Matrix, m: &Matrix, ring: &BaseRing, max_rounds: usize) -> Result<StableImage> {
    if !m.is_square() || f.cols() != m.rows() {
        return Err(Error::Shape("stable image needs square m and f with matching columns".into()));
    }
    let d = m.rows();
    let kf = kernel(f);
    let md = m.pow(d as u64);
    let p_lat = Lattice::full(d).image(&md, ring)?;
    let zd = p_lat.sum(&kf, ring)?;
    let mk = |l: &Lattice| -> Result<Lattice> { l.image(f, ring) };
    if p_lat.is_zero() {
        let y = mk(&zd)?;
        return Ok(StableImage { lattice: y.clone(), lower: y, exact: true, bad_primes: vec![], precision: 0 });
    }
    let b = p_lat.basis().clone();
    let r = b.rows();
    let moved = b.mul_unchecked(&m.transpose());
    let c_rows = Lattice::coords_rows(&p_lat, &moved)?;
    // Column action of m on coordinates with respect to the basis rows of P.
    let c = c_rows.transpose();
    let det = c.det()?;
    let bad = ring.non_unit_primes(&det);
    let chi = charpoly(&c);
    let mut lower = zd.clone();
    let mut rational = true;
    for l in &bad {
        let local = BaseRing::local_at(u64::try_from(l).map_err(|_| Error::Precondition(format!("prime {l} too large")))?)?;
        let e = eventual_image(&c, &local)?;
        rational &= e.rank() == unit_root_count(&chi, l);
        let mut gens = if e.is_zero() { Matrix::zeros(0, d) } else { e.basis().mul_unchecked(&b) };
        if !kf.is_zero() {
            gens = gens.vstack(kf.basis())?;
        }
        let loc = if gens.rows() == 0 { Lattice::zero(d) } else { Lattice::from_generators(&gens, &local) };
        lower = lower.intersection(&loc, &BaseRing::integers())?;
    }
    let y_low = mk(&lower)?;
    let mut y_high = mk(&zd)?;
    if bad.is_empty() || rational || y_high == y_low {
        return Ok(StableImage { lattice: y_low.clone(), lower: y_low, exact: true, bad_primes: names(&bad), precision: 0 });
    }
    let step = m.pow(r as u64);
    let mut cur = md;
    for round in 1..=max_rounds {
        cur = step.mul_unchecked(&cur);
        let z = Lattice::full(d).image(&cur, ring)?.sum(&kf, ring)?;
        y_high = mk(&z)?;
        if y_high == y_low {
            return Ok(StableImage { lattice: y_low.clone(), lower: y_low, exact: true, bad_primes: names(&bad), precision: round });
        }
    }
    Ok(StableImage { lattice: y_high, lower: y_low, exact: false, bad_primes: names(&bad), precision: max_rounds })
}

/// Number of roots of a monic `chi` that are `ℓ`-adic units, read off the
/// Newton polygon: `deg chi − min{i : ℓ ∤ aᵢ}`.
pub fn unit_root_count(chi: &Poly, l: &BigInt) -> usize {
    let n = chi.len() - 1;
    let i0 = chi.iter().position(|a| !a.is_multiple_of(l)).unwrap_or(n);
    n - i0
}

fn names(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

impl Lattice {
    /// Coordinates of the rows of `vs` in the basis of `self`.
    pub(crate) fn coords_rows(&self, vs: &Matrix) -> Result<Matrix> {
        let mut rows = Vec::with_capacity(vs.rows());
        for i in 0..vs.rows() {
            let c = super::hnf::coordinates(self.basis(), vs.row(i))
                .ok_or_else(|| Error::Precondition("vector outside lattice".into()))?;
            rows.push(c);
        }
        Matrix::from_rows(rows, self.rank())
    }
}

/// True when `m·S = S` over the ring.
pub fn is_stable(m: &Matrix, s: &Lattice, ring: &BaseRing) -> bool {
    s.image(m, ring).map(|x| x == *s).unwrap_or(false)
}

/// Largest rank reached by `image(mᵏ)` over ℚ for large `k`.
pub fn rational_eventual_rank(m: &Matrix) -> usize {
    let d = m.rows();
    if d == 0 {
        return 0;
    }
    m.pow(d as u64).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::lattice::span_i64;

    fn z() -> BaseRing {
        BaseRing::integers()
    }

    #[test]
    fn worked_examples() {
        let m = Matrix::from_i64(&[&[2, 0], &[0, 1]]);
        assert_eq!(eventual_image(&m, &z()).unwrap(), span_i64(&[&[0, 1]]));
        let u = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(eventual_image(&u, &z()).unwrap(), Lattice::full(2));
        let two = Matrix::from_i64(&[&[2]]);
        let r = BaseRing::inverting(&[2]).unwrap();
        assert_eq!(eventual_image(&two, &r).unwrap(), Lattice::full(1));
        assert_eq!(eventual_image(&two, &z()).unwrap(), Lattice::zero(1));
    }

    #[test]
    fn irrational_unit_root_gives_zero() {
        // x^2 + x + 2: one 2-adic unit root, but no rational invariant line.
        let m = Matrix::from_i64(&[&[0, -2], &[1, -1]]);
        assert_eq!(eventual_image(&m, &z()).unwrap(), Lattice::zero(2));
    }

    #[test]
    fn matches_chain_oracle_when_it_stabilizes() {
        let m = Matrix::from_i64(&[&[1, 1, 0], &[0, 2, 0], &[0, 0, 0]]);
        let chain = image_chain(&m, &z(), 40);
        let s = eventual_image(&m, &z()).unwrap();
        assert!(is_stable(&m, &s, &z()));
        assert!(chain.iter().all(|c| s.is_subset(c)));
        assert_eq!(s, span_i64(&[&[1, 0, 0]]));
    }

    #[test]
    fn stable_image_through_non_injective_map() {
        // f = [1 1] after diag(2,3): f(Mᵏℤ²) = 2ᵏℤ + 3ᵏℤ = ℤ for every k.
        let f = Matrix::from_i64(&[&[1, 1]]);
        let m = Matrix::from_i64(&[&[2, 0], &[0, 3]]);
        let s = stable_image_intersection(&f, &m, &z(), 6).unwrap();
        assert!(s.exact);
        assert_eq!(s.lattice, Lattice::full(1));
        let g = Matrix::from_i64(&[&[1, 0]]);
        let s = stable_image_intersection(&g, &m, &z(), 6).unwrap();
        assert!(s.exact);
        assert!(s.lattice.is_zero());
    }

    #[test]
    fn stable_image_identity_map_is_eventual_image() {
        let m = Matrix::from_i64(&[&[2, 1], &[0, 1]]);
        let s = stable_image_intersection(&Matrix::identity(2), &m, &z(), 6).unwrap();
        assert!(s.exact);
        assert_eq!(s.lattice, eventual_image(&m, &z()).unwrap());
    }
}
