//! Certified bounds on the shortest nonzero vector of a lattice.
//!
//! For any basis, `λ₁ ≥ min‖bᵢ*‖` over its Gram–Schmidt vectors; an
//! LLL-reduced basis makes this bound useful. Arithmetic is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::jint::JInt;
use super::lattice::Lattice;

#[derive(Clone, Debug, Serialize)]
pub struct HeightBound {
    pub rank: usize,
    /// `⌊min ‖bᵢ*‖²⌋`, a lower bound for `λ₁²`.
    pub lower_sq: JInt,
    /// Squared norm of the shortest reduced basis vector, an upper bound for `λ₁²`.
    pub upper_sq: JInt,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Nearest integer to `a / b` for `b > 0`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

/// Integral LLL state: basis rows, `d_i` (Gram determinants, `d_0 = 1`)
/// and scaled coefficients `λ_{ij} = d_j μ_{ij}`.
struct Lll {
    b: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
    lam: Vec<Vec<BigInt>>,
}

impl Lll {
    fn red(&mut self, k: usize, l: usize) {
        if (&self.lam[k][l] * BigInt::from(2)).abs() <= self.d[l + 1] {
            return;
        }
        let q = round_div(&self.lam[k][l], &self.d[l + 1]);
        let bl = self.b[l].clone();
        for (x, y) in self.b[k].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        self.lam[k][l] -= &q * &self.d[l + 1];
        for i in 0..l {
            let t = &q * &self.lam[l][i];
            self.lam[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k, k - 1);
        for j in 0..k - 1 {
            let t = self.lam[k][j].clone();
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lam = self.lam[k][k - 1].clone();
        let bb = (&self.d[k - 1] * &self.d[k + 1] + &lam * &lam) / &self.d[k];
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            self.lam[i][k] = (&self.d[k + 1] * &self.lam[i][k - 1] - &lam * &t) / &self.d[k];
            self.lam[i][k - 1] = (&bb * &t + &lam * &self.lam[i][k]) / &self.d[k + 1];
        }
        self.d[k] = bb;
    }
}

/// LLL reduction with `δ = 3/4` of linearly independent rows, in exact
/// integer arithmetic. Returns the reduced rows and the Gram determinants
/// `d_0 = 1, d_1, …, d_r`, so that `‖bᵢ*‖² = d_{i+1}/d_i`.
pub fn lll_with_gram(rows: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let n = rows.len();
    let mut st = Lll { b: rows.to_vec(), d: vec![BigInt::one(); n + 1], lam: vec![vec![BigInt::zero(); n]; n] };
    if n == 0 {
        return (st.b, st.d);
    }
    st.d[1] = dot(&st.b[0], &st.b[0]);
    let mut k = 1;
    let mut kmax = 0;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&st.b[k], &st.b[j]);
                for i in 0..j {
                    u = (&st.d[i + 1] * &u - &st.lam[k][i] * &st.lam[j][i]) / &st.d[i];
                }
                if j < k {
                    st.lam[k][j] = u;
                } else {
                    assert!(!u.is_zero(), "lll needs linearly independent rows");
                    st.d[k + 1] = u;
                }
            }
        }
        st.red(k, k - 1);
        let lhs = BigInt::from(4) * &st.d[k + 1] * &st.d[k - 1];
        let rhs = BigInt::from(3) * &st.d[k] * &st.d[k] - BigInt::from(4) * &st.lam[k][k - 1] * &st.lam[k][k - 1];
        if lhs < rhs {
            st.swap(k, kmax);
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                st.red(k, l);
            }
            k += 1;
        }
    }
    (st.b, st.d)
}

/// LLL reduction with `δ = 3/4`; returns the reduced basis rows.
pub fn lll(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    lll_with_gram(rows).0
}

/// Bounds on `λ₁(L)²`; `None` for the zero lattice.
pub fn height_bound(l: &Lattice) -> Option<HeightBound> {
    if l.is_zero() {
        return None;
    }
    let (reduced, d) = lll_with_gram(&l.basis().to_rows());
    let lower = (1..d.len())
        .map(|i| BigRational::new(d[i].clone(), d[i - 1].clone()))
        .min()
        .unwrap()
        .floor()
        .to_integer();
    let upper = reduced.iter().map(|r| dot(r, r)).min().unwrap();
    Some(HeightBound { rank: l.rank(), lower_sq: JInt(lower), upper_sq: JInt(upper) })
}

/// True when `L` has no nonzero vector of Euclidean norm `≤ h`.
pub fn no_vector_within(l: &Lattice, h: &BigInt) -> bool {
    match height_bound(l) {
        None => true,
        Some(b) => b.lower_sq.0 > h * h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::lattice::span_i64;

    #[test]
    fn small_lattices() {
        let l = span_i64(&[&[1, 0], &[0, 1000]]);
        let b = height_bound(&l).unwrap();
        assert_eq!(b.upper_sq.0, BigInt::from(1));
        // {(a, b) : b ≡ 5a mod 101} has minimum 101 > 10^2.
        let l = span_i64(&[&[1, 5], &[0, 101]]);
        let b = height_bound(&l).unwrap();
        assert!(b.lower_sq.0 <= b.upper_sq.0);
        assert!(!no_vector_within(&l, &BigInt::from(11)));
        assert!(no_vector_within(&l, &BigInt::from(4)));
    }

    #[test]
    fn brute_force_agreement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..40 {
            let v: Vec<i64> = (0..9).map(|_| rng.gen_range(-30..=30)).collect();
            let l = span_i64(&[&v[0..3], &v[3..6], &v[6..9]]);
            let Some(b) = height_bound(&l) else { continue };
            let mut best: Option<i64> = None;
            for x in -12i64..=12 {
                for y in -12i64..=12 {
                    for z in -12i64..=12 {
                        let w = [x, y, z].map(BigInt::from);
                        if (x, y, z) != (0, 0, 0) && l.contains(&w) {
                            let s = x * x + y * y + z * z;
                            best = Some(best.map_or(s, |c| c.min(s)));
                        }
                    }
                }
            }
            if let Some(s) = best {
                assert!(b.lower_sq.0 <= BigInt::from(s));
            }
        }
    }
}
