//! Sublattices of ℤ^d in canonical Hermite form.
//!
//! A lattice stands for a submodule of `R^d` where `R` is a localization of
//! ℤ; it is stored as the integral lattice `R·L ∩ ℤ^d`, so membership of an
//! integer vector is plain ℤ-membership.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::hnf::{coordinates, hnf_rows, left_kernel, snf};
use super::jint::JInt;
use super::matrix::Matrix;
use super::ring::BaseRing;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientShape {
    pub free_rank: usize,
    pub invariant_factors: Vec<JInt>,
}

impl Lattice {
    pub fn zero(dim: usize) -> Self {
        Lattice { dim, basis: Matrix::zeros(0, dim) }
    }

    pub fn full(dim: usize) -> Self {
        Lattice { dim, basis: Matrix::identity(dim) }
    }

    /// The lattice spanned by the rows of `gens`, closed under the ring.
    pub fn from_generators(gens: &Matrix, ring: &BaseRing) -> Self {
        let dim = gens.cols();
        let h = hnf_rows(gens);
        if ring.is_integers() || h.rows() == 0 {
            return Lattice { dim, basis: h };
        }
        let d = snf(&h);
        let mut rows = Vec::new();
        for (i, di) in d.invariants().iter().enumerate() {
            let c = ring.non_unit_part(di);
            rows.push(d.vinv.row(i).iter().map(|x| x * &c).collect::<Vec<_>>());
        }
        let g = Matrix::from_rows(rows, dim).expect("row lengths");
        Lattice { dim, basis: hnf_rows(&g) }
    }

    pub fn from_i64(dim: usize, rows: &[&[i64]], ring: &BaseRing) -> Self {
        if rows.is_empty() {
            return Lattice::zero(dim);
        }
        Self::from_generators(&Matrix::from_i64(rows), ring)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.rows() == 0
    }

    pub fn is_full(&self) -> bool {
        self.basis.rows() == self.dim && self.basis.is_identity()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        v.len() == self.dim && coordinates(&self.basis, v).is_some()
    }

    pub fn is_subset(&self, other: &Lattice) -> bool {
        self.dim == other.dim && (0..self.rank()).all(|i| other.contains(self.basis.row(i)))
    }

    fn check_dim(&self, other: &Lattice) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!("lattices in dimensions {} and {}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Lattice, ring: &BaseRing) -> Result<Lattice> {
        self.check_dim(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        Ok(Self::from_generators(&self.basis.vstack(&other.basis)?, ring))
    }

    pub fn intersection(&self, other: &Lattice, ring: &BaseRing) -> Result<Lattice> {
        self.check_dim(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Lattice::zero(self.dim));
        }
        if self.is_full() {
            return Ok(other.clone());
        }
        if other.is_full() {
            return Ok(self.clone());
        }
        let stacked = self.basis.vstack(&other.basis)?;
        let k = left_kernel(&stacked);
        if k.rows() == 0 {
            return Ok(Lattice::zero(self.dim));
        }
        let xs = k.submatrix(0..k.rows(), 0..self.rank());
        Ok(Self::from_generators(&xs.mul_unchecked(&self.basis), ring))
    }

    /// Smallest ring-pure sublattice containing `self`: `ℚ·L ∩ ℤ^d`.
    pub fn saturate(&self) -> Lattice {
        if self.is_zero() {
            return self.clone();
        }
        let d = snf(&self.basis);
        let r = d.invariants().len();
        Lattice { dim: self.dim, basis: hnf_rows(&d.vinv.submatrix(0..r, 0..self.dim)) }
    }

    pub fn is_saturated(&self) -> bool {
        self.saturate() == *self
    }

    /// `f(L)` for `f : ℤ^dim → ℤ^{f.rows}`.
    pub fn image(&self, f: &Matrix, ring: &BaseRing) -> Result<Lattice> {
        if f.cols() != self.dim {
            return Err(Error::Shape(format!("map with {} columns on lattice in dimension {}", f.cols(), self.dim)));
        }
        if self.is_zero() {
            return Ok(Lattice::zero(f.rows()));
        }
        Ok(Self::from_generators(&self.basis.mul_unchecked(&f.transpose()), ring))
    }

    /// `{x : f·x ∈ self}`.
    pub fn preimage(&self, f: &Matrix, ring: &BaseRing) -> Result<Lattice> {
        if f.rows() != self.dim {
            return Err(Error::Shape(format!("map with {} rows into dimension {}", f.rows(), self.dim)));
        }
        let n = f.cols();
        if self.is_full() {
            return Ok(Lattice::full(n));
        }
        let stacked = f.transpose().vstack(&self.basis)?;
        let k = left_kernel(&stacked);
        if k.rows() == 0 {
            return Ok(Lattice::zero(n));
        }
        Ok(Self::from_generators(&k.submatrix(0..k.rows(), 0..n), ring))
    }

    pub fn to_i64_rows(&self) -> Vec<Vec<i64>> {
        self.basis.to_rows().iter().map(|r| r.iter().map(|x| i64::try_from(x).expect("entry fits i64")).collect()).collect()
    }

    /// Rows of a basis of `self` as coordinates in the basis of `big`.
    pub fn coordinates_in(&self, big: &Lattice) -> Result<Matrix> {
        self.check_dim(big)?;
        let mut rows = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let c = coordinates(&big.basis, self.basis.row(i))
                .ok_or_else(|| Error::Precondition("sublattice is not contained in the ambient lattice".into()))?;
            rows.push(c);
        }
        Matrix::from_rows(rows, big.rank())
    }
}

/// `ker f` for `f : ℤ^{f.cols} → ℤ^{f.rows}`; always saturated.
pub fn kernel(f: &Matrix) -> Lattice {
    let n = f.cols();
    if f.rows() == 0 {
        return Lattice::full(n);
    }
    let k = left_kernel(&f.transpose());
    Lattice { dim: n, basis: k }
}

/// `big / small` up to isomorphism over the ring.
pub fn quotient_shape(big: &Lattice, small: &Lattice, ring: &BaseRing) -> Result<QuotientShape> {
    let coords = small.coordinates_in(big)?;
    let factors: Vec<BigInt> = if coords.rows() == 0 {
        vec![]
    } else {
        snf(&coords).invariants().iter().map(|d| ring.non_unit_part(d)).filter(|d| !d.is_one()).collect()
    };
    Ok(QuotientShape {
        free_rank: big.rank() - small.rank(),
        invariant_factors: factors.into_iter().map(JInt).collect(),
    })
}

/// Coordinates on `ℤ^d / S` for a saturated `S`: a surjection `q : ℤ^d → ℤ^{d−k}`
/// with kernel `S` and a section `s` with `q·s = 1`.
#[derive(Clone, Debug)]
pub struct SaturatedQuotient {
    pub q: Matrix,
    pub s: Matrix,
}

pub fn saturated_quotient(sat: &Lattice) -> Result<SaturatedQuotient> {
    let d = sat.dim;
    let k = sat.rank();
    if k == 0 {
        return Ok(SaturatedQuotient { q: Matrix::identity(d), s: Matrix::identity(d) });
    }
    let f = snf(&sat.basis);
    if f.invariants().iter().any(|x| !x.is_one()) {
        return Err(Error::Precondition("quotient coordinates need a saturated lattice".into()));
    }
    let q = f.v.submatrix(0..d, k..d).transpose();
    let s = f.vinv.submatrix(k..d, 0..d).transpose();
    Ok(SaturatedQuotient { q, s })
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(dim {}, {})", self.dim, self.basis)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0 in Z^{}", self.dim)
        } else if self.is_full() {
            write!(f, "Z^{}", self.dim)
        } else {
            write!(f, "span{}", self.basis)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    dim: usize,
    basis: Vec<Vec<JInt>>,
}

impl Serialize for Lattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeJson {
            dim: self.dim,
            basis: self.basis.to_rows().into_iter().map(|r| r.into_iter().map(JInt).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice {
    /// Generators are accepted in any form and brought to canonical HNF over ℤ.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = LatticeJson::deserialize(d)?;
        if j.basis.is_empty() {
            return Ok(Lattice::zero(j.dim));
        }
        let rows = j.basis.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect();
        let m = Matrix::from_rows(rows, j.dim).map_err(D::Error::custom)?;
        Ok(Lattice::from_generators(&m, &BaseRing::integers()))
    }
}

/// A lattice given by an HNF basis is canonical; helper for tests and oracles.
pub fn span_i64(rows: &[&[i64]]) -> Lattice {
    let dim = rows.first().map_or(0, |r| r.len());
    Lattice::from_i64(dim, rows, &BaseRing::integers())
}

impl Lattice {
    /// `k·L`.
    pub fn scaled(&self, k: &BigInt, ring: &BaseRing) -> Lattice {
        if k.is_zero() {
            return Lattice::zero(self.dim);
        }
        Self::from_generators(&self.basis.scale(k), ring)
    }

    /// Direct sum `L ⊕ M ⊆ ℤ^{d+e}`.
    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice { dim: self.dim + other.dim, basis: self.basis.block_diag(&other.basis) }
    }

    /// Restriction to the coordinate block `[a, b)`, assuming `self` splits
    /// along it (as lattices built by `direct_sum` do).
    pub fn block(&self, a: usize, b: usize) -> Lattice {
        let rows: Vec<usize> = (0..self.rank())
            .filter(|&i| {
                let r = self.basis.row(i);
                r[..a].iter().all(Zero::is_zero) && r[b..].iter().all(Zero::is_zero)
            })
            .collect();
        Lattice { dim: b - a, basis: hnf_rows(&self.basis.select_rows(&rows).submatrix(0..rows.len(), a..b)) }
    }
}
