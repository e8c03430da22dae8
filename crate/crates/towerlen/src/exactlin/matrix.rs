//! Dense matrices over arbitrary-precision integers.
//!
//! Matrices act on column vectors: an `r × c` matrix is a map `ℤ^c → ℤ^r`.
//! Lattices elsewhere in the crate store their generators as rows, so the
//! image of a lattice with basis `B` under `f` has generators `B · fᵀ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::jint::JInt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn scalar(n: usize, s: &BigInt) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = s.clone();
        }
        m
    }

    pub fn diag(entries: &[BigInt]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have `cols` entries.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols, data })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix literal");
                r.iter().map(|&x| BigInt::from(x))
            })
            .collect();
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn from_vec_i64(rows: usize, cols: usize, v: &[i64]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Matrix { rows, cols, data: v.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| {
                let e = self.get(i, j);
                if i == j { e.is_one() } else { e.is_zero() }
            }))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape("addition of differently shaped matrices".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: &BigInt) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn neg(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    /// `self^k` for square matrices.
    pub fn pow(&self, mut k: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Entries reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: &BigInt) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.mod_floor(m)).collect() }
    }

    pub fn pow_mod(&self, mut k: u64, m: &BigInt) -> Matrix {
        assert!(self.is_square());
        let mut base = self.reduce_mod(m);
        let mut acc = Matrix::identity(self.rows).reduce_mod(m);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base).reduce_mod(m);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base).reduce_mod(m);
            }
        }
        acc
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::Shape("vstack of matrices with different column counts".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols.max(self.cols) };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { rows: self.rows + other.rows, cols, data })
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::Shape("hstack of matrices with different row counts".into()));
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Copies `src` into the block whose top-left corner is `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, src: &Matrix) {
        for i in 0..src.rows {
            for j in 0..src.cols {
                self.set(r0 + i, c0 + j, src.get(i, j).clone());
            }
        }
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    /// Replaces rows (a, b) by (s·a + t·b, u·a + v·b).
    pub fn combine_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for j in 0..self.cols {
            let x = self.data[a * self.cols + j].clone();
            let y = self.data[b * self.cols + j].clone();
            self.data[a * self.cols + j] = s * &x + t * &y;
            self.data[b * self.cols + j] = u * &x + v * &y;
        }
    }

    /// Replaces columns (a, b) by (s·a + t·b, u·a + v·b).
    pub fn combine_cols(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for i in 0..self.rows {
            let x = self.data[i * self.cols + a].clone();
            let y = self.data[i * self.cols + b].clone();
            self.data[i * self.cols + a] = s * &x + t * &y;
            self.data[i * self.cols + b] = u * &x + v * &y;
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return Ok(BigInt::zero());
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
    }

    /// Rank over ℚ.
    pub fn rank(&self) -> usize {
        crate::exactlin::hnf::hnf_rows(self).rows()
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }

    /// Content gcd of all entries (zero for the zero matrix).
    pub fn content(&self) -> BigInt {
        self.data.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// JSON form `{"rows": [[...], ...]}`; an optional `"cols"` disambiguates empty matrices.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: Vec<Vec<JInt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cols: Option<usize>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cols = if self.rows == 0 { Some(self.cols) } else { None };
        let rows = self.to_rows().into_iter().map(|r| r.into_iter().map(JInt).collect()).collect();
        MatrixJson { rows, cols }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        let cols = j.cols.unwrap_or_else(|| j.rows.first().map_or(0, |r| r.len()));
        let rows = j.rows.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect();
        Matrix::from_rows(rows, cols).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = Matrix::from_i64(&[&[2, -1, 3], &[0, 4, 5], &[1, 1, -2]]);
        // 2(−8−5) +1(0−5) +3(0−4) = −26 −5 −12
        assert_eq!(m.det().unwrap(), BigInt::from(-43));
        assert_eq!(Matrix::zeros(0, 0).det().unwrap(), BigInt::one());
    }

    #[test]
    fn det_with_pivot_swap() {
        let m = Matrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.det().unwrap(), BigInt::from(-1));
    }

    #[test]
    fn pow_and_transpose() {
        let m = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        assert_eq!(m.pow(5), Matrix::from_i64(&[&[1, 5], &[0, 1]]));
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.pow_mod(5, &BigInt::from(3)), Matrix::from_i64(&[&[1, 2], &[0, 1]]));
    }

    #[test]
    fn json_round_trip() {
        let m = Matrix::from_i64(&[&[1, 2], &[3, 4]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":[[1,2],[3,4]]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let e = Matrix::zeros(0, 3);
        let back: Matrix = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        assert_eq!(back.cols(), 3);
    }
}
