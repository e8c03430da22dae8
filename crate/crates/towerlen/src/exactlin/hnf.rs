//! Hermite and Smith normal forms with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::Matrix;

/// Extended gcd with a nonnegative gcd: returns `(g, s, t)` with `s·a + t·b = g`.
pub fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Canonical row Hermite normal form `h = u·m`.
///
/// Pivots are positive, entries above a pivot lie in `[0, pivot)`, and zero
/// rows sit at the bottom; `h` keeps the shape of `m`.
pub fn hnf(m: &Matrix) -> (Matrix, Matrix) {
    let mut h = m.clone();
    let mut u = Matrix::identity(m.rows());
    hnf_in_place(&mut h, Some(&mut u));
    (h, u)
}

/// The nonzero rows of the canonical HNF of `m`, i.e. the canonical basis of
/// the lattice spanned by the rows of `m`.
pub fn hnf_rows(m: &Matrix) -> Matrix {
    let mut h = m.clone();
    let r = hnf_in_place(&mut h, None);
    h.submatrix(0..r, 0..h.cols())
}

/// Returns the rank (number of pivot rows).
fn hnf_in_place(h: &mut Matrix, mut u: Option<&mut Matrix>) -> usize {
    let (rows, cols) = (h.rows(), h.cols());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Bring the smallest nonzero entry up first; this keeps growth down.
        let mut best: Option<usize> = None;
        for i in r..rows {
            if !h.get(i, c).is_zero()
                && best.is_none_or(|b| h.get(i, c).abs() < h.get(b, c).abs())
            {
                best = Some(i);
            }
        }
        let Some(b) = best else { continue };
        h.swap_rows(r, b);
        if let Some(u) = u.as_deref_mut() {
            u.swap_rows(r, b);
        }
        for i in r + 1..rows {
            if h.get(i, c).is_zero() {
                continue;
            }
            let a = h.get(r, c).clone();
            let bb = h.get(i, c).clone();
            let (q, rem) = bb.div_rem(&a);
            if rem.is_zero() {
                let k = -q;
                h.add_row_multiple(i, r, &k);
                if let Some(u) = u.as_deref_mut() {
                    u.add_row_multiple(i, r, &k);
                }
                continue;
            }
            let (g, s, t) = egcd(&a, &bb);
            let (x, y) = (-(&bb / &g), &a / &g);
            h.combine_rows(r, i, &s, &t, &x, &y);
            if let Some(u) = u.as_deref_mut() {
                u.combine_rows(r, i, &s, &t, &x, &y);
            }
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
            if let Some(u) = u.as_deref_mut() {
                u.negate_row(r);
            }
        }
        let p = h.get(r, c).clone();
        for i in 0..r {
            let q = h.get(i, c).div_floor(&p);
            if !q.is_zero() {
                let k = -q;
                h.add_row_multiple(i, r, &k);
                if let Some(u) = u.as_deref_mut() {
                    u.add_row_multiple(i, r, &k);
                }
            }
        }
        r += 1;
    }
    r
}

/// True when `h` is in canonical row HNF (zero rows allowed only at the bottom).
pub fn is_canonical_hnf(h: &Matrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero = false;
    for i in 0..h.rows() {
        let row = h.row(i);
        match row.iter().position(|x| !x.is_zero()) {
            None => seen_zero = true,
            Some(p) => {
                if seen_zero || last_pivot.is_some_and(|lp| p <= lp) || !row[p].is_positive() {
                    return false;
                }
                for k in 0..i {
                    let e = h.get(k, p);
                    if e.is_negative() || e >= &row[p] {
                        return false;
                    }
                }
                last_pivot = Some(p);
            }
        }
    }
    true
}

/// Smith normal form `s = u·m·v`, with `vinv = v⁻¹` tracked alongside.
#[derive(Clone, Debug)]
pub struct Snf {
    pub s: Matrix,
    pub u: Matrix,
    pub v: Matrix,
    pub vinv: Matrix,
}

impl Snf {
    /// The nonzero diagonal entries `d₁ | d₂ | …`.
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }
}

pub fn snf(m: &Matrix) -> Snf {
    let (r, c) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = Matrix::identity(r);
    let mut v = Matrix::identity(c);
    let mut vinv = Matrix::identity(c);

    // Column operation helpers keep v and vinv consistent.
    fn col_swap(s: &mut Matrix, v: &mut Matrix, vinv: &mut Matrix, a: usize, b: usize) {
        s.swap_cols(a, b);
        v.swap_cols(a, b);
        vinv.swap_rows(a, b);
    }
    fn col_addmul(s: &mut Matrix, v: &mut Matrix, vinv: &mut Matrix, dst: usize, src: usize, k: &BigInt) {
        s.add_col_multiple(dst, src, k);
        v.add_col_multiple(dst, src, k);
        let nk = -k;
        vinv.add_row_multiple(src, dst, &nk);
    }

    let mut t = 0;
    while t < r.min(c) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let e = s.get(i, j);
                if !e.is_zero() && best.is_none_or(|(bi, bj)| e.abs() < s.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        col_swap(&mut s, &mut v, &mut vinv, t, pj);
        loop {
            let mut changed = false;
            for i in t + 1..r {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let a = s.get(t, t).clone();
                let b = s.get(i, t).clone();
                let (q, rem) = b.div_rem(&a);
                if rem.is_zero() {
                    let k = -q;
                    s.add_row_multiple(i, t, &k);
                    u.add_row_multiple(i, t, &k);
                } else {
                    let (g, x, y) = egcd(&a, &b);
                    let (p, q) = (-(&b / &g), &a / &g);
                    s.combine_rows(t, i, &x, &y, &p, &q);
                    u.combine_rows(t, i, &x, &y, &p, &q);
                    changed = true;
                }
            }
            for j in t + 1..c {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let a = s.get(t, t).clone();
                let b = s.get(t, j).clone();
                let (q, rem) = b.div_rem(&a);
                if rem.is_zero() {
                    let k = -q;
                    col_addmul(&mut s, &mut v, &mut vinv, j, t, &k);
                } else {
                    let (g, x, y) = egcd(&a, &b);
                    let (ag, bg) = (&a / &g, &b / &g);
                    // new col t = x·col_t + y·col_j ; new col j = −bg·col_t + ag·col_j
                    let nbg = -&bg;
                    s.combine_cols(t, j, &x, &y, &nbg, &ag);
                    v.combine_cols(t, j, &x, &y, &nbg, &ag);
                    // inverse acts on rows of vinv: row_t' = ag·row_t + bg·row_j ; row_j' = −y·row_t + x·row_j
                    let ny = -&y;
                    vinv.combine_rows(t, j, &ag, &bg, &ny, &x);
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            let p = s.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !s.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    s.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    Snf { s, u, v, vinv }
}

/// A basis (as rows) of the left kernel `{x : x·m = 0}`.
pub fn left_kernel(m: &Matrix) -> Matrix {
    let (h, u) = hnf(m);
    let rank = (0..h.rows()).take_while(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    let idx: Vec<usize> = (rank..m.rows()).collect();
    hnf_rows(&u.select_rows(&idx))
}

/// Coordinates of `v` in the lattice basis `basis` (canonical HNF rows), or
/// `None` if `v` is not in the lattice.
pub fn coordinates(basis: &Matrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut coords = vec![BigInt::zero(); basis.rows()];
    for (i, c) in coords.iter_mut().enumerate() {
        let row = basis.row(i);
        let p = row.iter().position(|x| !x.is_zero())?;
        if rest[..p].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let (q, rem) = rest[p].div_rem(&row[p]);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (r, b) in rest.iter_mut().zip(row) {
                *r -= &q * b;
            }
        }
        *c = q;
    }
    if rest.iter().all(|x| x.is_zero()) {
        Some(coords)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(rows)
    }

    #[test]
    fn hnf_worked_example() {
        let a = m(&[&[2, 6], &[4, 8]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, m(&[&[2, 2], &[0, 4]]));
        assert_eq!(u.mul(&a).unwrap(), h);
        assert_eq!(u.det().unwrap().abs(), BigInt::one());
    }

    #[test]
    fn hnf_trivial_cases() {
        let (h, u) = hnf(&Matrix::identity(3));
        assert_eq!(h, Matrix::identity(3));
        assert_eq!(u, Matrix::identity(3));
        let (h, u) = hnf(&Matrix::zeros(2, 2));
        assert!(h.is_zero());
        assert_eq!(u, Matrix::identity(2));
    }

    #[test]
    fn snf_worked_examples() {
        let d = snf(&m(&[&[2, 6], &[4, 8]]));
        assert_eq!(d.invariants(), vec![BigInt::from(2), BigInt::from(4)]);
        let d = snf(&m(&[&[6, 0], &[0, 4]]));
        assert_eq!(d.invariants(), vec![BigInt::from(2), BigInt::from(12)]);
        let a = m(&[&[6, 0], &[0, 4]]);
        assert_eq!(d.u.mul(&a).unwrap().mul(&d.v).unwrap(), d.s);
        assert_eq!(d.v.mul(&d.vinv).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn snf_rectangular_transforms() {
        let a = m(&[&[3, 5, 7, 2], &[9, -4, 1, 0], &[12, 1, 8, 2]]);
        let d = snf(&a);
        assert_eq!(d.u.mul(&a).unwrap().mul(&d.v).unwrap(), d.s);
        assert_eq!(d.v.mul(&d.vinv).unwrap(), Matrix::identity(4));
        assert_eq!(d.invariants().len(), 2);
    }

    #[test]
    fn left_kernel_and_coordinates() {
        let a = m(&[&[1], &[1]]);
        let k = left_kernel(&a);
        assert_eq!(k, m(&[&[1, -1]]));
        let b = hnf_rows(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(coordinates(&b, &[BigInt::from(4), BigInt::from(9)]), Some(vec![BigInt::from(2), BigInt::from(3)]));
        assert_eq!(coordinates(&b, &[BigInt::from(1), BigInt::from(0)]), None);
    }
}
