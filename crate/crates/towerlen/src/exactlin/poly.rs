//! Univariate integer polynomials: characteristic polynomials and
//! factorization of monic polynomials over ℤ (Cantor–Zassenhaus modulo a
//! small prime, Hensel lifting, subset recombination).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::Matrix;

/// Coefficients, constant term first, with no trailing zeros.
pub type Poly = Vec<BigInt>;

pub fn trim(p: &mut Poly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub fn degree(p: &Poly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn from_i64(c: &[i64]) -> Poly {
    let mut p: Poly = c.iter().map(|&x| BigInt::from(x)).collect();
    trim(&mut p);
    p
}

pub fn mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub fn sub(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    trim(&mut out);
    out
}

pub fn derivative(a: &Poly) -> Poly {
    let mut out: Poly = a.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    trim(&mut out);
    out
}

/// Division by a monic polynomial over ℤ.
pub fn div_rem_monic(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut r = a.clone();
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    trim(&mut q);
    trim(&mut r);
    (q, r)
}

fn content(a: &Poly) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

fn primitive(a: &Poly) -> Poly {
    let c = content(a);
    if c.is_zero() {
        return vec![];
    }
    let s = if a.last().is_some_and(Signed::is_negative) { -c } else { c };
    a.iter().map(|x| x / &s).collect()
}

/// Pseudo-remainder of `a` by `b`.
fn prem(a: &Poly, b: &Poly) -> Poly {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.clone();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let lr = r[r.len() - 1].clone();
        r = r.iter().map(|x| x * &lb).collect();
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &lr * bj;
        }
        trim(&mut r);
    }
    r
}

/// Primitive gcd with positive leading coefficient.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (primitive(a), primitive(b));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = primitive(&prem(&x, &y));
        x = y;
        y = r;
    }
    x
}

/// Product of the distinct monic irreducible factors of a monic `f`.
pub fn square_free_part(f: &Poly) -> Poly {
    let g = gcd(f, &derivative(f));
    if g.len() <= 1 {
        return f.clone();
    }
    div_rem_monic(f, &g).0
}

/// Characteristic polynomial `det(x·I − m)` by Faddeev–LeVerrier.
pub fn charpoly(m: &Matrix) -> Poly {
    let n = m.rows();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        let mut next = m.mul_unchecked(&mk);
        for i in 0..n {
            *next.get_mut(i, i) += &c[n - k + 1];
        }
        mk = next;
        let am = m.mul_unchecked(&mk);
        let tr: BigInt = (0..n).map(|i| am.get(i, i).clone()).sum();
        c[n - k] = -(tr / BigInt::from(k));
    }
    c
}

/// `p(m)` by Horner's rule.
pub fn eval_matrix(p: &Poly, m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut acc = Matrix::zeros(n, n);
    for c in p.iter().rev() {
        acc = acc.mul_unchecked(m);
        for i in 0..n {
            *acc.get_mut(i, i) += c;
        }
    }
    acc
}

// ---- arithmetic in F_p[x] ------------------------------------------------

type Fp = Vec<u64>;

fn fp_trim(a: &mut Fp) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_from(a: &Poly, p: u64) -> Fp {
    let pb = BigInt::from(p);
    let mut v: Fp = a.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect();
    fp_trim(&mut v);
    v
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let e = (a as i128).extended_gcd(&(p as i128));
    e.x.rem_euclid(p as i128) as u64
}

fn fp_sub(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    let mut out: Fp = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    fp_trim(&mut out);
    out
}

fn fp_add(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    let mut out: Fp = (0..n).map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p).collect();
    fp_trim(&mut out);
    out
}

fn fp_mul(a: &Fp, b: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    fp_trim(&mut out);
    out
}

fn fp_div_rem(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    let mut r = a.clone();
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![0u64; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = mulmod(r[i + db], inv, p);
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + p - mulmod(c, bj, p)) % p;
            }
        }
        q[i] = c;
    }
    fp_trim(&mut q);
    fp_trim(&mut r);
    (q, r)
}

fn fp_monic(a: &Fp, p: u64) -> Fp {
    let inv = inv_mod(*a.last().unwrap(), p);
    a.iter().map(|&x| mulmod(x, inv, p)).collect()
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !y.is_empty() {
        let r = fp_div_rem(&x, &y, p).1;
        x = y;
        y = r;
    }
    if x.is_empty() {
        x
    } else {
        fp_monic(&x, p)
    }
}

fn fp_pow_mod(base: &Fp, e: &BigUint, m: &Fp, p: u64) -> Fp {
    let mut result: Fp = vec![1];
    let b = fp_div_rem(base, m, p).1;
    for i in (0..e.bits()).rev() {
        result = fp_div_rem(&fp_mul(&result, &result, p), m, p).1;
        if e.bit(i) {
            result = fp_div_rem(&fp_mul(&result, &b, p), m, p).1;
        }
    }
    result
}

fn fp_derivative(a: &Fp, p: u64) -> Fp {
    let mut out: Fp = a.iter().enumerate().skip(1).map(|(i, &c)| mulmod(c, i as u64 % p, p)).collect();
    fp_trim(&mut out);
    out
}

/// Distinct-degree then equal-degree factorization of a monic square-free `f`.
fn factor_fp(f: &Fp, p: u64, rng: &mut ChaCha8Rng) -> Vec<Fp> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x: Fp = vec![0, 1];
    let mut h = x.clone();
    let mut d = 1usize;
    while rest.len() > 2 * d {
        h = fp_pow_mod(&h, &BigUint::from(p), &rest, p);
        let g = fp_gcd(&fp_sub(&h, &x, p), &rest, p);
        if g.len() > 1 {
            equal_degree(&g, d, p, rng, &mut out);
            rest = fp_div_rem(&rest, &g, p).0;
            h = fp_div_rem(&h, &rest, p).1;
        }
        d += 1;
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out
}

fn equal_degree(g: &Fp, d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<Fp>) {
    let n = g.len() - 1;
    if n == d {
        out.push(g.clone());
        return;
    }
    let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let mut a: Fp = (0..n).map(|_| rng.gen_range(0..p)).collect();
        fp_trim(&mut a);
        if a.len() < 2 {
            continue;
        }
        let b = fp_sub(&fp_pow_mod(&a, &e, g, p), &vec![1], p);
        let u = fp_gcd(&b, g, p);
        if u.len() > 1 && u.len() < g.len() {
            let v = fp_div_rem(g, &u, p).0;
            equal_degree(&u, d, p, rng, out);
            equal_degree(&fp_monic(&v, p), d, p, rng, out);
            return;
        }
    }
}

// ---- Hensel lifting ------------------------------------------------------

fn reduce_sym(a: &Poly, m: &BigInt) -> Poly {
    let half = m / 2;
    let mut out: Poly = a
        .iter()
        .map(|x| {
            let r = x.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect();
    trim(&mut out);
    out
}

fn lift_fp(a: &Fp) -> Poly {
    a.iter().map(|&x| BigInt::from(x)).collect()
}

/// Bezout coefficients `s·g + t·h = 1` in F_p[x] for coprime `g`, `h`.
fn fp_bezout(g: &Fp, h: &Fp, p: u64) -> (Fp, Fp) {
    let (mut r0, mut r1) = (g.clone(), h.clone());
    let (mut s0, mut s1): (Fp, Fp) = (vec![1], vec![]);
    let (mut t0, mut t1): (Fp, Fp) = (vec![], vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_div_rem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    let inv = inv_mod(r0[0], p);
    let sc = |v: &Fp| -> Fp { v.iter().map(|&x| mulmod(x, inv, p)).collect() };
    (sc(&s0), sc(&t0))
}

/// Lift `f ≡ g·h (mod p)` with `g` monic to a factorization modulo `p^a`.
fn hensel_pair(f: &Poly, g: &Fp, h: &Fp, p: u64, a: u32) -> (Poly, Poly) {
    let (s, t) = fp_bezout(g, h, p);
    let pb = BigInt::from(p);
    let mut gz = lift_fp(g);
    let mut hz = lift_fp(h);
    let mut pk = pb.clone();
    for _ in 1..a {
        let err = sub(f, &mul(&gz, &hz));
        let e: Poly = err.iter().map(|x| x / &pk).collect();
        let ef = fp_from(&e, p);
        let (q, am) = {
            let et = fp_mul(&ef, &t, p);
            fp_div_rem(&et, g, p)
        };
        let b = fp_add(&fp_mul(&ef, &s, p), &fp_mul(&q, h, p), p);
        let add = |z: &Poly, d: &Fp| -> Poly {
            let n = z.len().max(d.len());
            let mut out: Poly =
                (0..n).map(|i| z.get(i).cloned().unwrap_or_default() + &pk * BigInt::from(d.get(i).copied().unwrap_or(0))).collect();
            trim(&mut out);
            out
        };
        gz = add(&gz, &am);
        hz = add(&hz, &b);
        pk *= &pb;
        gz = reduce_sym(&gz, &pk);
        hz = reduce_sym(&hz, &pk);
    }
    (gz, hz)
}

fn hensel_multi(f: &Poly, factors: &[Fp], p: u64, a: u32) -> Vec<Poly> {
    if factors.len() == 1 {
        return vec![reduce_sym(f, &BigInt::from(p).pow(a))];
    }
    let mid = factors.len() / 2;
    let g0 = factors[..mid].iter().fold(vec![1u64], |acc, x| fp_mul(&acc, x, p));
    let h0 = factors[mid..].iter().fold(vec![1u64], |acc, x| fp_mul(&acc, x, p));
    let (g, h) = hensel_pair(f, &g0, &h0, p, a);
    let mut out = hensel_multi(&g, &factors[..mid], p, a);
    out.extend(hensel_multi(&h, &factors[mid..], p, a));
    out
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).filter(|&n| super::ring::is_prime_u64(n))
}

/// Distinct monic irreducible factors of a monic `f`, sorted by degree then
/// coefficients.
pub fn irreducible_factors(f: &Poly) -> Vec<Poly> {
    assert!(f.last().is_some_and(One::is_one), "factorization expects a monic polynomial");
    let mut out = Vec::new();
    let mut f = square_free_part(f);
    // Peel off x first; it is common (nilpotent parts) and cheap.
    if f.len() > 1 && f[0].is_zero() {
        out.push(from_i64(&[0, 1]));
        f = f[1..].to_vec();
    }
    if f.len() <= 2 {
        if f.len() == 2 {
            out.push(f);
        }
        sort_factors(&mut out);
        return out;
    }
    let n = f.len() - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut best: Option<(u64, Vec<Fp>)> = None;
    let mut tried = 0;
    for p in small_primes() {
        let fp = fp_from(&f, p);
        if fp.len() != f.len() || fp_gcd(&fp, &fp_derivative(&fp, p), p).len() != 1 {
            continue;
        }
        let fs = factor_fp(&fp, p, &mut rng);
        if best.as_ref().is_none_or(|(_, b)| fs.len() < b.len()) {
            best = Some((p, fs));
        }
        tried += 1;
        if tried >= 5 || best.as_ref().unwrap().1.len() == 1 {
            break;
        }
    }
    let (p, fs) = best.expect("some prime keeps f square-free");
    if fs.len() == 1 {
        out.push(f);
        sort_factors(&mut out);
        return out;
    }
    let maxc = f.iter().map(|c| c.abs()).max().unwrap();
    let bound = (BigInt::one() << (n + 1)) * BigInt::from(n + 1) * maxc;
    let pb = BigInt::from(p);
    let mut a = 1u32;
    let mut pa = pb.clone();
    while pa <= bound {
        pa *= &pb;
        a += 1;
    }
    let lifted = hensel_multi(&f, &fs, p, a);
    out.extend(recombine(f, lifted, &pa));
    sort_factors(&mut out);
    out
}

fn recombine(mut f: Poly, mut lifted: Vec<Poly>, pa: &BigInt) -> Vec<Poly> {
    let mut found = Vec::new();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut hit = None;
        for subset in subsets(lifted.len(), s) {
            let g = subset.iter().fold(vec![BigInt::one()], |acc, &i| reduce_sym(&mul(&acc, &lifted[i]), pa));
            if !f[0].is_multiple_of(&g[0]) && !g[0].is_zero() {
                continue;
            }
            let (q, r) = div_rem_monic(&f, &g);
            if r.is_empty() {
                hit = Some((subset, g, q));
                break;
            }
        }
        match hit {
            Some((subset, g, q)) => {
                found.push(g);
                f = q;
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
            }
            None => s += 1,
        }
    }
    if f.len() > 1 {
        found.push(f);
    }
    found
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn sort_factors(v: &mut [Poly]) {
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prod(fs: &[Poly]) -> Poly {
        fs.iter().fold(vec![BigInt::one()], |acc, x| mul(&acc, x))
    }

    #[test]
    fn charpoly_small() {
        let m = Matrix::from_i64(&[&[2, 1], &[0, 3]]);
        assert_eq!(charpoly(&m), from_i64(&[6, -5, 1]));
        let z = eval_matrix(&charpoly(&m), &m);
        assert!(z.is_zero());
    }

    #[test]
    fn factors_products_of_linears() {
        // (x-1)(x+2)(x-3)
        let f = mul(&mul(&from_i64(&[-1, 1]), &from_i64(&[2, 1])), &from_i64(&[-3, 1]));
        let fs = irreducible_factors(&f);
        assert_eq!(fs.len(), 3);
        assert_eq!(prod(&fs), f);
    }

    #[test]
    fn keeps_irreducibles_whole() {
        // x^4 + 1 is irreducible over Q but splits modulo every prime.
        let f = from_i64(&[1, 0, 0, 0, 1]);
        assert_eq!(irreducible_factors(&f), vec![f.clone()]);
        let g = from_i64(&[2, 1, 1]);
        let h = mul(&g, &from_i64(&[-5, 0, 1]));
        let fs = irreducible_factors(&h);
        assert_eq!(fs.len(), 2);
        assert_eq!(prod(&fs), h);
    }

    #[test]
    fn radical_of_repeated_factors() {
        let f = mul(&mul(&from_i64(&[-1, 1]), &from_i64(&[-1, 1])), &from_i64(&[0, 1]));
        let fs = irreducible_factors(&f);
        assert_eq!(fs, vec![from_i64(&[-1, 1]), from_i64(&[0, 1])]);
    }
}
