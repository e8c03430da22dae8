use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use towerlen::exactlin::eventual::{image_chain, is_stable};
use towerlen::exactlin::hnf::is_canonical_hnf;
use towerlen::exactlin::poly::{irreducible_factors, mul, square_free_part, Poly};
use towerlen::exactlin::{eventual_image, hnf, snf, BaseRing, Lattice, Matrix};

fn matrix(rows: usize, cols: usize, range: i64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-range..=range, rows * cols).prop_map(move |v| Matrix::from_vec_i64(rows, cols, &v))
}

fn any_matrix(max: usize, range: i64) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(move |(r, c)| matrix(r, c, range))
}

fn unimodular(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3), 0..12).prop_map(move |ops| {
        let mut u = Matrix::identity(n);
        for (a, b, k) in ops {
            if a != b {
                u.add_row_multiple(a, b, &BigInt::from(k));
            }
        }
        u
    })
}

fn z() -> BaseRing {
    BaseRing::integers()
}

/// gcd of all k×k minors, by enumeration.
fn minor_gcd(m: &Matrix, k: usize) -> BigInt {
    fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for last in k - 1..n {
            for mut c in combos(last, k - 1) {
                c.push(last);
                out.push(c);
            }
        }
        out
    }
    let mut g = BigInt::zero();
    for rs in combos(m.rows(), k) {
        for cs in combos(m.cols(), k) {
            let rows: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| m.get(i, j).clone()).collect()).collect();
            let sub = Matrix::from_rows(rows, k).unwrap();
            g = g.gcd(&sub.det().unwrap());
        }
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn hnf_is_certified(m in any_matrix(6, 99)) {
        let (h, u) = hnf(&m);
        prop_assert_eq!(u.mul(&m).unwrap(), h.clone());
        prop_assert_eq!(u.det().unwrap().abs(), BigInt::one());
        prop_assert!(is_canonical_hnf(&h));
    }

    #[test]
    fn snf_divisibility_and_minors(m in matrix(4, 4, 20)) {
        let d = snf(&m);
        prop_assert_eq!(d.u.mul(&m).unwrap().mul(&d.v).unwrap(), d.s.clone());
        prop_assert_eq!(d.u.det().unwrap().abs(), BigInt::one());
        prop_assert_eq!(d.v.det().unwrap().abs(), BigInt::one());
        let inv = d.invariants();
        for w in inv.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
        let mut prod = BigInt::one();
        for k in 1..=3 {
            let dk = inv.get(k - 1).cloned().unwrap_or_default();
            prod *= dk;
            prop_assert_eq!(prod.clone(), minor_gcd(&m, k));
        }
    }

    #[test]
    fn lattice_canonical_under_recombination(m in matrix(3, 4, 9), u in unimodular(3)) {
        let a = Lattice::from_generators(&m, &z());
        let b = Lattice::from_generators(&u.mul(&m).unwrap(), &z());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn saturation_laws(m in matrix(2, 4, 9), extra in matrix(1, 4, 9)) {
        let l = Lattice::from_generators(&m, &z());
        let s = l.saturate();
        prop_assert_eq!(s.saturate(), s.clone());
        prop_assert_eq!(s.rank(), l.rank());
        prop_assert!(l.is_subset(&s));
        let bigger = Lattice::from_generators(&m.vstack(&extra).unwrap(), &z());
        prop_assert!(s.is_subset(&bigger.saturate()));
    }

    #[test]
    fn galois_connection(f in matrix(3, 3, 5), gens in matrix(2, 3, 6)) {
        let l = Lattice::from_generators(&gens, &z());
        let pre = l.preimage(&f, &z()).unwrap();
        let lhs = pre.image(&f, &z()).unwrap();
        let rhs = l.intersection(&Lattice::full(3).image(&f, &z()).unwrap(), &z()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn intersection_is_meet(a in matrix(2, 3, 6), b in matrix(2, 3, 6)) {
        let la = Lattice::from_generators(&a, &z());
        let lb = Lattice::from_generators(&b, &z());
        let i = la.intersection(&lb, &z()).unwrap();
        prop_assert!(i.is_subset(&la) && i.is_subset(&lb));
        // Brute-force scan of a small box.
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                for w in -3i64..=3 {
                    let v = vec![BigInt::from(x), BigInt::from(y), BigInt::from(w)];
                    prop_assert_eq!(i.contains(&v), la.contains(&v) && lb.contains(&v));
                }
            }
        }
    }

    #[test]
    fn eventual_image_certificates(m in matrix(3, 3, 4)) {
        let s = eventual_image(&m, &z()).unwrap();
        prop_assert!(is_stable(&m, &s, &z()));
        for c in image_chain(&m, &z(), 10) {
            prop_assert!(s.is_subset(&c));
        }
    }

    #[test]
    fn eventual_image_contains_stable_sublattices(
        a in matrix(2, 2, 3), b in matrix(2, 2, 3), top in unimodular(2), u in unimodular(4)
    ) {
        // m preserves T = U·span(e1, e2) and acts on it by a unimodular block.
        let mut blk = Matrix::zeros(4, 4);
        blk.put_block(0, 0, &top);
        blk.put_block(0, 2, &a);
        blk.put_block(2, 2, &b);
        let uinv = {
            let d = snf(&u);
            // u is unimodular, so u⁻¹ = v·u' with s = I.
            d.v.mul(&d.u).unwrap()
        };
        let m = u.mul(&blk).unwrap().mul(&uinv).unwrap();
        let t = Lattice::from_generators(&u.submatrix(0..4, 0..2).transpose(), &z());
        prop_assert!(is_stable(&m, &t, &z()));
        let s = eventual_image(&m, &z()).unwrap();
        prop_assert!(t.is_subset(&s));
    }

    #[test]
    fn factors_multiply_back(cs in prop::collection::vec(prop::collection::vec(-5i64..=5, 1..=2), 1..=4)) {
        let mut f: Poly = vec![BigInt::one()];
        for c in &cs {
            let mut g: Poly = c.iter().map(|&x| BigInt::from(x)).collect();
            g.push(BigInt::one());
            f = mul(&f, &g);
        }
        let fs = irreducible_factors(&f);
        let prod = fs.iter().fold(vec![BigInt::one()], |acc, g| mul(&acc, g));
        prop_assert_eq!(prod, square_free_part(&f));
        for g in &fs {
            prop_assert!(g.last().unwrap().is_one());
        }
    }
}

#[test]
fn eventual_image_equals_stabilized_chain() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 60 {
        let v: Vec<i64> = (0..9).map(|_| rng.gen_range(-3..=3)).collect();
        let m = Matrix::from_vec_i64(3, 3, &v);
        let chain = image_chain(&m, &z(), 40);
        if let Some(k) = (0..40).find(|&k| chain[k] == chain[k + 1]) {
            assert_eq!(eventual_image(&m, &z()).unwrap(), chain[k], "matrix {m}");
            checked += 1;
        }
    }
}

#[test]
fn integers_unit_detection() {
    assert!(!BaseRing::integers().is_unit(&BigInt::from(-3)));
    assert!(BaseRing::integers().is_unit(&BigInt::from(-1)));
    assert!(BigInt::from(-1).is_negative());
}
