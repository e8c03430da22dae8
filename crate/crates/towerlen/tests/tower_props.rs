use proptest::prelude::*;

use towerlen::exactlin::{BaseRing, Matrix};
use towerlen::modcolim::{dual_tower, ColimSpec};
use towerlen::ordinals::Ordinal;
use towerlen::towers::verdict::{self, LengthBound};
use towerlen::towers::{Depths, Exactness, Tower, TowerSpec, Tri};

fn endo(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-4i64..=4, n * n).prop_map(move |v| Matrix::from_vec_i64(n, n, &v))
}

fn constant_tower() -> impl Strategy<Value = TowerSpec> {
    (1usize..=3).prop_flat_map(endo).prop_map(|m| TowerSpec::constant(BaseRing::integers(), m))
}

fn small_ordinal() -> impl Strategy<Value = Ordinal> {
    prop_oneof![
        (0u64..5).prop_map(Ordinal::nat),
        (0u64..3).prop_map(|k| Ordinal::omega().add(&Ordinal::nat(k))),
        Just(Ordinal::omega().mul_nat(2)),
    ]
}

fn ordinal() -> impl Strategy<Value = Ordinal> {
    prop::collection::vec((0u32..4, 1u64..4), 0..4).prop_map(|mut t| {
        t.sort_by_key(|x| std::cmp::Reverse(x.0));
        t.dedup_by_key(|x| x.0);
        Ordinal::from_terms(t).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn derived_levels_descend(spec in constant_tower(), a in small_ordinal()) {
        let t = Tower::new(&spec).unwrap();
        for n in 0..6 {
            let x = t.derived(&a, n).unwrap();
            let y = t.derived(&a.succ(), n).unwrap();
            if x.exactness == Exactness::Exact && y.exactness == Exactness::Exact {
                prop_assert!(y.lattice.is_subset(&x.lattice));
            }
            // The bond carries level n+1 into level n.
            let up = t.derived(&a, n + 1).unwrap();
            if up.exactness == Exactness::Exact && x.exactness == Exactness::Exact {
                let img = up.lattice.image(&t.bond(n), t.ring()).unwrap();
                prop_assert!(img.is_subset(&x.lattice));
            }
        }
    }

    #[test]
    fn sums_are_levelwise(a in constant_tower(), b in constant_tower(), alpha in small_ordinal()) {
        let (ta, tb) = (Tower::new(&a).unwrap(), Tower::new(&b).unwrap());
        let s = Tower::new(&TowerSpec::sum(a, b)).unwrap();
        for n in 0..5 {
            let (x, y, z) = (ta.derived(&alpha, n).unwrap(), tb.derived(&alpha, n).unwrap(), s.derived(&alpha, n).unwrap());
            prop_assert_eq!(z.lattice, x.lattice.direct_sum(&y.lattice));
        }
    }

    #[test]
    fn ml_iff_length_zero(spec in constant_tower()) {
        let t = Tower::new(&spec).unwrap();
        let d = Depths { depth: 8, ..Depths::default() };
        let ml = verdict::mittag_leffler(&t, &d).unwrap();
        let len = verdict::ml_length(&t, &Ordinal::omega(), &d).unwrap();
        if ml.holds() {
            prop_assert_eq!(&len.length, &LengthBound::Exactly(Ordinal::zero()));
        }
        if ml.fails() {
            prop_assert!(len.length != LengthBound::Exactly(Ordinal::zero()));
        }
    }

    #[test]
    fn constant_towers_have_length_at_most_one(spec in constant_tower()) {
        let t = Tower::new(&spec).unwrap();
        let d = Depths { depth: 8, ..Depths::default() };
        let len = verdict::ml_length(&t, &Ordinal::omega(), &d).unwrap();
        prop_assert!(matches!(&len.length, LengthBound::Exactly(a) if *a <= Ordinal::nat(1)), "{:?}", len.length);
        prop_assert!(len.plain != Tri::No);
    }

    #[test]
    fn dual_of_constant_module_transposes(m in (1usize..=3).prop_flat_map(endo)) {
        prop_assume!(m.rank() == m.rows());
        let c = ColimSpec::constant(BaseRing::integers(), m.clone()).unwrap();
        let t = Tower::new(&dual_tower(&c).unwrap()).unwrap();
        prop_assert_eq!(t.bond(3), m.transpose());
    }

    #[test]
    fn fundamental_sequences(a in ordinal(), n in 0u64..20) {
        let f = a.fundamental(n);
        if a.is_limit() {
            prop_assert!(f < a);
            prop_assert!(f < a.fundamental(n + 1));
        } else {
            prop_assert_eq!(f, a.clone());
        }
        prop_assert_eq!(a.to_string().parse::<Ordinal>().unwrap(), a);
    }

    #[test]
    fn ordinal_addition(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert!(a.add(&b) >= b);
        if !b.is_zero() {
            prop_assert!(a.add(&b) > a);
        }
    }
}
