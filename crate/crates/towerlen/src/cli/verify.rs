//! Seeded verification suites. Every suite is deterministic in its
//! configuration and reports one entry per check with its evidence.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactlin::eventual::image_chain;
use crate::exactlin::hnf::is_canonical_hnf;
use crate::exactlin::lattice::span_i64;
use crate::exactlin::poly::charpoly;
use crate::exactlin::{eventual_image, hnf, snf, BaseRing, Matrix};
use crate::modcolim::sigma::partial_dual_consistent;
use crate::modcolim::xi::xi_checks;
use crate::modcolim::{
    coreduced_check, dual_tower, gap_module, is_projective, r_projective_length, sigma_partial, tree_length_certificate,
    xi_module, ColimSpec, PAdicDigits,
};
use crate::ordinals::{Ordinal, FUNDAMENTAL_RULE};
use crate::towers::fishbone::{example_length_three, example_length_two};
use crate::towers::verdict::{self, LengthBound};
use crate::towers::{fishbone_verify, Depths, Level, Tail, Tower, TowerSpec, Tri, Verdict};
use crate::trees::finite::rank_by_recursion;
use crate::trees::game::equivalence_failures;
use crate::trees::{FiniteTree, GameSpec, IndexTree};

pub const SUITES: [&str; 8] = ["linalg", "ordinals", "trees", "towers", "fishbone", "ext", "xi", "sigma"];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Acceptance criterion this check belongs to, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
    pub pass: bool,
    pub evidence: Value,
}

fn check(name: &str, criterion: Option<u8>, pass: bool, evidence: Value) -> Check {
    Check { name: name.to_string(), criterion, pass, evidence }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub depth: usize,
    pub alpha: Option<String>,
    pub rule: &'static str,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub total: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyConfig {
    pub seed: u64,
    pub depth: Option<usize>,
    pub alpha: Option<Ordinal>,
}

fn default_depth(suite: &str) -> usize {
    match suite {
        "towers" => 12,
        "fishbone" => 8,
        "sigma" => 10,
        _ => 16,
    }
}

pub fn run_suite(suite: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let depth = cfg.depth.unwrap_or_else(|| default_depth(suite));
    let checks = match suite {
        "linalg" => linalg(cfg.seed)?,
        "ordinals" => ordinals(cfg.seed),
        "trees" => trees(cfg.seed)?,
        "towers" => towers(depth)?,
        "fishbone" => fishbone(depth, cfg.alpha.as_ref())?,
        "ext" => ext(cfg.seed, depth)?,
        "xi" => xi(cfg.seed, depth)?,
        "sigma" => sigma(cfg.seed, depth)?,
        other => return Err(Error::Parse(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    };
    let passed = checks.iter().filter(|c| c.pass).count();
    Ok(SuiteReport {
        suite: suite.to_string(),
        seed: cfg.seed,
        depth,
        alpha: cfg.alpha.as_ref().map(|a| a.to_string()),
        rule: FUNDAMENTAL_RULE,
        total: checks.len(),
        pass: passed == checks.len(),
        passed,
        checks,
    })
}

/// Counts failures over a sample and keeps the first failing index.
#[derive(Default)]
struct Tally {
    samples: usize,
    failures: usize,
    first: Option<usize>,
}

impl Tally {
    fn record(&mut self, i: usize, ok: bool) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
            self.first.get_or_insert(i);
        }
    }

    fn into_check(self, name: &str, criterion: u8) -> Check {
        check(
            name,
            Some(criterion),
            self.failures == 0 && self.samples > 0,
            json!({"samples": self.samples, "failures": self.failures, "first_failure": self.first}),
        )
    }
}

/// A stabilizing chain ends in a lattice on which `m` is invertible, so the
/// lowest nonzero coefficient of the characteristic polynomial is a unit.
fn may_stabilize(m: &Matrix) -> bool {
    charpoly(m).iter().find(|c| !c.is_zero()).is_some_and(|c| c.abs().is_one())
}

fn linalg(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut unimod, mut canon, mut transform, mut chain, mut gcd, mut det) =
        (Tally::default(), Tally::default(), Tally::default(), Tally::default(), Tally::default(), Tally::default());
    for i in 0..1000 {
        let r = rng.gen_range(1..=6);
        let c = rng.gen_range(1..=6);
        let v: Vec<i64> = (0..r * c).map(|_| rng.gen_range(-99..=99)).collect();
        let m = Matrix::from_vec_i64(r, c, &v);
        let (h, u) = hnf(&m);
        unimod.record(i, u.det()?.abs().is_one() && u.mul(&m)? == h);
        canon.record(i, is_canonical_hnf(&h));
        let s = snf(&m);
        transform.record(i, s.u.mul(&m)?.mul(&s.v)? == s.s && s.v.mul(&s.vinv)?.is_identity());
        let inv = s.invariants();
        chain.record(i, inv.iter().all(|d| d.is_positive()) && inv.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        if !m.is_zero() {
            gcd.record(i, inv[0] == m.content());
        }
        if r == c {
            let dm = m.det()?;
            if !dm.is_zero() {
                det.record(i, inv.iter().product::<BigInt>() == dm.abs());
            }
        }
    }
    let mut out = vec![
        unimod.into_check("hnf_transform_is_unimodular", 1),
        canon.into_check("hnf_is_canonical", 1),
        transform.into_check("snf_transform", 1),
        chain.into_check("snf_divisibility_chain", 1),
        gcd.into_check("snf_first_invariant_is_gcd", 1),
        det.into_check("snf_product_is_abs_det", 1),
    ];
    let z = BaseRing::integers();
    let (mut agree, mut stable) = (Tally::default(), Tally::default());
    let (mut attempts, mut proper) = (0, 0);
    while agree.samples < 200 && attempts < 100_000 {
        attempts += 1;
        let v: Vec<i64> = (0..9).map(|_| rng.gen_range(-3..=3)).collect();
        let m = Matrix::from_vec_i64(3, 3, &v);
        if !may_stabilize(&m) {
            continue;
        }
        let ch = image_chain(&m, &z, 40);
        if ch[39] != ch[40] {
            continue;
        }
        let ei = eventual_image(&m, &z)?;
        let i = agree.samples;
        proper += usize::from(!ei.is_full());
        agree.record(i, ei == ch[40]);
        stable.record(i, ei.image(&m, &z)? == ei);
    }
    let found = agree.samples;
    let mut c = agree.into_check("eventual_image_matches_stabilized_chain", 2);
    c.pass &= found == 200;
    c.evidence["attempts"] = json!(attempts);
    c.evidence["proper_images"] = json!(proper);
    out.push(c);
    out.push(stable.into_check("eventual_image_is_stable", 2));
    let d = eventual_image(&Matrix::from_i64(&[&[2, 0], &[0, 1]]), &z)?;
    out.push(check("eventual_image_diag_2_1", Some(2), d == span_i64(&[&[0, 1]]), json!({"lattice": d})));
    Ok(out)
}

fn random_ordinal(rng: &mut ChaCha8Rng) -> Ordinal {
    let k = rng.gen_range(0..=3);
    let mut exps: Vec<u32> = (0..k).map(|_| rng.gen_range(0..5)).collect();
    exps.sort_unstable_by(|a, b| b.cmp(a));
    exps.dedup();
    Ordinal::from_terms(exps.into_iter().map(|e| (e, rng.gen_range(1..4))).collect()).expect("normal form")
}

fn ordinals(seed: u64) -> Vec<Check> {
    let o = |s: &str| s.parse::<Ordinal>().expect("literal");
    let mut out = Vec::new();
    let f = o("w^2").fundamental(2);
    out.push(check("fundamental_w2_at_2", None, f == o("w*3+1"), json!({"value": f.to_string()})));
    let mut seqs = Tally::default();
    for (i, s) in ["w", "w*2", "w^2", "w^2+w", "w^3*2", "w^4+w^2*3+w"].iter().enumerate() {
        let lam = o(s);
        let seq: Vec<Ordinal> = (0..8).map(|n| lam.fundamental(n)).collect();
        let ok = seq.windows(2).all(|w| w[0] < w[1]) && seq.iter().all(|x| *x < lam) && Ordinal::limit_of(&seq) == Some(lam.clone());
        seqs.record(i, ok);
    }
    out.push(seqs.into_check("fundamental_sequences_converge", 0));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut round, mut order) = (Tally::default(), Tally::default());
    for i in 0..500 {
        let a = random_ordinal(&mut rng);
        let b = random_ordinal(&mut rng);
        round.record(i, a.to_string().parse::<Ordinal>().ok() == Some(a.clone()));
        let s = a.add(&b);
        order.record(i, a < a.succ() && s >= a && (b.is_zero() || s > a || s == a) && a.fundamental(3) <= a);
    }
    out.push(round.into_check("parse_display_round_trip", 0));
    out.push(order.into_check("order_is_compatible_with_addition", 0));
    for c in &mut out {
        if c.criterion == Some(0) {
            c.criterion = None;
        }
    }
    out
}

fn trees(seed: u64) -> Result<Vec<Check>> {
    let o = |s: &str| s.parse::<Ordinal>().expect("literal");
    let mut out = Vec::new();
    let mut ranks = Vec::new();
    let mut ok = true;
    for s in ["1", "2", "3", "w+1"] {
        let r = IndexTree::new(o(s), true)?.rank()?;
        ok &= r == o(s);
        ranks.push(json!({"alpha": s, "rank": r.to_string()}));
    }
    out.push(check("index_tree_ranks", Some(5), ok, json!(ranks)));
    let t2 = IndexTree::new(o("2"), true)?;
    let root = t2.linearize(&[])?;
    let leaves: Vec<Ordinal> = (0..10).map(|n| t2.linearize(&[n])).collect::<Result<_>>()?;
    let ok = root == Ordinal::omega() && leaves.iter().enumerate().all(|(n, l)| *l == Ordinal::nat(n as u64 + 1));
    out.push(check(
        "linearize_i2",
        Some(5),
        ok,
        json!({"root": root.to_string(), "leaves": leaves.iter().map(|l| l.to_string()).collect::<Vec<_>>()}),
    ));
    let t3 = IndexTree::new(o("3"), true)?;
    let nodes = t3.materialize(5, 3)?;
    let mut terminal = 0;
    let mut ok = true;
    for (addr, _) in &nodes {
        if t3.is_terminal(addr)? {
            terminal += 1;
            ok &= t3.linearize(addr)?.is_successor();
        }
    }
    out.push(check("i3_terminal_nodes_are_successors", Some(5), ok && terminal > 0, json!({"terminal_nodes": terminal})));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disagreeing = Vec::new();
    let (mut oracle, mut one_way) = (Tally::default(), Tally::default());
    for i in 0..100 {
        let size = rng.gen_range(1..=200);
        let t = FiniteTree::random(&mut rng, size);
        oracle.record(i, t.rank() == rank_by_recursion(&t));
        let g = GameSpec::new(t.clone()).ranks().rank;
        one_way.record(i, g <= t.rank());
        let f = equivalence_failures(&t, 10);
        if !f.is_empty() {
            disagreeing.push(json!({"tree": i, "size": size, "game_rank": g, "tree_rank": t.rank(), "alphas": f.iter().map(|d| d.alpha).collect::<Vec<_>>()}));
        }
    }
    out.push(oracle.into_check("tree_rank_matches_recursion", 6));
    out.push(one_way.into_check("game_rank_at_most_tree_rank", 6));
    out.push(check(
        "game_rank_equivalence",
        Some(6),
        disagreeing.is_empty(),
        json!({"trees": 100, "max_alpha": 10, "disagreeing_trees": disagreeing.len(), "first": disagreeing.first()}),
    ));
    Ok(out)
}

fn tower_family() -> Vec<(&'static str, TowerSpec)> {
    let z = BaseRing::integers();
    vec![
        ("x2", TowerSpec::scalar(2)),
        ("diag_2_1", TowerSpec::constant(z.clone(), Matrix::from_i64(&[&[2, 0], &[0, 1]]))),
        ("upper_2_1_3", TowerSpec::constant(z.clone(), Matrix::from_i64(&[&[2, 1], &[0, 3]]))),
        (
            "prefixed_x3",
            TowerSpec {
                ring: z.clone(),
                prefix: vec![Level { dim: 1, bond: Matrix::from_i64(&[&[1, 1]]) }],
                tail: Tail::Constant { dim: 2, bond: Matrix::from_i64(&[&[3, 0], &[0, 3]]) },
            },
        ),
        ("projections", TowerSpec { ring: z, prefix: vec![], tail: Tail::Projections { start_dim: 1 } }),
        ("fishbone_2", example_length_two()),
    ]
}

fn towers(depth: usize) -> Result<Vec<Check>> {
    let d = Depths { depth, ..Depths::default() };
    let mut out = Vec::new();
    let xp = Tower::new(&TowerSpec::scalar(3))?;
    let ml = verdict::mittag_leffler(&xp, &d)?;
    let witnessed = matches!(&ml, Verdict::Fails { witness, .. } if !witness.data.is_null());
    out.push(check("xp_not_mittag_leffler", Some(3), witnessed, serde_json::to_value(&ml).expect("json")));
    let len = verdict::ml_length(&xp, &Ordinal::omega(), &d)?;
    out.push(check(
        "xp_length_one_plain",
        Some(3),
        len.length == LengthBound::Exactly(Ordinal::nat(1)) && len.plain == Tri::Yes,
        serde_json::to_value(&len).expect("json"),
    ));
    let id = Tower::new(&TowerSpec::constant(BaseRing::integers(), Matrix::identity(2)))?;
    let red = verdict::reduce(&id, &d)?;
    out.push(check("reduce_identity_is_zero", Some(3), red.is_zero, json!({"is_zero": red.is_zero, "note": red.note})));

    let fam = tower_family();
    let alphas = [Ordinal::nat(1), Ordinal::nat(2), Ordinal::omega(), Ordinal::omega().succ()];
    let mut pairs = Vec::new();
    for i in 0..fam.len() {
        pairs.push((i, i));
        pairs.push((i, (i + 1) % fam.len()));
    }
    let mut tally = Tally::default();
    let mut failures = Vec::new();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let a = Tower::new(&fam[i].1)?;
        let b = Tower::new(&fam[j].1)?;
        let s = Tower::new(&TowerSpec::sum(fam[i].1.clone(), fam[j].1.clone()))?;
        let mut ok = true;
        for alpha in &alphas {
            for n in 0..=depth {
                let (x, y, z) = (a.derived(alpha, n)?, b.derived(alpha, n)?, s.derived(alpha, n)?);
                let good = z.lattice == x.lattice.direct_sum(&y.lattice) && z.exactness == x.exactness.join(y.exactness);
                if !good && ok {
                    failures.push(json!({"left": fam[i].0, "right": fam[j].0, "alpha": alpha.to_string(), "level": n}));
                }
                ok &= good;
            }
        }
        tally.record(k, ok);
    }
    let mut c = tally.into_check("sum_is_levelwise_direct_sum", 3);
    c.evidence["alphas"] = json!(alphas.iter().map(|a| a.to_string()).collect::<Vec<_>>());
    c.evidence["depth"] = json!(depth);
    c.evidence["mismatches"] = json!(failures);
    out.push(c);
    Ok(out)
}

fn fishbone(depth: usize, alpha: Option<&Ordinal>) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (name, spec, len) in [("length_two", example_length_two(), 2u64), ("length_three", example_length_three(), 3)] {
        let betas: Vec<Ordinal> = (0..len).map(Ordinal::nat).filter(|b| alpha.is_none_or(|a| b <= a)).collect();
        let r = fishbone_verify(&spec, &betas, depth)?;
        let bad: Vec<&_> = r.checks.iter().filter(|c| !c.matches).collect();
        out.push(check(
            &format!("closed_form_{name}"),
            Some(4),
            r.straight && r.matched == r.total && r.total > 0,
            json!({
                "length": r.length.as_ref().map(|l| l.to_string()),
                "betas": betas.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                "levels": depth,
                "matched": r.matched,
                "total": r.total,
                "horizons": r.horizons,
                "mismatches": serde_json::to_value(&bad).expect("json"),
            }),
        ));
    }
    Ok(out)
}

fn tri_ok(v: &Verdict) -> &'static str {
    match v {
        Verdict::Holds { .. } => "holds",
        Verdict::Fails { .. } => "fails",
        Verdict::Unknown { .. } => "unknown",
    }
}

fn ext(seed: u64, depth: usize) -> Result<Vec<Check>> {
    let d = Depths { depth, ..Depths::default() };
    let w = Ordinal::omega();
    let mut out = Vec::new();
    for p in [2i64, 3, 5] {
        let c = ColimSpec::localization(p);
        let r = r_projective_length(&c, &w, &d)?;
        let ok = r.projective == Tri::No && r.r_projective_length == LengthBound::Exactly(Ordinal::nat(1)) && r.plain == Tri::Yes && r.scope.is_exact();
        out.push(check(&format!("z_localized_at_{p}"), Some(7), ok, serde_json::to_value(&r).expect("json")));
    }
    let split = ColimSpec::split_inclusions(BaseRing::integers(), 1);
    let v = is_projective(&split, &d)?;
    out.push(check("split_inclusions_projective", Some(7), v.holds() && v.scope().is_some_and(|s| s.is_exact()), json!({"verdict": tri_ok(&v)})));
    let digits = PAdicDigits::random(3, 64, seed)?;
    let xi = xi_module(&digits, 63)?;
    let core = coreduced_check(&xi, &d)?;
    let r = r_projective_length(&xi, &w, &d)?;
    let wp = xi_checks(&digits, 63)?;
    let ok = core.holds() && r.r_projective_length == LengthBound::Exactly(Ordinal::nat(1)) && r.plain == Tri::Yes && wp.iter().all(|c| c.well_pointed);
    out.push(check(
        "xi_coreduced_plain_length_one",
        Some(7),
        ok,
        json!({"digits": digits, "coreduced": tri_ok(&core), "report": r, "well_pointed_stages": wp.iter().filter(|c| c.well_pointed).count()}),
    ));
    let m = gap_module(&digits, 32)?;
    let tree = tree_length_certificate(&m)?;
    let r = r_projective_length(&m, &w, &d)?;
    let ok = tree == Ordinal::nat(2) && r.r_projective_length == LengthBound::Exactly(Ordinal::nat(1)) && r.plain == Tri::No;
    out.push(check(
        "gap_module",
        Some(8),
        ok,
        json!({"stages": 32, "tree_length_certificate": tree.to_string(), "report": r}),
    ));
    Ok(out)
}

fn xi(seed: u64, depth: usize) -> Result<Vec<Check>> {
    let d = Depths { depth, ..Depths::default() };
    let mut out = Vec::new();
    for p in [3u64, 5] {
        for s in seed..seed + 2 {
            let digits = PAdicDigits::random(p, 64, s)?;
            let checks = xi_checks(&digits, 63)?;
            let c = xi_module(&digits, 63)?;
            let dual = dual_tower(&c)?;
            let Tail::Truncated { levels, .. } = &dual.tail else {
                return Err(Error::Inexact("the dual of a stage-limited module is truncated".into()));
            };
            let bonds_ok = levels.iter().enumerate().all(|(n, l)| {
                let cp = digits.carry(n) * BigInt::from(p);
                l.bond == Matrix::from_rows(vec![vec![BigInt::one(), BigInt::zero()], vec![cp, BigInt::from(p)]], 2).expect("2x2")
            });
            let core = coreduced_check(&c, &d)?;
            let r = r_projective_length(&c, &Ordinal::omega(), &d)?;
            let ok = checks.iter().all(|x| x.relation && x.transition && x.well_pointed)
                && bonds_ok
                && core.holds()
                && r.r_projective_length == LengthBound::Exactly(Ordinal::nat(1))
                && r.plain == Tri::Yes;
            out.push(check(
                &format!("xi_p{p}_seed{s}"),
                None,
                ok,
                json!({"stages": 63, "relation_and_transitions": checks.iter().all(|x| x.relation && x.transition),
                       "well_pointed": checks.iter().all(|x| x.well_pointed), "dual_bonds": bonds_ok,
                       "coreduced": tri_ok(&core), "length": r.r_projective_length, "plain": r.plain}),
            ));
        }
    }
    Ok(out)
}

fn sigma(seed: u64, depth: usize) -> Result<Vec<Check>> {
    let d = Depths { depth, ..Depths::default() };
    let digits = PAdicDigits::random(3, 64, seed)?;
    let ring = BaseRing::local_at(3)?;
    let xi = xi_module(&digits, 63)?;
    let m = gap_module(&digits, 32)?;
    let loc = ColimSpec::constant(ring.clone(), Matrix::from_i64(&[&[3]]))?;
    let modules = vec![
        ("zero", ColimSpec::finite(ring.clone(), 0)),
        ("z_localized", loc.clone()),
        ("xi", xi.clone()),
        ("gap_module", m.clone()),
        ("z_localized_plus_gap_module", ColimSpec::direct_sum(loc, m)?),
        ("xi_plus_xi", ColimSpec::direct_sum(xi.clone(), xi)?),
    ];
    let mut out = Vec::new();
    for (name, c) in modules {
        let s = sigma_partial(&c, &Ordinal::nat(1), &d)?;
        let bonds = partial_dual_consistent(&s, &c)?;
        let levels_match = s.levels.iter().all(|l| l.dual_matches);
        let mut ok = s.consistent == Tri::Yes && bonds && s.injective_transitions && levels_match;
        if name.starts_with("xi") {
            ok &= (0..=s.levels.len() - 1).all(|n| s.partial.rank(n) == Ok(0));
        }
        out.push(check(
            &format!("partial_one_{name}"),
            Some(9),
            ok,
            json!({
                "depth": s.levels.len() - 1,
                "levels_match": levels_match,
                "bonds_match": bonds,
                "partial_ranks": s.levels.iter().map(|l| l.rank - l.sigma.rank()).collect::<Vec<_>>(),
                "derived_ranks": s.levels.iter().map(|l| l.derived_rank).collect::<Vec<_>>(),
                "scope": s.scope,
            }),
        ));
    }
    Ok(out)
}
