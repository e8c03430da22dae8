use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use super::verify::{run_suite, VerifyConfig};
use super::{base_config, read_input, Cli, Cmd, Config, LinCmd, ModCmd, Opts, OrdCmd, Outcome, TowerCmd, TreeCmd};
use crate::error::{Error, Result};
use crate::exactlin::{eventual_image, hnf, snf, BaseRing, Lattice, Matrix};
use crate::modcolim::sigma::partial_dual_consistent;
use crate::modcolim::wedge::wedge_sum_with_purity;
use crate::modcolim::xi::xi_checks;
use crate::modcolim::{
    coreduced_check, dual_tower, gap_module, is_projective, phantom_resolution, r_projective_length, sigma_partial,
    tree_length_certificate, xi_module, ColimSpec, PAdicDigits,
};
use crate::ordinals::Ordinal;
use crate::towers::verdict::{self, length_hint};
use crate::towers::{fishbone_build, fishbone_verify, Depths, Tower, TowerSpec};
use crate::trees::game::equivalence_failures;
use crate::trees::{FiniteTree, GameSpec, IndexTree};

fn parse_doc<T: DeserializeOwned>(input: &str, what: &str) -> Result<T> {
    serde_json::from_str(&read_input(input)?).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn ordinal(s: &str) -> Result<Ordinal> {
    s.parse()
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn ok(result: Value) -> Result<Outcome> {
    Ok(Outcome { result, ok: true })
}

/// A matrix, optionally with the ring it is read over.
#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixDoc {
    WithRing {
        matrix: Matrix,
        #[serde(default)]
        ring: BaseRing,
    },
    Bare(Matrix),
}

impl MatrixDoc {
    fn split(self) -> (Matrix, BaseRing) {
        match self {
            MatrixDoc::WithRing { matrix, ring } => (matrix, ring),
            MatrixDoc::Bare(m) => (m, BaseRing::integers()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LatticeDoc {
    WithRing {
        lattice: Lattice,
        #[serde(default)]
        ring: BaseRing,
    },
    Bare(Lattice),
}

#[derive(Deserialize)]
struct PairDoc {
    left: Lattice,
    right: Lattice,
    #[serde(default)]
    ring: BaseRing,
}

#[derive(Deserialize)]
struct FishboneDoc {
    spine: TowerSpec,
    ribs: Vec<TowerSpec>,
    #[serde(default = "yes")]
    check_straight: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WedgeDoc {
    Gap { gap_module: PAdicDigits, stages: usize },
    General { m1: usize, arms: Vec<ColimSpec>, psi: Vec<Matrix>, stages: usize },
}

fn over(l: &Lattice, ring: &BaseRing) -> Lattice {
    Lattice::from_generators(l.basis(), ring)
}

fn node_key(n: &[impl ToString]) -> String {
    n.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn address(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad address component {x:?}"))))
        .collect()
}

fn depths(opts: &Opts, depth: usize) -> Depths {
    Depths { depth, horizon: opts.horizon, height_bits: opts.height_bits }
}

fn tower(input: &str) -> Result<Tower> {
    let spec: TowerSpec = parse_doc(input, "tower")?;
    Tower::new(&spec)
}

fn module(input: &str) -> Result<ColimSpec> {
    ColimSpec::from_json(&read_input(input)?)
}

pub(super) fn dispatch(cli: &Cli) -> Result<(String, Config, Outcome)> {
    let o = &cli.opts;
    let max_alpha = ordinal(&o.max_alpha)?;
    let alpha_or = |d: &str| o.alpha.clone().unwrap_or_else(|| d.to_string());
    let depth_or = |d: usize| o.depth.unwrap_or(d);
    let mut cfg = base_config(o, depth_or(16), &alpha_or("1"));
    let (name, out) = match &cli.cmd {
        Cmd::Lin(c) => {
            cfg.ring = Some(BaseRing::integers().describe());
            match c {
                LinCmd::Hnf { input } => {
                    let (m, _) = parse_doc::<MatrixDoc>(input, "matrix")?.split();
                    let (h, u) = hnf(&m);
                    ("lin hnf", ok(json!({"hnf": h, "transform": u, "rank": m.rank()})))
                }
                LinCmd::Snf { input } => {
                    let (m, _) = parse_doc::<MatrixDoc>(input, "matrix")?.split();
                    let s = snf(&m);
                    let inv: Vec<String> = s.invariants().iter().map(|x| x.to_string()).collect();
                    ("lin snf", ok(json!({"snf": s.s, "left": s.u, "right": s.v, "right_inverse": s.vinv, "invariants": inv})))
                }
                LinCmd::Meet { input } | LinCmd::Join { input } => {
                    let d: PairDoc = parse_doc(input, "lattice pair")?;
                    cfg.ring = Some(d.ring.describe());
                    let (l, r) = (over(&d.left, &d.ring), over(&d.right, &d.ring));
                    if matches!(c, LinCmd::Meet { .. }) {
                        ("lin meet", ok(json!({"lattice": l.intersection(&r, &d.ring)?})))
                    } else {
                        ("lin join", ok(json!({"lattice": l.sum(&r, &d.ring)?})))
                    }
                }
                LinCmd::Saturate { input } => {
                    let (l, ring) = match parse_doc::<LatticeDoc>(input, "lattice")? {
                        LatticeDoc::WithRing { lattice, ring } => (over(&lattice, &ring), ring),
                        LatticeDoc::Bare(l) => (l, BaseRing::integers()),
                    };
                    cfg.ring = Some(ring.describe());
                    let s = l.saturate();
                    ("lin saturate", ok(json!({"lattice": s, "was_saturated": l.is_saturated()})))
                }
                LinCmd::EventualImage { input } => {
                    let (m, ring) = parse_doc::<MatrixDoc>(input, "matrix")?.split();
                    cfg.ring = Some(ring.describe());
                    let l = eventual_image(&m, &ring)?;
                    ("lin eventual-image", ok(json!({"lattice": l, "rank": l.rank()})))
                }
            }
        }
        Cmd::Ord(c) => match c {
            OrdCmd::Fundamental { alpha, n } => {
                let a = ordinal(alpha)?;
                cfg.alpha = a.to_string();
                let v = a.fundamental(*n);
                ("ord fundamental", ok(json!({"alpha": a.to_string(), "n": n, "value": v.to_string(), "limit": a.is_limit()})))
            }
            OrdCmd::Compare { left, right } => {
                let (a, b) = (ordinal(left)?, ordinal(right)?);
                let ord = match a.cmp(&b) {
                    std::cmp::Ordering::Less => "<",
                    std::cmp::Ordering::Equal => "=",
                    std::cmp::Ordering::Greater => ">",
                };
                ("ord compare", ok(json!({"left": a.to_string(), "right": b.to_string(), "order": ord})))
            }
        },
        Cmd::Tree(c) => match c {
            TreeCmd::Rank { input } => {
                let t: FiniteTree = parse_doc(input, "tree")?;
                let ranks: BTreeMap<String, u64> = t.node_ranks().iter().map(|(k, v)| (node_key(k), *v)).collect();
                ("tree rank", ok(json!({"size": t.len(), "rank": t.rank(), "node_ranks": ranks})))
            }
            TreeCmd::Index { alpha, forest } => {
                cfg.alpha = alpha.clone();
                cfg.depth = depth_or(3);
                let t = IndexTree::new(ordinal(alpha)?, !forest)?;
                let nodes: Vec<Value> = t
                    .materialize(o.breadth as u64, cfg.depth)?
                    .into_iter()
                    .map(|(a, l)| json!({"address": node_key(&a), "label": l.to_string()}))
                    .collect();
                ("tree index", ok(json!({"plain": !forest, "rank": t.rank()?.to_string(), "nodes": nodes})))
            }
            TreeCmd::Linearize { alpha, address: addr, forest } => {
                cfg.alpha = alpha.clone();
                let t = IndexTree::new(ordinal(alpha)?, !forest)?;
                let a = address(addr)?;
                let label = t.linearize(&a)?;
                (
                    "tree linearize",
                    ok(json!({"address": node_key(&a), "label": label.to_string(), "terminal": t.is_terminal(&a)?})),
                )
            }
            TreeCmd::Game { input } => {
                let t: FiniteTree = parse_doc(input, "tree")?;
                let g = GameSpec::new(t.clone()).ranks();
                let max = max_alpha.as_nat().unwrap_or(t.rank() + 2);
                let fails = equivalence_failures(&t, max);
                (
                    "tree game",
                    ok(json!({"game_rank": g.rank, "tree_rank": t.rank(), "checked_up_to": max, "disagreements": fails, "sigma": g.sigma, "pi": g.pi})),
                )
            }
        },
        Cmd::Tower(c) => {
            let d = depths(o, cfg.depth);
            match c {
                TowerCmd::Derive { input } => {
                    let t = tower(input)?;
                    cfg.ring = Some(t.ring().describe());
                    let a = alpha_or("1");
                    let r = if a == "inf" {
                        verdict::chain_support(&t, d.depth)?
                    } else {
                        verdict::derived_tower(&t, &ordinal(&a)?, d.depth)?
                    };
                    ("tower derive", ok(to_value(&r)))
                }
                TowerCmd::Length { input } => {
                    let t = tower(input)?;
                    cfg.ring = Some(t.ring().describe());
                    ("tower length", ok(to_value(&verdict::ml_length(&t, &max_alpha, &d)?)))
                }
                TowerCmd::Ml { input } => {
                    let t = tower(input)?;
                    cfg.ring = Some(t.ring().describe());
                    ("tower ml", ok(to_value(&verdict::mittag_leffler(&t, &d)?)))
                }
                TowerCmd::FishboneBuild { input } => {
                    let f: FishboneDoc = parse_doc(input, "fishbone")?;
                    cfg.ring = Some(f.spine.ring.describe());
                    let (spec, rep) = fishbone_build(&f.spine, &f.ribs, f.check_straight, &d)?;
                    ("tower fishbone-build", ok(json!({"tower": spec, "straightness": rep})))
                }
                TowerCmd::FishboneVerify { input } => {
                    let spec: TowerSpec = parse_doc(input, "tower")?;
                    let t = Tower::new(&spec)?;
                    cfg.ring = Some(t.ring().describe());
                    cfg.depth = depth_or(8);
                    let cap = match (&o.alpha, length_hint(&t).and_then(|l| l.as_nat())) {
                        (Some(a), l) => {
                            let a = ordinal(a)?.as_nat().ok_or_else(|| Error::Precondition("--alpha must be finite here".into()))?;
                            l.map_or(a + 1, |l| l.min(a + 1))
                        }
                        (None, Some(l)) => l,
                        (None, None) => {
                            return Err(Error::Precondition("no finite length is known; give --alpha".into()));
                        }
                    };
                    let betas: Vec<Ordinal> = (0..cap).map(Ordinal::nat).collect();
                    let r = fishbone_verify(&spec, &betas, cfg.depth)?;
                    let good = r.matched == r.total;
                    ("tower fishbone-verify", Ok(Outcome { result: to_value(&r), ok: good }))
                }
                TowerCmd::Reduce { input } => {
                    let t = tower(input)?;
                    cfg.ring = Some(t.ring().describe());
                    ("tower reduce", ok(to_value(&verdict::reduce(&t, &d)?)))
                }
            }
        }
        Cmd::Mod(c) => {
            let d = depths(o, cfg.depth);
            match c {
                ModCmd::Dual { input } => {
                    let m = module(input)?;
                    cfg.ring = Some(m.ring.describe());
                    ("mod dual", ok(json!({"tower": dual_tower(&m)?})))
                }
                ModCmd::Projective { input } => {
                    let m = module(input)?;
                    cfg.ring = Some(m.ring.describe());
                    ("mod projective", ok(to_value(&is_projective(&m, &d)?)))
                }
                ModCmd::Length { input } => {
                    let m = module(input)?;
                    cfg.ring = Some(m.ring.describe());
                    let tree = tree_length_certificate(&m).ok().map(|t| t.to_string());
                    let mut r = to_value(&r_projective_length(&m, &max_alpha, &d)?);
                    r["tree_length_certificate"] = json!(tree);
                    ("mod length", ok(r))
                }
                ModCmd::Xi { input, prime, stages } => {
                    let digits = match input {
                        Some(i) => PAdicDigits::from_json(&read_input(i)?)?,
                        None => PAdicDigits::random(*prime, stages + 1, o.seed)?,
                    };
                    let m = xi_module(&digits, *stages)?;
                    cfg.ring = Some(m.ring.describe());
                    let checks = xi_checks(&digits, *stages)?;
                    let all = checks.iter().all(|c| c.relation && c.transition && c.well_pointed);
                    let core = coreduced_check(&m, &d)?;
                    let len = r_projective_length(&m, &max_alpha, &d)?;
                    (
                        "mod xi",
                        Ok(Outcome {
                            result: json!({"digits": digits, "module": m, "checks": checks, "all_checks_pass": all, "coreduced": core, "length": len}),
                            ok: all,
                        }),
                    )
                }
                ModCmd::Wedge { input } => {
                    let (m, purity) = match parse_doc::<WedgeDoc>(input, "wedge")? {
                        WedgeDoc::Gap { gap_module: g, stages } => (gap_module(&g, stages)?, None),
                        WedgeDoc::General { m1, arms, psi, stages } => {
                            let (w, p) = wedge_sum_with_purity(m1, &arms, &psi, stages)?;
                            (w, Some(p))
                        }
                    };
                    cfg.ring = Some(m.ring.describe());
                    let tree = tree_length_certificate(&m).ok().map(|t| t.to_string());
                    let ranks: Vec<usize> = (0..=m.known_stages().unwrap_or(cfg.depth)).map(|n| m.rank(n)).collect::<Result<_>>()?;
                    ("mod wedge", ok(json!({"module": m, "purity": purity, "ranks": ranks, "tree_length_certificate": tree})))
                }
                ModCmd::SigmaPartial { input } => {
                    let m = module(input)?;
                    cfg.ring = Some(m.ring.describe());
                    let a = ordinal(&alpha_or("1"))?;
                    let s = sigma_partial(&m, &a, &d)?;
                    let bonds = partial_dual_consistent(&s, &m)?;
                    let mut r = to_value(&s);
                    r["dual_bonds_consistent"] = json!(bonds);
                    ("mod sigma-partial", ok(r))
                }
                ModCmd::Resolution { input } => {
                    let m = module(input)?;
                    cfg.ring = Some(m.ring.describe());
                    cfg.depth = depth_or(3);
                    let a = ordinal(&alpha_or("1"))?;
                    ("mod resolution", ok(to_value(&phantom_resolution(&m, &a, o.breadth, cfg.depth)?)))
                }
            }
        }
        Cmd::Verify { suite } => {
            let alpha = o.alpha.as_deref().map(ordinal).transpose()?;
            let r = run_suite(suite, &VerifyConfig { seed: o.seed, depth: o.depth, alpha })?;
            cfg.depth = r.depth;
            cfg.alpha = r.alpha.clone().unwrap_or_else(|| "none".into());
            let pass = r.pass;
            ("verify", Ok(Outcome { result: to_value(&r), ok: pass }))
        }
    };
    Ok((name.to_string(), cfg, out?))
}
