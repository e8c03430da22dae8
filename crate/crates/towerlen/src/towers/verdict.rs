//! Verdicts on towers: vanishing of derived towers, Mittag-Leffler,
//! essential monomorphy, lengths, reduction and the lim¹ kernel identity.

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use super::fishbone::Fish;
use super::tower::{Exactness, Kind, Pc, Tower};
use crate::error::{Error, Result};
use crate::exactlin::eventual::rational_eventual_rank;
use crate::exactlin::height::no_vector_within;
use crate::exactlin::{kernel, quotient_shape, Lattice, Matrix, QuotientShape};
use crate::ordinals::{Ordinal, FUNDAMENTAL_RULE};

/// Depth parameters shared by every truncated search.
#[derive(Clone, Debug, Serialize)]
pub struct Depths {
    /// Levels examined.
    pub depth: usize,
    /// How far past a level a search may look.
    pub horizon: usize,
    /// Vectors of norm at most `2^height_bits` count as visible in stage-limited towers.
    pub height_bits: u32,
}

impl Default for Depths {
    fn default() -> Self {
        Depths { depth: 16, horizon: 24, height_bits: 20 }
    }
}

impl Depths {
    pub fn height(&self) -> BigInt {
        BigInt::from(1) << self.height_bits
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum Scope {
    Exact,
    /// Valid for the tower as known up to this stage.
    ToStage(usize),
    /// Checked on levels up to this depth only.
    ToDepth(usize),
}

impl Scope {
    pub fn is_exact(self) -> bool {
        self == Scope::Exact
    }

    pub fn join(self, other: Scope) -> Scope {
        use Scope::*;
        match (self, other) {
            (ToDepth(a), ToDepth(b)) => ToDepth(a.min(b)),
            (ToDepth(a), _) | (_, ToDepth(a)) => ToDepth(a),
            (ToStage(a), ToStage(b)) => ToStage(a.min(b)),
            (ToStage(a), _) | (_, ToStage(a)) => ToStage(a),
            _ => Exact,
        }
    }

    fn from_exactness(e: Exactness) -> Scope {
        match e {
            Exactness::Exact => Scope::Exact,
            Exactness::ToStage(n) => Scope::ToStage(n),
            Exactness::LowerBoundOnly(n) => Scope::ToDepth(n),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub summary: String,
    pub data: Value,
}

fn ev(summary: impl Into<String>, data: Value) -> Evidence {
    Evidence { summary: summary.into(), data }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds { scope: Scope, certificate: Evidence },
    Fails { scope: Scope, witness: Evidence },
    Unknown { depth: usize, reason: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn scope(&self) -> Option<Scope> {
        match self {
            Verdict::Holds { scope, .. } | Verdict::Fails { scope, .. } => Some(*scope),
            Verdict::Unknown { .. } => None,
        }
    }

    pub fn summary(&self) -> String {
        match self {
            Verdict::Holds { certificate, .. } => format!("holds: {}", certificate.summary),
            Verdict::Fails { witness, .. } => format!("fails: {}", witness.summary),
            Verdict::Unknown { reason, .. } => format!("unknown: {reason}"),
        }
    }
}

/// Both sides must hold; a failure of either side is a failure.
fn both(a: Verdict, b: Verdict, depth: usize) -> Verdict {
    match (a, b) {
        (f @ Verdict::Fails { .. }, _) | (_, f @ Verdict::Fails { .. }) => f,
        (Verdict::Holds { scope: s, certificate: c }, Verdict::Holds { scope: t, certificate: d }) => Verdict::Holds {
            scope: s.join(t),
            certificate: ev(format!("left: {}; right: {}", c.summary, d.summary), json!([c.data, d.data])),
        },
        (Verdict::Unknown { reason, .. }, _) | (_, Verdict::Unknown { reason, .. }) => Verdict::Unknown { depth, reason },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

/// `A_β ≅ 0` modulo `A_∞`: every level's image from far enough up lies in `A_∞`.
pub fn vanishing(t: &Tower, beta: &Ordinal, d: &Depths) -> Result<Verdict> {
    match &t.kind {
        Kind::Pc(pc) => pc_vanishing(t, pc, beta, d),
        Kind::Sum(a, b) => Ok(both(vanishing(a, beta, d)?, vanishing(b, beta, d)?, d.depth)),
        Kind::Shift(inner, _) => vanishing(inner, beta, d),
        Kind::Fish(f) => fish_vanishing(t, f, beta, d),
    }
}

fn pc_vanishing(t: &Tower, pc: &Pc, beta: &Ordinal, d: &Depths) -> Result<Verdict> {
    let p = pc.prefix_len();
    if let Some(stage) = pc.stage() {
        return staged_vanishing(t, stage, beta, d);
    }
    if !beta.is_zero() {
        let r = t.a_inf(p)?.lattice.rank();
        return Ok(Verdict::Holds {
            scope: Scope::Exact,
            certificate: ev(
                format!("from level {p} on A_{beta} equals A_inf, which is carried onto A_inf at every lower level"),
                json!({"tail_level": p, "a_inf_rank": r}),
            ),
        });
    }
    let Some(m) = pc.constant_tail() else {
        return Ok(Verdict::Holds {
            scope: Scope::Exact,
            certificate: ev("the tail bonds are surjective", json!({"tail_level": p})),
        });
    };
    let d0 = m.rows();
    let ei = t.a_inf(p)?.lattice.rank();
    let q = rational_eventual_rank(m);
    if ei == q {
        return Ok(Verdict::Holds {
            scope: Scope::Exact,
            certificate: ev(
                format!("image chain at level {p} stabilizes from step {d0}: eventual image rank {ei} equals rational eventual rank {q}"),
                json!({"level": p, "stabilized_from": d0, "eventual_image_rank": ei, "rational_rank": q}),
            ),
        });
    }
    let ring = t.ring();
    let mut chain = Vec::new();
    let mut cur = Lattice::full(d0).image(&m.pow(d0 as u64), ring)?;
    for k in d0..d0 + 3 {
        let next = cur.image(m, ring)?;
        let s = quotient_shape(&cur, &next, ring)?;
        chain.push(json!({"k": k, "index": s}));
        cur = next;
    }
    Ok(Verdict::Fails {
        scope: Scope::Exact,
        witness: ev(
            format!("image chain at level {p} descends forever: eventual image rank {ei} < rational eventual rank {q}"),
            json!({"level": p, "eventual_image_rank": ei, "rational_rank": q, "descending_steps": chain}),
        ),
    })
}

/// Stage-limited towers: a lattice counts as zero when it has no vector of
/// norm at most the configured height at every examined level.
fn staged_vanishing(t: &Tower, stage: usize, beta: &Ordinal, d: &Depths) -> Result<Verdict> {
    let h = d.height();
    let top = d.depth.min(stage.saturating_sub(1));
    if beta.is_zero() {
        if let Some(v) = staged_stabilization(t, stage, top)? {
            return Ok(v);
        }
    }
    let reduced = (0..=top).map(|n| t.a_inf(n).map(|a| no_vector_within(&a.lattice, &h))).collect::<Result<Vec<_>>>()?;
    if !reduced.iter().all(|&b| b) {
        return Ok(Verdict::Unknown { depth: top, reason: "A_inf has short vectors within the known stages".into() });
    }
    if beta.is_zero() {
        let img = Lattice::full(t.dim(stage)).image(&t.compose(0, stage)?, t.ring())?;
        if !img.is_zero() {
            return Ok(Verdict::Fails {
                scope: Scope::ToStage(stage),
                witness: ev(
                    format!("the image of level {stage} in level 0 is nonzero"),
                    json!({"level": 0, "from": stage, "rank": img.rank()}),
                ),
            });
        }
        return Ok(Verdict::Holds {
            scope: Scope::ToStage(stage),
            certificate: ev(format!("level {stage} maps to zero in level 0"), json!({"from": stage})),
        });
    }
    for n in 0..=top {
        let l = t.derived(beta, n)?.lattice;
        if !no_vector_within(&l, &h) {
            return Ok(Verdict::Unknown { depth: top, reason: format!("A_{beta} has short vectors at level {n}") });
        }
    }
    Ok(Verdict::Holds {
        scope: Scope::ToStage(stage),
        certificate: ev(
            format!("A_{beta} has no vector of norm <= 2^{} at levels <= {top}", d.height_bits),
            json!({"levels": top, "height_bits": d.height_bits}),
        ),
    })
}

/// Mittag-Leffler within the known stages: at every level the images from
/// above stop changing by the midpoint between the level and the stage.
fn staged_stabilization(t: &Tower, stage: usize, top: usize) -> Result<Option<Verdict>> {
    let ring = t.ring();
    let mut from = Vec::new();
    for n in 0..=top {
        let last = Lattice::full(t.dim(stage)).image(&t.compose(n, stage)?, ring)?;
        let mid = n + (stage - n) / 2;
        let mut m = mid;
        if Lattice::full(t.dim(mid)).image(&t.compose(n, mid)?, ring)? != last {
            return Ok(None);
        }
        while m > n && Lattice::full(t.dim(m - 1)).image(&t.compose(n, m - 1)?, ring)? == last {
            m -= 1;
        }
        from.push(m);
    }
    Ok(Some(Verdict::Holds {
        scope: Scope::ToStage(stage),
        certificate: ev(
            format!("images at each level n <= {top} are constant from the listed level through stage {stage}"),
            json!({"stable_from": from}),
        ),
    }))
}

fn fish_vanishing(t: &Tower, f: &Fish, beta: &Ordinal, d: &Depths) -> Result<Verdict> {
    let st = f.straightness();
    let (Some(len), true) = (f.length_bound(), st.straight) else {
        return generic_vanishing(t, beta, d);
    };
    if *beta >= len {
        return Ok(Verdict::Holds {
            scope: Scope::Exact,
            certificate: ev(
                format!("straight fishbone of length {len}"),
                json!({"length": len.to_string(), "rib_lengths": st.rib_plain_lengths.iter().map(|o| o.as_ref().map(|x| x.to_string())).collect::<Vec<_>>()}),
            ),
        });
    }
    let spine = f.spine();
    let spine_mono = matches!(is_monomorphic(spine, d)?, (true, Scope::Exact));
    let spine_a1 = spine.level(&Ordinal::nat(1), 0)?;
    let part = t.derived(beta, 0)?;
    if spine_mono && spine_a1.lattice.is_zero() && spine_a1.exactness.is_exact() && part.exactness.is_exact() && !part.lattice.is_zero() {
        return Ok(Verdict::Fails {
            scope: Scope::Exact,
            witness: ev(
                format!("the spine part of C_{beta} at level 0 is nonzero and the spine is monomorphic with A_1 = 0"),
                json!({"level": 0, "rank": part.lattice.rank()}),
            ),
        });
    }
    generic_vanishing(t, beta, d)
}

/// Searches, for each level `n ≤ depth`, a level `m ≤ n + horizon` whose
/// `A_β` maps into `A_∞⁽ⁿ⁾`.
pub fn generic_vanishing(t: &Tower, beta: &Ordinal, d: &Depths) -> Result<Verdict> {
    let ring = t.ring();
    let mut witnesses = Vec::new();
    let mut scope = Scope::ToDepth(d.depth);
    for n in 0..=d.depth {
        let inf = t.a_inf(n)?;
        if !inf.exactness.is_exact() && !inf.lattice.is_zero() {
            return Ok(Verdict::Unknown { depth: d.depth, reason: format!("A_inf at level {n} is not exact") });
        }
        let mut found = None;
        for m in n..=n + d.horizon {
            let l = t.derived(beta, m)?;
            scope = scope.join(Scope::from_exactness(l.exactness));
            if l.lattice.image(&t.compose(n, m)?, ring)?.is_subset(&inf.lattice) {
                found = Some(m);
                break;
            }
        }
        match found {
            Some(m) => witnesses.push(json!([n, m])),
            None => {
                return Ok(Verdict::Unknown {
                    depth: d.depth,
                    reason: format!("no level up to {} maps A_{beta} into A_inf at level {n}", n + d.horizon),
                })
            }
        }
    }
    Ok(Verdict::Holds {
        scope,
        certificate: ev(format!("each level n <= {} receives A_{beta} inside A_inf from a finite level", d.depth), json!({"pairs": witnesses})),
    })
}

/// The Mittag-Leffler condition; for towers of countable modules this is
/// equivalent to `lim¹ = 0`.
pub fn mittag_leffler(t: &Tower, d: &Depths) -> Result<Verdict> {
    vanishing(t, &Ordinal::zero(), d)
}

/// `A_∞ = 0`, equivalently `lim A = 0`.
pub fn reduced(t: &Tower, d: &Depths) -> Result<Verdict> {
    let (top, mut scope) = match (&t.kind, t.stage()) {
        (Kind::Sum(a, b), _) => return Ok(both(reduced(a, d)?, reduced(b, d)?, d.depth)),
        (Kind::Shift(inner, _), _) => return reduced(inner, d),
        (_, Some(s)) => (d.depth.min(s.saturating_sub(1)), Scope::ToStage(s)),
        (Kind::Pc(pc), None) => (pc.prefix_len(), Scope::Exact),
        _ => (d.depth, Scope::ToDepth(d.depth)),
    };
    let h = d.height();
    for n in 0..=top {
        let a = t.a_inf(n)?;
        if a.lattice.is_zero() {
            continue;
        }
        match a.exactness {
            Exactness::Exact => {
                return Ok(Verdict::Fails {
                    scope: Scope::Exact,
                    witness: ev(format!("A_inf at level {n} has rank {}", a.lattice.rank()), json!({"level": n, "lattice": a.lattice})),
                })
            }
            Exactness::ToStage(s) if !no_vector_within(&a.lattice, &h) => {
                return Ok(Verdict::Fails {
                    scope: Scope::ToStage(s),
                    witness: ev(
                        format!("the image of stage {s} in level {n} has a vector of norm <= 2^{}", d.height_bits),
                        json!({"level": n, "stage": s}),
                    ),
                })
            }
            Exactness::ToStage(s) => scope = scope.join(Scope::ToStage(s)),
            Exactness::LowerBoundOnly(_) => {
                return Ok(Verdict::Unknown { depth: top, reason: format!("A_inf at level {n} is only bounded from above") })
            }
        }
    }
    Ok(Verdict::Holds {
        scope,
        certificate: ev(format!("A_inf vanishes at levels <= {top}"), json!({"levels": top})),
    })
}

/// Returns whether every bond is injective, and how far that was checked.
pub fn is_monomorphic(t: &Tower, d: &Depths) -> Result<(bool, Scope)> {
    match &t.kind {
        Kind::Pc(pc) if pc.stage().is_none() => {
            let p = pc.prefix_len();
            let tail_ok = match pc.constant_tail() {
                Some(m) => m.rank() == m.cols(),
                None => false,
            };
            Ok(((0..p).all(|n| t.bond(n).rank() == t.bond(n).cols()) && tail_ok, Scope::Exact))
        }
        Kind::Pc(pc) => {
            let s = pc.stage().unwrap_or(0);
            Ok(((0..s).all(|n| t.bond(n).rank() == t.bond(n).cols()), Scope::ToStage(s)))
        }
        Kind::Sum(a, b) => {
            let (x, s) = is_monomorphic(a, d)?;
            let (y, u) = is_monomorphic(b, d)?;
            Ok((x && y, s.join(u)))
        }
        Kind::Shift(inner, _) => is_monomorphic(inner, d),
        Kind::Fish(_) => Ok(((0..d.depth).all(|n| t.bond(n).rank() == t.bond(n).cols()), Scope::ToDepth(d.depth))),
    }
}

/// Whether the tower is pro-isomorphic to one with injective bonds.
pub fn essentially_monomorphic(t: &Tower, d: &Depths) -> Result<Verdict> {
    derived_essentially_monomorphic(t, &Ordinal::zero(), d)
}

/// Essential monomorphy of the reduced subtower `A_β / A_∞`.
pub fn derived_essentially_monomorphic(t: &Tower, beta: &Ordinal, d: &Depths) -> Result<Verdict> {
    match &t.kind {
        Kind::Pc(pc) => pc_ess_mono(t, pc, beta, d),
        Kind::Sum(a, b) => Ok(both(
            derived_essentially_monomorphic(a, beta, d)?,
            derived_essentially_monomorphic(b, beta, d)?,
            d.depth,
        )),
        Kind::Shift(inner, _) => derived_essentially_monomorphic(inner, beta, d),
        Kind::Fish(f) => {
            if let (Some(len), true) = (f.length_bound(), f.straightness().straight) {
                if beta.succ() == len && essentially_monomorphic(f.spine(), d)?.holds() {
                    return Ok(Verdict::Holds {
                        scope: Scope::Exact,
                        certificate: ev(
                            format!("C_{beta} of a straight fishbone of length {len} agrees with the spine, which is essentially monomorphic"),
                            json!({"length": len.to_string()}),
                        ),
                    });
                }
            }
            greedy_ess_mono(t, beta, d)
        }
    }
}

fn pc_ess_mono(t: &Tower, pc: &Pc, beta: &Ordinal, d: &Depths) -> Result<Verdict> {
    if let Some(stage) = pc.stage() {
        if !beta.is_zero() {
            return match staged_vanishing(t, stage, beta, d)? {
                Verdict::Holds { scope, certificate } => Ok(Verdict::Holds {
                    scope,
                    certificate: ev(format!("the subtower vanishes: {}", certificate.summary), certificate.data),
                }),
                _ => greedy_ess_mono(t, beta, d),
            };
        }
        let (mono, scope) = is_monomorphic(t, d)?;
        if mono {
            return Ok(Verdict::Holds {
                scope,
                certificate: ev(format!("every bond below stage {stage} is injective"), json!({"stage": stage})),
            });
        }
        let ranks = (0..stage).map(|n| t.compose(n, stage).map(|m| m.rank())).collect::<Result<Vec<_>>>()?;
        if ranks.len() >= 3 && ranks.windows(2).all(|w| w[0] < w[1]) {
            return Ok(Verdict::Fails {
                scope: Scope::ToStage(stage),
                witness: ev(
                    "rational images of the top stage grow with the level, so no monomorphic tower bounds them",
                    json!({"rational_image_ranks": ranks}),
                ),
            });
        }
        return greedy_ess_mono(t, beta, d);
    }
    let p = pc.prefix_len();
    let Some(m) = pc.constant_tail() else {
        return Ok(Verdict::Holds {
            scope: Scope::Exact,
            certificate: ev("surjective tail: the reduced tower vanishes from the tail on", json!({"tail_level": p})),
        });
    };
    if !beta.is_zero() {
        return Ok(Verdict::Holds {
            scope: Scope::Exact,
            certificate: ev(format!("A_{beta} equals A_inf on the tail, so the reduced subtower vanishes there"), json!({"tail_level": p})),
        });
    }
    let ring = t.ring();
    let dim = m.rows();
    let s = dim.max(1);
    let ms = m.pow(s as u64);
    let ei = t.a_inf(p)?.lattice;
    // Levels P, P+s, P+2s of the periodic tail; the same triple repeats forever.
    let x = ei.preimage(&ms, ring)?;
    let y = Lattice::full(dim).image(&ms, ring)?.sum(&ei, ring)?;
    let meet = x.intersection(&y, ring)?;
    let ranks: Vec<usize> = (0..=dim).map(|k| m.pow(k as u64).rank()).collect();
    if meet.is_subset(&ei) {
        return Ok(Verdict::Holds {
            scope: Scope::Exact,
            certificate: ev(
                format!("levels {p}, {}, {}, ... give a monomorphic tower of images", p + s, p + 2 * s),
                json!({"subsequence_start": p, "step": s, "rational_image_ranks": ranks}),
            ),
        });
    }
    Ok(Verdict::Unknown { depth: p + 2 * s, reason: "the periodic kernel-image triple failed".into() })
}

fn greedy_ess_mono(t: &Tower, beta: &Ordinal, d: &Depths) -> Result<Verdict> {
    let ring = t.ring();
    let h = d.horizon.min(8);
    let mut scope = Scope::ToDepth(d.depth);
    let mut lv: Vec<Lattice> = Vec::new();
    let mut rel: Vec<Lattice> = Vec::new();
    let top = d.depth + 2 * h + 1;
    for n in 0..=top {
        let l = t.derived(beta, n)?;
        scope = scope.join(Scope::from_exactness(l.exactness));
        let inf = t.a_inf(n)?;
        let r = if inf.exactness.is_exact() { inf.lattice } else { Lattice::zero(t.dim(n)) };
        lv.push(l.lattice);
        rel.push(r);
    }
    let triple = |a: usize, b: usize, c: usize| -> Result<bool> {
        let x = lv[b].intersection(&rel[a].preimage(&t.compose(a, b)?, ring)?, ring)?;
        let y = lv[c].image(&t.compose(b, c)?, ring)?.sum(&rel[b], ring)?;
        Ok(x.intersection(&y, ring)?.is_subset(&rel[b]))
    };
    let mut seq = vec![0usize];
    'first: for b in 1..=h {
        for c in b + 1..=b + h {
            if triple(0, b, c)? {
                seq.push(b);
                seq.push(c);
                break 'first;
            }
        }
    }
    if seq.len() == 1 {
        return Ok(Verdict::Fails {
            scope: Scope::ToDepth(d.depth),
            witness: ev(format!("kernels at level 0 meet the forwarded images up to level {}", 2 * h), json!({"level": 0})),
        });
    }
    while *seq.last().unwrap() <= d.depth {
        let (a, b) = (seq[seq.len() - 2], seq[seq.len() - 1]);
        match (b + 1..=b + h).find(|&c| triple(a, b, c).unwrap_or(false)) {
            Some(c) => seq.push(c),
            None => {
                return Ok(Verdict::Fails {
                    scope: Scope::ToDepth(d.depth),
                    witness: ev(
                        format!("kernel obstruction at level {a} persists through level {}", b + h),
                        json!({"level": a, "subsequence": seq}),
                    ),
                })
            }
        }
    }
    Ok(Verdict::Holds {
        scope,
        certificate: ev("kernels meet forwarded images only in A_inf along the subsequence", json!({"subsequence": seq})),
    })
}

/// A length bound on a derived tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LengthBound {
    Exactly(Ordinal),
    AtLeast(Ordinal),
    Between { at_least: Ordinal, at_most: Ordinal },
}

impl Serialize for LengthBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LengthBound::Exactly(a) => json!({"exactly": a.to_string()}),
            LengthBound::AtLeast(a) => json!({"at_least": a.to_string()}),
            LengthBound::Between { at_least, at_most } => {
                json!({"at_least": at_least.to_string(), "at_most": at_most.to_string()})
            }
        }
        .serialize(s)
    }
}

impl std::fmt::Display for LengthBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LengthBound::Exactly(a) => write!(f, "{a}"),
            LengthBound::AtLeast(a) => write!(f, ">= {a}"),
            LengthBound::Between { at_least, at_most } => write!(f, "in [{at_least}, {at_most}]"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthReport {
    pub length: LengthBound,
    pub plain: Tri,
    pub scope: Scope,
    /// The tower had nonzero `A_∞` and was measured modulo it.
    pub reduced_first: bool,
    pub rule: &'static str,
    pub ring: String,
    pub depth: usize,
    pub horizon: usize,
    pub certificate: Vec<String>,
}

/// Known length of a construction, used to add candidates beyond the defaults.
pub fn length_hint(t: &Tower) -> Option<Ordinal> {
    match &t.kind {
        Kind::Pc(_) => None,
        Kind::Sum(a, b) => match (length_hint(a), length_hint(b)) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        },
        Kind::Shift(inner, _) => length_hint(inner),
        Kind::Fish(f) => f.length_bound(),
    }
}

fn candidates(t: &Tower, max_alpha: &Ordinal) -> Vec<Ordinal> {
    let w = Ordinal::omega();
    let mut c: Vec<Ordinal> = (0..=8).map(Ordinal::nat).collect();
    c.extend([w.clone(), w.succ(), w.mul_nat(2), w.mul_nat(2).succ(), Ordinal::omega_pow(2), Ordinal::omega_pow(2).succ()]);
    if let Some(h) = length_hint(t) {
        if let Some(p) = h.pred() {
            c.push(p);
        }
        c.push(h);
    }
    c.retain(|x| x <= max_alpha);
    c.sort();
    c.dedup();
    c
}

/// The least `α ≤ max_α` with `A_α ≅ 0`, measured on `A / A_∞`, and
/// whether the length is plain.
pub fn ml_length(t: &Tower, max_alpha: &Ordinal, d: &Depths) -> Result<LengthReport> {
    let mut reduced_first = false;
    for n in 0..=d.depth.min(8) {
        if !t.a_inf(n)?.lattice.is_zero() {
            reduced_first = true;
            break;
        }
    }
    let mut cert = Vec::new();
    if reduced_first {
        cert.push("A_inf is nonzero; lengths are those of A / A_inf".to_string());
    }
    let mut scope = Scope::Exact;
    let mut last_fail: Option<Ordinal> = None;
    let mut found = None;
    let mut unknown = false;
    for beta in candidates(t, max_alpha) {
        let v = vanishing(t, &beta, d)?;
        if let Some(s) = v.scope() {
            scope = scope.join(s);
        }
        cert.push(format!("A_{beta}: {}", v.summary()));
        match v {
            Verdict::Holds { .. } => {
                found = Some(beta);
                break;
            }
            Verdict::Fails { .. } => last_fail = Some(beta),
            Verdict::Unknown { .. } => {
                unknown = true;
                break;
            }
        }
    }
    let lower = last_fail.as_ref().map_or(Ordinal::zero(), Ordinal::succ);
    let length = match found {
        Some(b) if b.is_zero() || last_fail.as_ref().is_some_and(|f| f.succ() == b) => LengthBound::Exactly(b),
        Some(b) => LengthBound::Between { at_least: lower, at_most: b },
        None => {
            if !unknown {
                cert.push(format!("no tested ordinal up to {max_alpha} gave a vanishing derived tower"));
            }
            scope = scope.join(Scope::ToDepth(d.depth));
            LengthBound::AtLeast(lower)
        }
    };
    let plain = match &length {
        LengthBound::Exactly(b) if b.is_zero() => Tri::Yes,
        LengthBound::Exactly(b) if b.is_limit() => Tri::No,
        LengthBound::Exactly(b) => {
            let p = b.pred().expect("successor");
            let v = derived_essentially_monomorphic(t, &p, d)?;
            cert.push(format!("A_{p} essentially monomorphic: {}", v.summary()));
            match v {
                Verdict::Holds { scope: s, .. } => {
                    scope = scope.join(s);
                    Tri::Yes
                }
                Verdict::Fails { scope: Scope::Exact | Scope::ToStage(_), .. } => Tri::No,
                _ => Tri::Unknown,
            }
        }
        _ => Tri::Unknown,
    };
    Ok(LengthReport {
        length,
        plain,
        scope,
        reduced_first,
        rule: FUNDAMENTAL_RULE,
        ring: t.ring().describe(),
        depth: d.depth,
        horizon: d.horizon,
        certificate: cert,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelEntry {
    pub n: usize,
    pub lattice: Lattice,
    pub exactness: Exactness,
}

#[derive(Clone, Debug, Serialize)]
pub struct DerivedLevels {
    /// The ordinal, or `"inf"` for `A_∞`.
    pub alpha: String,
    pub rule: &'static str,
    pub ring: String,
    pub levels: Vec<LevelEntry>,
}

/// `A_α⁽ⁿ⁾` for `n ≤ depth`.
pub fn derived_tower(t: &Tower, alpha: &Ordinal, depth: usize) -> Result<DerivedLevels> {
    let levels = (0..=depth)
        .map(|n| t.derived(alpha, n).map(|d| LevelEntry { n, lattice: d.lattice, exactness: d.exactness }))
        .collect::<Result<Vec<_>>>()?;
    Ok(DerivedLevels { alpha: alpha.to_string(), rule: FUNDAMENTAL_RULE, ring: t.ring().describe(), levels })
}

/// `A_∞⁽ⁿ⁾` for `n ≤ depth`.
pub fn chain_support(t: &Tower, depth: usize) -> Result<DerivedLevels> {
    let levels = (0..=depth)
        .map(|n| t.a_inf(n).map(|d| LevelEntry { n, lattice: d.lattice, exactness: d.exactness }))
        .collect::<Result<Vec<_>>>()?;
    Ok(DerivedLevels { alpha: "inf".into(), rule: FUNDAMENTAL_RULE, ring: t.ring().describe(), levels })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedLevel {
    pub dim: usize,
    pub relations: Lattice,
    pub quotient: QuotientShape,
}

/// `A / A_∞` as quotient levels with the induced bonds.
#[derive(Clone, Debug, Serialize)]
pub struct ReducedTower {
    pub levels: Vec<ReducedLevel>,
    pub bonds: Vec<Matrix>,
    pub is_zero: bool,
    pub scope: Scope,
    pub note: String,
}

pub fn reduce(t: &Tower, d: &Depths) -> Result<ReducedTower> {
    let h = d.height();
    let mut levels = Vec::new();
    let mut scope = Scope::Exact;
    let mut note = String::from("relations are A_inf");
    for n in 0..=d.depth {
        let a = t.a_inf(n)?;
        let rel = match a.exactness {
            Exactness::Exact => a.lattice,
            Exactness::ToStage(s) if no_vector_within(&a.lattice, &h) => {
                scope = scope.join(Scope::ToStage(s));
                note = format!("A_inf has no vector of norm <= 2^{} through stage {s}; relations taken as zero", d.height_bits);
                Lattice::zero(t.dim(n))
            }
            _ => return Err(Error::Inexact(format!("A_inf at level {n} is only bounded, cannot reduce"))),
        };
        let quotient = quotient_shape(&Lattice::full(t.dim(n)), &rel, t.ring())?;
        levels.push(ReducedLevel { dim: t.dim(n), relations: rel, quotient });
    }
    let is_zero = levels.iter().all(|l| l.relations.is_full());
    Ok(ReducedTower { levels, bonds: (0..d.depth).map(|n| t.bond(n)).collect(), is_zero, scope, note })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelLevel {
    pub i: usize,
    pub level_rank: usize,
    pub kernel_rank: usize,
    pub image_rank: usize,
    pub short_exact: bool,
    /// `A_{α+1}⁽ˡ⁾ ⊆ p^{(ℓ,i)}(A_α⁽ⁱ⁾)`.
    pub contains_next: bool,
    /// The image modulo `A_{α+1}⁽ˡ⁾`.
    pub defect: QuotientShape,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lim1Report {
    pub alpha: String,
    pub ell: usize,
    pub levels: Vec<KernelLevel>,
    /// `p^{(ℓ,i)}(A_α⁽ⁱ⁾)` decreases in `i`.
    pub images_nested: bool,
    pub holds: bool,
}

/// Checks the kernel towers `Ker(A_α⁽ⁱ⁾ → A_α⁽ˡ⁾)` against `A_{α+1}⁽ˡ⁾`.
pub fn lim1_kernel_identity(t: &Tower, ell: usize, alpha: &Ordinal, depth: usize) -> Result<Lim1Report> {
    let ring = t.ring();
    let next = t.level(&alpha.succ(), ell)?;
    if !next.exactness.is_exact() {
        return Err(Error::Precondition(format!("A_{} at level {ell} is not exact", alpha.succ())));
    }
    let mut levels = Vec::new();
    let mut images = Vec::new();
    for i in ell..=ell.max(depth) {
        let a = t.derived(alpha, i)?;
        if !a.exactness.is_exact() {
            return Err(Error::Precondition(format!("A_{alpha} at level {i} is not exact")));
        }
        let f = t.compose(ell, i)?;
        let k = a.lattice.intersection(&kernel(&f), ring)?;
        let img = a.lattice.image(&f, ring)?;
        let contains_next = next.lattice.is_subset(&img);
        let defect = if contains_next {
            quotient_shape(&img, &next.lattice, ring)?
        } else {
            QuotientShape { free_rank: 0, invariant_factors: vec![] }
        };
        images.push(img.clone());
        levels.push(KernelLevel {
            i,
            level_rank: a.lattice.rank(),
            kernel_rank: k.rank(),
            image_rank: img.rank(),
            short_exact: k.rank() + img.rank() == a.lattice.rank(),
            contains_next,
            defect,
        });
    }
    let images_nested = images.windows(2).all(|w| w[1].is_subset(&w[0]));
    let holds = levels.iter().all(|l| l.short_exact && l.contains_next) && images_nested;
    Ok(Lim1Report { alpha: alpha.to_string(), ell, levels, images_nested, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::BaseRing;
    use crate::towers::fishbone::{example_length_three, example_length_two};
    use crate::towers::spec::TowerSpec;

    fn small() -> Depths {
        Depths { depth: 6, horizon: 8, height_bits: 20 }
    }

    fn constant(rows: &[&[i64]]) -> Tower {
        Tower::new(&TowerSpec::constant(BaseRing::integers(), Matrix::from_i64(rows))).unwrap()
    }

    #[test]
    fn mittag_leffler_examples() {
        assert!(mittag_leffler(&constant(&[&[3]]), &small()).unwrap().fails());
        assert!(mittag_leffler(&constant(&[&[1, 1], &[0, 1]]), &small()).unwrap().holds());
        assert!(mittag_leffler(&Tower::new(&TowerSpec::zero()).unwrap(), &small()).unwrap().holds());
    }

    #[test]
    fn lengths_of_constant_towers() {
        let w2 = Ordinal::omega_pow(2);
        let r = ml_length(&constant(&[&[3]]), &w2, &small()).unwrap();
        assert_eq!(r.length, LengthBound::Exactly(Ordinal::nat(1)));
        assert_eq!(r.plain, Tri::Yes);
        let r = ml_length(&Tower::new(&TowerSpec::zero()).unwrap(), &w2, &small()).unwrap();
        assert_eq!(r.length, LengthBound::Exactly(Ordinal::zero()));
        let r = ml_length(&constant(&[&[1]]), &w2, &small()).unwrap();
        assert!(r.reduced_first);
        assert_eq!(r.length, LengthBound::Exactly(Ordinal::zero()));
    }

    #[test]
    fn reduce_identity_is_zero() {
        let r = reduce(&constant(&[&[1]]), &small()).unwrap();
        assert!(r.is_zero);
        let r = reduce(&constant(&[&[2]]), &small()).unwrap();
        assert!(r.levels.iter().all(|l| l.relations.is_zero()));
    }

    #[test]
    fn diagonal_with_zero_is_essentially_monomorphic() {
        let v = essentially_monomorphic(&constant(&[&[2, 0], &[0, 0]]), &small()).unwrap();
        assert!(v.holds(), "{}", v.summary());
        assert_eq!(v.scope(), Some(Scope::Exact));
    }

    #[test]
    fn greedy_agrees_on_monomorphic_tower() {
        let t = constant(&[&[2, 1], &[0, 3]]);
        assert!(greedy_ess_mono(&t, &Ordinal::zero(), &small()).unwrap().holds());
    }

    #[test]
    fn fishbone_lengths() {
        let d = small();
        let w2 = Ordinal::omega_pow(2);
        let r = ml_length(&Tower::new(&example_length_two()).unwrap(), &w2, &d).unwrap();
        assert_eq!(r.length, LengthBound::Exactly(Ordinal::nat(2)));
        assert_eq!(r.plain, Tri::Yes);
        assert!(r.scope.is_exact());
        let r = ml_length(&Tower::new(&example_length_three()).unwrap(), &w2, &d).unwrap();
        assert_eq!(r.length, LengthBound::Exactly(Ordinal::nat(3)));
        assert_eq!(r.plain, Tri::Yes);
    }

    #[test]
    fn lim1_identity_diagonal() {
        let t = constant(&[&[2, 0], &[0, 1]]);
        let r = lim1_kernel_identity(&t, 0, &Ordinal::zero(), 10).unwrap();
        assert!(r.holds);
        assert_eq!(t.level(&Ordinal::nat(1), 0).unwrap().lattice, Lattice::from_i64(2, &[&[0, 1]], &BaseRing::integers()));
    }
}
