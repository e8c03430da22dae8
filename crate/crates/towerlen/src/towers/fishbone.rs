//! Fishbone towers: a spine `A` with ribs `B[k]` glued along `A⁽ᵏ⁾ = B⁽⁰⁾[k]`.
//!
//! Level `n` is `B⁽ⁿ⁾[0] ⊕ B⁽ⁿ⁻¹⁾[1] ⊕ … ⊕ B⁽¹⁾[n−1] ⊕ A⁽ⁿ⁾` in that block order.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::spec::TowerSpec;
use super::tower::{Derived, Exactness, Tower};
use super::verdict::{self, Depths, Tri, Verdict};
use crate::error::{Error, Result};
use crate::exactlin::{quotient_shape, BaseRing, Lattice, Matrix};
use crate::ordinals::Ordinal;

pub const STRAIGHT_DEPTH: usize = 10;
pub const FISH_HORIZON: usize = 12;

pub(crate) struct Fish {
    spine: Tower,
    ribs: Vec<Tower>,
    pub(crate) horizon: usize,
    lengths: OnceLock<Vec<Option<Ordinal>>>,
    straight: OnceLock<StraightnessReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StraightFailure {
    pub k: usize,
    pub l: usize,
    /// `A⁽ᵏ⁾ / (rib part + spine part)`.
    pub defect: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StraightnessReport {
    pub straight: bool,
    /// Plain lengths of the ribs in one cycle; `null` where not certified.
    #[serde(serialize_with = "ser_opt_ords")]
    pub rib_plain_lengths: Vec<Option<Ordinal>>,
    #[serde(serialize_with = "ser_opt_ord")]
    pub sup: Option<Ordinal>,
    #[serde(serialize_with = "ser_opt_ord")]
    pub length: Option<Ordinal>,
    pub depth: usize,
    pub failure: Option<StraightFailure>,
    pub note: String,
}

fn ser_opt_ord<S: serde::Serializer>(o: &Option<Ordinal>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match o {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_opt_ords<S: serde::Serializer>(v: &[Option<Ordinal>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for o in v {
        seq.serialize_element(&o.as_ref().map(|x| x.to_string()))?;
    }
    seq.end()
}

impl Fish {
    pub(crate) fn new(spine: &TowerSpec, ribs: &[TowerSpec]) -> Result<Fish> {
        if ribs.is_empty() {
            return Err(Error::Precondition("a fishbone needs at least one rib".into()));
        }
        let spine = Tower::new(spine)?;
        let ribs = ribs.iter().map(Tower::new).collect::<Result<Vec<_>>>()?;
        let fish = Fish { spine, ribs, horizon: FISH_HORIZON, lengths: OnceLock::new(), straight: OnceLock::new() };
        for k in 0..(2 * fish.ribs.len()).max(16) {
            let (r, s) = (fish.rib(k).dim(0), fish.spine.dim(k));
            if r != s {
                return Err(Error::Shape(format!("rib {k} has level-0 rank {r} but the spine has rank {s} at level {k}")));
            }
        }
        Ok(fish)
    }

    pub(crate) fn spine(&self) -> &Tower {
        &self.spine
    }

    pub(crate) fn rib(&self, k: usize) -> &Tower {
        &self.ribs[k % self.ribs.len()]
    }

    pub(crate) fn cycle(&self) -> usize {
        self.ribs.len()
    }

    pub(crate) fn dim(&self, n: usize) -> usize {
        (0..n).map(|k| self.rib(k).dim(n - k)).sum::<usize>() + self.spine.dim(n)
    }

    /// Offset of each block at level `n`; the last entry is the spine.
    fn offsets(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for k in 0..n {
            out.push(acc);
            acc += self.rib(k).dim(n - k);
        }
        out.push(acc);
        out
    }

    pub(crate) fn bond(&self, n: usize) -> Matrix {
        let ro = self.offsets(n);
        let co = self.offsets(n + 1);
        let mut b = Matrix::zeros(self.dim(n), self.dim(n + 1));
        for k in 0..n {
            b.put_block(ro[k], co[k], &self.rib(k).bond(n - k));
        }
        b.put_block(ro[n], co[n], &self.rib(n).bond(0));
        b.put_block(ro[n], co[n + 1], &self.spine.bond(n));
        b
    }

    /// Certified plain lengths of the ribs in one cycle.
    pub(crate) fn rib_lengths(&self) -> &[Option<Ordinal>] {
        self.lengths.get_or_init(|| {
            let depths = Depths::default();
            self.ribs
                .iter()
                .map(|r| {
                    let rep = verdict::ml_length(r, &Ordinal::omega_pow(2), &depths).ok()?;
                    match (rep.length, rep.plain) {
                        (verdict::LengthBound::Exactly(a), Tri::Yes) if rep.scope.is_exact() => Some(a),
                        _ => None,
                    }
                })
                .collect()
        })
    }

    /// `sup β[k] + 1` when every rib length is certified.
    pub(crate) fn length_bound(&self) -> Option<Ordinal> {
        let ls = self.rib_lengths();
        let mut sup = Ordinal::zero();
        for l in ls {
            sup = sup.max(l.clone()?);
        }
        Some(sup.succ())
    }

    pub(crate) fn straightness(&self) -> &StraightnessReport {
        self.straight.get_or_init(|| self.check_straight(STRAIGHT_DEPTH))
    }

    fn check_straight(&self, depth: usize) -> StraightnessReport {
        let lengths = self.rib_lengths().to_vec();
        let sup = lengths.iter().try_fold(Ordinal::zero(), |acc, l| l.clone().map(|x| acc.max(x)));
        let mut rep = StraightnessReport {
            straight: false,
            rib_plain_lengths: lengths.clone(),
            sup: sup.clone(),
            length: sup.as_ref().map(Ordinal::succ),
            depth,
            failure: None,
            note: String::new(),
        };
        if sup.is_none() {
            rep.note = "some rib has no certified plain length".into();
            return rep;
        }
        let ring = self.spine.ring().clone();
        for k in 0..=depth {
            let Some(bk) = lengths[k % self.cycle()].clone() else { unreachable!() };
            let Some(pred) = bk.pred() else {
                rep.note = format!("rib {k} has plain length {bk}, which is not a successor");
                return rep;
            };
            let rib = self.rib(k);
            let target = Lattice::full(self.spine.dim(k));
            for l in k..=depth {
                let ok = (|| -> Result<Option<String>> {
                    let r = rib.derived(&pred, l)?.lattice.image(&rib.compose(0, l)?, &ring)?;
                    let s = Lattice::full(self.spine.dim(l)).image(&self.spine.compose(k, l)?, &ring)?;
                    let sum = r.sum(&s, &ring)?;
                    if sum == target {
                        Ok(None)
                    } else {
                        let q = quotient_shape(&target, &sum, &ring)?;
                        Ok(Some(format!("free rank {}, torsion {:?}", q.free_rank, q.invariant_factors)))
                    }
                })();
                match ok {
                    Ok(None) => {}
                    Ok(Some(defect)) => {
                        rep.failure = Some(StraightFailure { k, l, defect });
                        rep.note = "rib and spine images do not cover the spine level".into();
                        return rep;
                    }
                    Err(e) => {
                        rep.note = format!("could not evaluate at ({k}, {l}): {e}");
                        return rep;
                    }
                }
            }
        }
        rep.straight = true;
        rep.note = format!("sum condition verified for k <= l <= {depth}");
        rep
    }

    /// Closed form of `C_β⁽ⁿ⁾` for successor `β`, or `None` when the fishbone
    /// is not certified straight.
    pub(crate) fn closed_form(&self, beta: &Ordinal, n: usize) -> Result<Option<Derived>> {
        if !self.straightness().straight {
            return Ok(None);
        }
        let lengths = self.rib_lengths();
        let ring = self.spine.ring().clone();
        let mut lat = Lattice::zero(0);
        let mut ex = Exactness::Exact;
        for k in 0..n {
            let d = self.rib(k).level(beta, n - k)?;
            ex = ex.join(d.exactness);
            lat = lat.direct_sum(&d.lattice);
        }
        let m = self.cycle();
        let hit = (n..n + m).find(|&j| lengths[j % m].as_ref().is_some_and(|b| b >= beta));
        let spine = match hit {
            Some(k) => Lattice::full(self.spine.dim(k)).image(&self.spine.compose(n, k)?, &ring)?,
            None => {
                let d = self.spine.level(&Ordinal::nat(1), n)?;
                ex = ex.join(d.exactness);
                d.lattice
            }
        };
        Ok(Some(Derived { lattice: lat.direct_sum(&spine), exactness: ex }))
    }
}

/// Builds a fishbone spec, checking the gluing and the spine hypotheses.
pub fn fishbone_build(
    spine: &TowerSpec,
    ribs: &[TowerSpec],
    check_straight: bool,
    depths: &Depths,
) -> Result<(TowerSpec, Option<StraightnessReport>)> {
    let spec = TowerSpec::fishbone(spine.clone(), ribs.to_vec());
    let t = Tower::new(&spec)?;
    let f = t.fish().expect("fishbone spec");
    let s = f.spine();
    if (0..=depths.depth).all(|n| s.dim(n) == 0) {
        return Err(Error::Precondition("the spine is trivial".into()));
    }
    for n in 0..=depths.depth {
        let a = s.a_inf(n)?;
        if !a.lattice.is_zero() {
            return Err(Error::Precondition(format!("the spine is not reduced: A_inf is nonzero at level {n}")));
        }
    }
    match verdict::essentially_monomorphic(s, depths)? {
        Verdict::Holds { .. } => {}
        v => return Err(Error::Precondition(format!("the spine is not essentially monomorphic: {}", v.summary()))),
    }
    let rep = if check_straight { Some(f.straightness().clone()) } else { None };
    Ok((spec, rep))
}

#[derive(Clone, Debug, Serialize)]
pub struct FishboneCheck {
    pub beta: String,
    pub level: usize,
    pub matches: bool,
    pub closed_form_rank: usize,
    /// `L` lies in the derived level of the truncation, an upper bound for the true one.
    pub within_truncation: bool,
    /// `L ⊆ p^{(n,n+k)}(L_{(β−1)_k}⁽ⁿ⁺ᵏ⁾)` for every `k` up to the second horizon.
    pub recursion_contained: bool,
    /// Per-prime exponents `e` with `U_K ⊆ (ℚL ∩ ℤ^D) + p^e ℤ^D` at the two horizons;
    /// `null` means `U_K` has the rank of `L`.
    pub defects: [Option<BTreeMap<String, u32>>; 2],
    /// `U_K ∩ (ℚL ∩ ℤ^D) = L` at the second horizon.
    pub torsion_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FishboneVerifyReport {
    pub straight: bool,
    #[serde(serialize_with = "ser_opt_ord")]
    pub length: Option<Ordinal>,
    pub horizons: [usize; 2],
    pub truncation_horizon: usize,
    pub primes: Vec<String>,
    pub checks: Vec<FishboneCheck>,
    pub matched: usize,
    pub total: usize,
}

/// Checks the closed form against the definition of the derived tower.
///
/// Writing `L_β` for the closed form and `U_K = ⋂_{k≤K} p^{(n,n+k)}(L_{(β−1)_k}⁽ⁿ⁺ᵏ⁾)`,
/// a match needs `L ⊆ U_K`, `U_K` meeting the pure hull of `L` only in `L`,
/// `U_K` approaching that hull prime by prime as `K` grows, and `L` inside the
/// derived level of a truncation of the tower.
/// With `L_0` the full tower this is an induction on `β`.
pub fn fishbone_verify(spec: &TowerSpec, betas: &[Ordinal], depth: usize) -> Result<FishboneVerifyReport> {
    let t = Tower::new(spec)?;
    let f = t.fish().ok_or_else(|| Error::Precondition("not a fishbone tower".into()))?;
    let st = f.straightness().clone();
    if !st.straight {
        return Err(Error::Precondition(format!("fishbone is not certified straight: {}", st.note)));
    }
    let candidate = |beta: &Ordinal, n: usize| -> Result<Lattice> {
        let l = t.level(beta, n)?;
        if !l.exactness.is_exact() {
            return Err(Error::Inexact(format!("closed form at ({beta}, {n}) is not exact")));
        }
        Ok(l.lattice)
    };
    let (checks, primes) = check_candidate(&t, &candidate, betas, depth)?;
    let matched = checks.iter().filter(|c| c.matches).count();
    Ok(FishboneVerifyReport {
        straight: true,
        length: st.length,
        horizons: [CHECK_HORIZONS.0, CHECK_HORIZONS.1],
        truncation_horizon: depth + CHECK_HORIZONS.1,
        primes: primes.iter().map(|p| p.to_string()).collect(),
        total: checks.len(),
        matched,
        checks,
    })
}

const CHECK_HORIZONS: (usize, usize) = (4, 8);

type Candidate<'a> = dyn Fn(&Ordinal, usize) -> Result<Lattice> + 'a;

fn check_candidate(t: &Tower, cand: &Candidate<'_>, betas: &[Ordinal], depth: usize) -> Result<(Vec<FishboneCheck>, Vec<BigInt>)> {
    let (k1, k2) = CHECK_HORIZONS;
    let th = depth + k2;
    let primes = bad_primes(t, depth + k2 + 1);
    let trunc = t.oracle(th)?;
    let ring = t.ring().clone();
    let mut checks = Vec::new();
    for beta in betas {
        for n in 0..=depth {
            let l = cand(beta, n)?;
            let within_truncation = l.is_subset(&trunc.level(beta, n)?.lattice);
            let Some(pred) = beta.pred() else {
                checks.push(FishboneCheck {
                    beta: beta.to_string(),
                    level: n,
                    matches: l.is_full() && within_truncation,
                    closed_form_rank: l.rank(),
                    within_truncation,
                    recursion_contained: true,
                    defects: [None, None],
                    torsion_ok: true,
                });
                continue;
            };
            let mut u = Lattice::full(t.dim(n));
            let mut defects = [None, None];
            for k in 0..=k2 {
                let prev = cand(&pred.fundamental(k as u64), n + k)?;
                u = u.intersection(&prev.image(&t.compose(n, n + k)?, &ring)?, &ring)?;
                if k == k1 {
                    defects[0] = prime_defects(&u, &l, &primes, &ring)?;
                } else if k == k2 {
                    defects[1] = prime_defects(&u, &l, &primes, &ring)?;
                }
            }
            let recursion_contained = l.is_subset(&u);
            let converging = match (&defects[0], &defects[1]) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(a), Some(b)) => {
                    b.iter().all(|(p, y)| a.get(p).is_none_or(|x| y >= x)) && b.iter().any(|(p, y)| a.get(p).is_some_and(|x| y > x))
                }
            };
            let torsion_ok = u.intersection(&l.saturate(), &ring)? == l;
            checks.push(FishboneCheck {
                beta: beta.to_string(),
                level: n,
                matches: within_truncation && recursion_contained && converging && torsion_ok,
                closed_form_rank: l.rank(),
                within_truncation,
                recursion_contained,
                defects,
                torsion_ok,
            });
        }
    }
    Ok((checks, primes))
}

/// Non-unit primes dividing a nonzero entry of some bond below `h`.
fn bad_primes(t: &Tower, h: usize) -> Vec<BigInt> {
    let mut primes = std::collections::BTreeSet::new();
    for n in 0..h {
        for f in t.bond(n).entries() {
            if !f.is_zero() {
                for p in crate::exactlin::ring::factorize(f).into_keys() {
                    if !t.ring().is_unit(&p) {
                        primes.insert(p);
                    }
                }
            }
        }
    }
    primes.into_iter().collect()
}

const DEFECT_CAP: u32 = 64;

fn prime_defects(u: &Lattice, l: &Lattice, primes: &[BigInt], ring: &BaseRing) -> Result<Option<BTreeMap<String, u32>>> {
    let hull = l.saturate();
    if u.is_subset(&hull) {
        return Ok(None);
    }
    let full = Lattice::full(l.dim());
    let mut out = BTreeMap::new();
    for p in primes {
        let mut e = 0;
        let mut pow = BigInt::one();
        while e < DEFECT_CAP {
            let next = &pow * p;
            if !u.is_subset(&hull.sum(&full.scaled(&next, ring), ring)?) {
                break;
            }
            pow = next;
            e += 1;
        }
        out.insert(p.to_string(), e);
    }
    Ok(Some(out))
}

/// The length-2 example: spine `×2`, every rib `×3`.
pub fn example_length_two() -> TowerSpec {
    TowerSpec::fishbone(TowerSpec::scalar(2), vec![TowerSpec::scalar(3)])
}

/// The length-3 example: spine `×2`, ribs alternating `×3` and a length-2
/// fishbone with spine `×5` and ribs `×3`.
pub fn example_length_three() -> TowerSpec {
    let inner = TowerSpec::fishbone(TowerSpec::scalar(5), vec![TowerSpec::scalar(3)]);
    TowerSpec::fishbone(TowerSpec::scalar(2), vec![TowerSpec::scalar(3), inner])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_shapes() {
        let t = Tower::new(&example_length_two()).unwrap();
        for n in 0..6 {
            assert_eq!(t.dim(n), n + 1);
            let b = t.bond(n);
            assert_eq!((b.rows(), b.cols()), (n + 1, n + 2));
        }
        assert_eq!(t.bond(1), Matrix::from_i64(&[&[3, 0, 0], &[0, 3, 2]]));
    }

    #[test]
    fn gluing_mismatch() {
        let spine = TowerSpec::constant(BaseRing::integers(), Matrix::from_i64(&[&[2, 0], &[0, 2]]));
        assert!(Tower::new(&TowerSpec::fishbone(spine, vec![TowerSpec::scalar(3)])).is_err());
    }

    #[test]
    fn straight_examples() {
        let t = Tower::new(&example_length_two()).unwrap();
        let st = t.fish().unwrap().straightness();
        assert!(st.straight, "{}", st.note);
        assert_eq!(st.length, Some(Ordinal::nat(2)));
        let t = Tower::new(&example_length_three()).unwrap();
        let st = t.fish().unwrap().straightness();
        assert!(st.straight, "{}", st.note);
        assert_eq!(st.length, Some(Ordinal::nat(3)));
    }

    #[test]
    fn not_straight() {
        // The rib ×2 together with the spine ×2 never reaches odd elements.
        let t = Tower::new(&TowerSpec::fishbone(TowerSpec::scalar(2), vec![TowerSpec::scalar(2)])).unwrap();
        let st = t.fish().unwrap().straightness();
        assert!(!st.straight);
        let f = st.failure.as_ref().unwrap();
        assert_eq!((f.k, f.l), (0, 1));
    }

    #[test]
    fn closed_form_matches_truncations() {
        for (spec, top) in [(example_length_two(), 2), (example_length_three(), 3)] {
            let betas: Vec<Ordinal> = (0..=top).map(Ordinal::nat).collect();
            let rep = fishbone_verify(&spec, &betas, 5).unwrap();
            assert_eq!(rep.matched, rep.total, "{:?}", rep.checks.iter().find(|c| !c.matches));
        }
    }

    #[test]
    fn shifted_spine_part_is_rejected() {
        // The spine part taken one level too deep is too small.
        let t = Tower::new(&example_length_two()).unwrap();
        let f = t.fish().unwrap();
        let ring = BaseRing::integers();
        let wrong = |beta: &Ordinal, n: usize| -> Result<Lattice> {
            let l = t.level(beta, n)?.lattice;
            if *beta == Ordinal::nat(1) {
                let s = Lattice::full(1).image(&f.spine().compose(n, n + 1)?, &ring)?;
                return Ok(Lattice::zero(l.dim() - 1).direct_sum(&s));
            }
            Ok(l)
        };
        let betas: Vec<Ordinal> = (0..=2).map(Ordinal::nat).collect();
        let (checks, _) = check_candidate(&t, &wrong, &betas, 4).unwrap();
        assert!(checks.iter().any(|c| c.beta == "1" && !c.matches));
    }
}
