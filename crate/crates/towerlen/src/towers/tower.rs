//! Evaluated towers: levels, bonds and derived levels with memoization.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use super::fishbone::Fish;
use super::spec::{Level, Tail, TowerSpec};
use crate::error::{Error, Result};
use crate::exactlin::{eventual_image, stable_image_intersection, BaseRing, Lattice, Matrix};
use crate::ordinals::Ordinal;

/// How far a computed lattice can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "depth", rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    /// Exact for the tower known up to this stage, continued by identities.
    ToStage(usize),
    /// Only an upper bound, from a truncation at this horizon.
    LowerBoundOnly(usize),
}

impl Exactness {
    pub fn join(self, other: Exactness) -> Exactness {
        use Exactness::*;
        match (self, other) {
            (LowerBoundOnly(a), LowerBoundOnly(b)) => LowerBoundOnly(a.min(b)),
            (LowerBoundOnly(a), _) | (_, LowerBoundOnly(a)) => LowerBoundOnly(a),
            (ToStage(a), ToStage(b)) => ToStage(a.min(b)),
            (ToStage(a), _) | (_, ToStage(a)) => ToStage(a),
            _ => Exact,
        }
    }

    pub fn is_exact(self) -> bool {
        self == Exactness::Exact
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derived {
    pub lattice: Lattice,
    pub exactness: Exactness,
}

impl Derived {
    fn exact(lattice: Lattice) -> Self {
        Derived { lattice, exactness: Exactness::Exact }
    }
}

/// Prefix followed by a periodic tail.
pub(crate) struct Pc {
    prefix: Vec<Level>,
    tail: PcTail,
    /// Set for towers known only up to a stage.
    stage: Option<usize>,
    /// Derived levels `A_β` (`β ≥ 1`) at tail levels.
    ei: Lattice,
    /// `down[n] = p^{(n,P)}`.
    down: Vec<Matrix>,
}

#[derive(Clone)]
pub(crate) enum PcTail {
    Constant(Matrix),
    /// Coordinate projections starting at this rank.
    Epi(usize),
}

pub(crate) enum Kind {
    Pc(Pc),
    Sum(Box<Tower>, Box<Tower>),
    Shift(Box<Tower>, usize),
    Fish(Box<Fish>),
}

pub struct Tower {
    spec: TowerSpec,
    ring: BaseRing,
    pub(crate) kind: Kind,
    cache: RwLock<HashMap<(Ordinal, usize), Derived>>,
    inf_cache: RwLock<HashMap<usize, Derived>>,
    oracles: RwLock<HashMap<usize, Arc<Tower>>>,
}

fn check_bond(n: usize, rows: usize, cols: usize, bond: &Matrix) -> Result<()> {
    if bond.rows() != rows || bond.cols() != cols {
        return Err(Error::Shape(format!(
            "bond at level {n} is {}x{}, expected {rows}x{cols}",
            bond.rows(),
            bond.cols()
        )));
    }
    Ok(())
}

impl Pc {
    fn new(prefix: Vec<Level>, tail: PcTail, stage: Option<usize>, ring: &BaseRing) -> Result<Pc> {
        let p = prefix.len();
        let tail_dim = |j: usize| match &tail {
            PcTail::Constant(m) => m.rows(),
            PcTail::Epi(d) => d + j,
        };
        for (i, l) in prefix.iter().enumerate() {
            let next = if i + 1 < p { prefix[i + 1].dim } else { tail_dim(0) };
            check_bond(i, l.dim, next, &l.bond)?;
        }
        let ei = match &tail {
            PcTail::Constant(m) => {
                if !m.is_square() {
                    return Err(Error::Shape("constant tail bond must be square".into()));
                }
                eventual_image(m, ring)?
            }
            PcTail::Epi(d) => Lattice::full(*d),
        };
        let mut down = vec![Matrix::identity(tail_dim(0))];
        for l in prefix.iter().rev() {
            let next = l.bond.mul_unchecked(down.last().unwrap());
            down.push(next);
        }
        down.reverse();
        Ok(Pc { prefix, tail, stage, ei, down })
    }

    fn p(&self) -> usize {
        self.prefix.len()
    }

    fn dim(&self, n: usize) -> usize {
        if n < self.p() {
            return self.prefix[n].dim;
        }
        match &self.tail {
            PcTail::Constant(m) => m.rows(),
            PcTail::Epi(d) => d + (n - self.p()),
        }
    }

    fn bond(&self, n: usize) -> Matrix {
        if n < self.p() {
            return self.prefix[n].bond.clone();
        }
        match &self.tail {
            PcTail::Constant(m) => m.clone(),
            PcTail::Epi(_) => {
                let d = self.dim(n);
                let mut b = Matrix::zeros(d, d + 1);
                b.put_block(0, 0, &Matrix::identity(d));
                b
            }
        }
    }

    fn base(&self) -> Exactness {
        self.stage.map_or(Exactness::Exact, Exactness::ToStage)
    }

    /// Explicit levels `0..len` with their bonds (unrolling the tail).
    fn unrolled(&self, len: usize) -> Vec<Level> {
        (0..len).map(|n| Level { dim: self.dim(n), bond: self.bond(n) }).collect()
    }

    fn tail_level_a_inf(&self) -> Lattice {
        self.ei.clone()
    }
}

impl Tower {
    pub fn new(spec: &TowerSpec) -> Result<Tower> {
        let ring = spec.ring.clone();
        let kind = match &spec.tail {
            Tail::Zero => Kind::Pc(Pc::new(spec.prefix.clone(), PcTail::Constant(Matrix::zeros(0, 0)), None, &ring)?),
            Tail::Constant { dim, bond } => {
                check_bond(spec.prefix.len(), *dim, *dim, bond)?;
                Kind::Pc(Pc::new(spec.prefix.clone(), PcTail::Constant(bond.clone()), None, &ring)?)
            }
            Tail::Truncated { levels, top_dim } => {
                let mut all = spec.prefix.clone();
                all.extend(levels.iter().cloned());
                let stage = all.len();
                Kind::Pc(Pc::new(all, PcTail::Constant(Matrix::identity(*top_dim)), Some(stage), &ring)?)
            }
            Tail::Projections { start_dim } => Kind::Pc(Pc::new(spec.prefix.clone(), PcTail::Epi(*start_dim), None, &ring)?),
            Tail::Sum { left, right } => {
                no_prefix(spec)?;
                same_ring(&ring, &left.ring)?;
                same_ring(&ring, &right.ring)?;
                let l = Tower::new(left)?;
                let r = Tower::new(right)?;
                match merge_sum(&l, &r, &ring)? {
                    Some(pc) => Kind::Pc(pc),
                    None => Kind::Sum(Box::new(l), Box::new(r)),
                }
            }
            Tail::Shift { tower, by } => {
                no_prefix(spec)?;
                same_ring(&ring, &tower.ring)?;
                let inner = Tower::new(tower)?;
                match &inner.kind {
                    Kind::Pc(pc) => {
                        let len = pc.p().max(*by);
                        let levels = pc.unrolled(len).split_off(*by);
                        let stage = match pc.stage {
                            Some(s) if s < *by => {
                                return Err(Error::Precondition(format!("shift by {by} passes the last known stage {s}")))
                            }
                            s => s.map(|s| s - by),
                        };
                        let tail = match &pc.tail {
                            PcTail::Constant(m) => PcTail::Constant(m.clone()),
                            PcTail::Epi(d) => PcTail::Epi(d + (len - pc.p())),
                        };
                        Kind::Pc(Pc::new(levels, tail, stage, &ring)?)
                    }
                    _ => Kind::Shift(Box::new(inner), *by),
                }
            }
            Tail::Fishbone { spine, ribs } => {
                no_prefix(spec)?;
                same_ring(&ring, &spine.ring)?;
                for r in ribs {
                    same_ring(&ring, &r.ring)?;
                }
                Kind::Fish(Box::new(Fish::new(spine, ribs)?))
            }
        };
        Ok(Tower {
            spec: spec.clone(),
            ring,
            kind,
            cache: RwLock::new(HashMap::new()),
            inf_cache: RwLock::new(HashMap::new()),
            oracles: RwLock::new(HashMap::new()),
        })
    }

    pub fn spec(&self) -> &TowerSpec {
        &self.spec
    }

    pub fn ring(&self) -> &BaseRing {
        &self.ring
    }

    /// Last stage with explicitly known data, for truncated towers.
    pub fn stage(&self) -> Option<usize> {
        match &self.kind {
            Kind::Pc(pc) => pc.stage,
            Kind::Sum(a, b) => match (a.stage(), b.stage()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
            Kind::Shift(t, k) => t.stage().map(|s| s.saturating_sub(*k)),
            Kind::Fish(_) => None,
        }
    }

    pub fn dim(&self, n: usize) -> usize {
        match &self.kind {
            Kind::Pc(pc) => pc.dim(n),
            Kind::Sum(a, b) => a.dim(n) + b.dim(n),
            Kind::Shift(t, k) => t.dim(n + k),
            Kind::Fish(f) => f.dim(n),
        }
    }

    /// `p^{(n,n+1)}`, a `dim(n) × dim(n+1)` matrix.
    pub fn bond(&self, n: usize) -> Matrix {
        match &self.kind {
            Kind::Pc(pc) => pc.bond(n),
            Kind::Sum(a, b) => a.bond(n).block_diag(&b.bond(n)),
            Kind::Shift(t, k) => t.bond(n + k),
            Kind::Fish(f) => f.bond(n),
        }
    }

    /// `p^{(n,m)} = p^{(n,n+1)} ∘ … ∘ p^{(m−1,m)}`.
    pub fn compose(&self, n: usize, m: usize) -> Result<Matrix> {
        if m < n {
            return Err(Error::Precondition(format!("compose_bond needs n <= m, got ({n}, {m})")));
        }
        let mut acc = Matrix::identity(self.dim(n));
        for i in n..m {
            acc = acc.mul_unchecked(&self.bond(i));
        }
        Ok(acc)
    }

    /// `A_β^{(n)}` for `β` zero or a successor.
    pub fn level(&self, beta: &Ordinal, n: usize) -> Result<Derived> {
        if beta.is_limit() {
            return Err(Error::Precondition(format!("level needs a successor or zero ordinal, got {beta}")));
        }
        if beta.is_zero() {
            return Ok(Derived::exact(Lattice::full(self.dim(n))));
        }
        let key = (beta.clone(), n);
        if let Some(d) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(d.clone());
        }
        let d = self.compute_level(beta, n)?;
        self.cache.write().expect("cache lock").insert(key, d.clone());
        Ok(d)
    }

    /// Level `n` of the `α`-th derived tower, `A_{α_n}^{(n)}`.
    pub fn derived(&self, alpha: &Ordinal, n: usize) -> Result<Derived> {
        self.level(&alpha.fundamental(n as u64), n)
    }

    fn compute_level(&self, beta: &Ordinal, n: usize) -> Result<Derived> {
        match &self.kind {
            Kind::Pc(pc) => self.pc_level(pc, beta, n),
            Kind::Sum(a, b) => {
                let (x, y) = (a.level(beta, n)?, b.level(beta, n)?);
                Ok(Derived { lattice: x.lattice.direct_sum(&y.lattice), exactness: x.exactness.join(y.exactness) })
            }
            Kind::Shift(t, k) => t.level(beta, n + k),
            Kind::Fish(f) => match f.closed_form(beta, n)? {
                Some(d) => Ok(d),
                None => {
                    let h = f.horizon.max(n + 4);
                    let d = self.oracle(h)?.level(beta, n)?;
                    Ok(Derived { lattice: d.lattice, exactness: Exactness::LowerBoundOnly(h) })
                }
            },
        }
    }

    fn pc_level(&self, pc: &Pc, beta: &Ordinal, n: usize) -> Result<Derived> {
        let base = pc.base();
        let p = pc.p();
        if n >= p {
            let l = match &pc.tail {
                PcTail::Constant(_) => pc.ei.clone(),
                PcTail::Epi(_) => Lattice::full(pc.dim(n)),
            };
            return Ok(Derived { lattice: l, exactness: base });
        }
        let down = &pc.down[n];
        if *beta == Ordinal::nat(1) {
            // The images of the full levels decrease, so only the tail matters.
            return match &pc.tail {
                PcTail::Constant(m) if m.rows() > 0 => {
                    let s = stable_image_intersection(down, m, &self.ring, 24)?;
                    let ex = if s.exact { base } else { Exactness::LowerBoundOnly(s.precision) };
                    Ok(Derived { lattice: s.lattice, exactness: ex })
                }
                PcTail::Constant(_) => Ok(Derived { lattice: Lattice::zero(pc.dim(n)), exactness: base }),
                PcTail::Epi(d) => Ok(Derived { lattice: Lattice::full(*d).image(down, &self.ring)?, exactness: base }),
            };
        }
        let pred = beta.pred().expect("successor");
        let mut acc = pc.ei.image(down, &self.ring)?;
        if let PcTail::Epi(d) = &pc.tail {
            acc = Lattice::full(*d).image(down, &self.ring)?;
        }
        let mut ex = base;
        let mut comp = Matrix::identity(pc.dim(n));
        for k in 0..(p - n) {
            let g = pred.fundamental(k as u64);
            let lvl = self.level(&g, n + k)?;
            ex = ex.join(lvl.exactness);
            acc = acc.intersection(&lvl.lattice.image(&comp, &self.ring)?, &self.ring)?;
            comp = comp.mul_unchecked(&pc.bond(n + k));
        }
        Ok(Derived { lattice: acc, exactness: ex })
    }

    /// `A_∞^{(n)}`: elements that admit an infinite chain of preimages.
    pub fn a_inf(&self, n: usize) -> Result<Derived> {
        if let Some(d) = self.inf_cache.read().expect("cache lock").get(&n) {
            return Ok(d.clone());
        }
        let d = match &self.kind {
            Kind::Pc(pc) => {
                let l = if n >= pc.p() {
                    match &pc.tail {
                        PcTail::Constant(_) => pc.tail_level_a_inf(),
                        PcTail::Epi(_) => Lattice::full(pc.dim(n)),
                    }
                } else {
                    let top = match &pc.tail {
                        PcTail::Constant(_) => pc.ei.clone(),
                        PcTail::Epi(d) => Lattice::full(*d),
                    };
                    top.image(&pc.down[n], &self.ring)?
                };
                Derived { lattice: l, exactness: pc.base() }
            }
            Kind::Sum(a, b) => {
                let (x, y) = (a.a_inf(n)?, b.a_inf(n)?);
                Derived { lattice: x.lattice.direct_sum(&y.lattice), exactness: x.exactness.join(y.exactness) }
            }
            Kind::Shift(t, k) => t.a_inf(n + k)?,
            Kind::Fish(f) => match f.length_bound() {
                Some(top) if f.straightness().straight => {
                    // A_∞ lies in every derived level; at the length the closed form is exact.
                    let d = self.level(&top, n)?;
                    let ex = if d.lattice.is_zero() { d.exactness } else { Exactness::LowerBoundOnly(f.horizon) };
                    Derived { lattice: d.lattice, exactness: ex }
                }
                _ => {
                    let h = f.horizon.max(n + 4);
                    let d = self.oracle(h)?.a_inf(n)?;
                    Derived { lattice: d.lattice, exactness: Exactness::LowerBoundOnly(h) }
                }
            },
        };
        self.inf_cache.write().expect("cache lock").insert(n, d.clone());
        Ok(d)
    }

    /// The tower cut at level `h` and continued by identities; its derived
    /// levels contain those of `self` at every level `≤ h`.
    pub fn truncation(&self, h: usize) -> Result<Tower> {
        let levels: Vec<Level> = (0..h).map(|n| Level { dim: self.dim(n), bond: self.bond(n) }).collect();
        let spec = TowerSpec { ring: self.ring.clone(), prefix: levels, tail: Tail::Constant { dim: self.dim(h), bond: Matrix::identity(self.dim(h)) } };
        Tower::new(&spec)
    }

    /// The truncation at horizon `h`, cached.
    pub(crate) fn oracle(&self, h: usize) -> Result<Arc<Tower>> {
        if let Some(t) = self.oracles.read().expect("cache lock").get(&h) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.truncation(h)?);
        self.oracles.write().expect("cache lock").insert(h, t.clone());
        Ok(t)
    }

    /// True when the tail repeats exactly, so statements checked on one tail
    /// level hold on all of them.
    pub fn is_periodic(&self) -> bool {
        match &self.kind {
            Kind::Pc(pc) => pc.stage.is_none(),
            Kind::Sum(a, b) => a.is_periodic() && b.is_periodic(),
            Kind::Shift(t, _) => t.is_periodic(),
            Kind::Fish(_) => false,
        }
    }

    /// Number of explicit levels before the periodic tail.
    pub fn prefix_len(&self) -> usize {
        match &self.kind {
            Kind::Pc(pc) => pc.p(),
            Kind::Sum(a, b) => a.prefix_len().max(b.prefix_len()),
            Kind::Shift(t, k) => t.prefix_len().saturating_sub(*k),
            Kind::Fish(_) => 0,
        }
    }

    pub(crate) fn fish(&self) -> Option<&Fish> {
        match &self.kind {
            Kind::Fish(f) => Some(f),
            _ => None,
        }
    }
}

impl Pc {
    pub(crate) fn constant_tail(&self) -> Option<&Matrix> {
        match &self.tail {
            PcTail::Constant(m) => Some(m),
            PcTail::Epi(_) => None,
        }
    }

    pub(crate) fn prefix_len(&self) -> usize {
        self.p()
    }

    pub(crate) fn stage(&self) -> Option<usize> {
        self.stage
    }
}

fn no_prefix(spec: &TowerSpec) -> Result<()> {
    if spec.prefix.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition("prefix levels are only supported with constant, zero, truncated or projection tails".into()))
    }
}

fn same_ring(a: &BaseRing, b: &BaseRing) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Precondition(format!("components over different rings: {a} and {b}")))
    }
}

/// Sum of two prefix-plus-constant towers as one such tower with block bonds.
fn merge_sum(l: &Tower, r: &Tower, ring: &BaseRing) -> Result<Option<Pc>> {
    let (Kind::Pc(a), Kind::Pc(b)) = (&l.kind, &r.kind) else { return Ok(None) };
    let (Some(ma), Some(mb)) = (a.constant_tail(), b.constant_tail()) else { return Ok(None) };
    let p = a.p().max(b.p());
    let la = a.unrolled(p);
    let lb = b.unrolled(p);
    let levels = la
        .into_iter()
        .zip(lb)
        .map(|(x, y)| Level { dim: x.dim + y.dim, bond: x.bond.block_diag(&y.bond) })
        .collect();
    let stage = match (a.stage, b.stage) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    Ok(Some(Pc::new(levels, PcTail::Constant(ma.block_diag(mb)), stage, ring)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> BaseRing {
        BaseRing::integers()
    }

    #[test]
    fn compose_examples() {
        let t = Tower::new(&TowerSpec::scalar(2)).unwrap();
        assert_eq!(t.compose(0, 3).unwrap(), Matrix::from_i64(&[&[8]]));
        assert!(t.compose(2, 2).unwrap().is_identity());
        assert!(t.compose(3, 1).is_err());
        let s = Tower::new(&TowerSpec::sum(TowerSpec::scalar(2), TowerSpec::scalar(1))).unwrap();
        assert_eq!(s.bond(4), Matrix::from_i64(&[&[2, 0], &[0, 1]]));
    }

    #[test]
    fn constant_derived_levels() {
        let t = Tower::new(&TowerSpec::scalar(3)).unwrap();
        for n in 0..4 {
            assert!(t.level(&Ordinal::nat(1), n).unwrap().lattice.is_zero());
            assert!(t.a_inf(n).unwrap().lattice.is_zero());
        }
        let id = Tower::new(&TowerSpec::scalar(1)).unwrap();
        assert!(id.a_inf(2).unwrap().lattice.is_full());
    }

    #[test]
    fn prefix_levels_use_the_stable_image() {
        // ℤ² ← ℤ² by [[1,1],[0,0]] then ×2 on the first coordinate forever.
        let spec = TowerSpec {
            ring: z(),
            prefix: vec![Level { dim: 2, bond: Matrix::from_i64(&[&[1, 1], &[0, 0]]) }],
            tail: Tail::Constant { dim: 2, bond: Matrix::from_i64(&[&[2, 0], &[0, 1]]) },
        };
        let t = Tower::new(&spec).unwrap();
        let a1 = t.level(&Ordinal::nat(1), 0).unwrap();
        assert!(a1.exactness.is_exact());
        assert_eq!(a1.lattice, Lattice::from_i64(2, &[&[1, 0]], &z()));
        let a2 = t.level(&Ordinal::nat(2), 0).unwrap();
        assert_eq!(a2.lattice, a1.lattice);
    }

    #[test]
    fn shift_and_truncation() {
        let spec = TowerSpec::shift(TowerSpec::scalar(5), 3);
        let t = Tower::new(&spec).unwrap();
        assert_eq!(t.bond(0), Matrix::from_i64(&[&[5]]));
        let tr = Tower::new(&TowerSpec::scalar(2)).unwrap().truncation(4).unwrap();
        assert_eq!(tr.level(&Ordinal::nat(1), 1).unwrap().lattice, Lattice::from_i64(1, &[&[8]], &z()));
    }

    #[test]
    fn projection_tail() {
        let spec = TowerSpec { ring: z(), prefix: vec![], tail: Tail::Projections { start_dim: 1 } };
        let t = Tower::new(&spec).unwrap();
        assert_eq!(t.dim(3), 4);
        assert_eq!(t.bond(1).rows(), 2);
        assert!(t.level(&Ordinal::nat(2), 2).unwrap().lattice.is_full());
    }
}
