//! Countable flat modules presented as colimits `C₀ → C₁ → …` of finite
//! free modules along injective transitions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{BaseRing, Lattice, Matrix};
use crate::ordinals::Ordinal;

/// One explicit stage `C_n = R^rank` and its transition into the next stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub rank: usize,
    /// `rank(n+1) × rank`.
    pub transition: Matrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColimTail {
    /// The same transition forever.
    Constant { rank: usize, transition: Matrix },
    /// `R^r ⊂ R^{r+1} ⊂ …` as the first coordinates.
    SplitInclusions { start_rank: usize },
    /// Known up to a top stage of rank `top_rank`; wedge sums and `Ξ(τ)`
    /// are materialized this way.
    StageLimited { top_rank: usize },
    /// Stagewise direct sum; only allowed without explicit stages.
    Sum { left: Box<ColimSpec>, right: Box<ColimSpec> },
}

/// How a module was built, for reading off tree-length bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    Finite,
    FiniteRank,
    Split,
    Xi { p: u64 },
    Wedge { arms: Vec<Construction> },
    Sum { parts: Vec<Construction> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColimSpec {
    #[serde(default)]
    pub ring: BaseRing,
    #[serde(default)]
    pub stages: Vec<Stage>,
    pub tail: ColimTail,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
}

fn inclusion(r: usize) -> Matrix {
    let mut m = Matrix::zeros(r + 1, r);
    m.put_block(0, 0, &Matrix::identity(r));
    m
}

impl ColimSpec {
    /// Validated constructor.
    pub fn new(ring: BaseRing, stages: Vec<Stage>, tail: ColimTail, construction: Option<Construction>) -> Result<Self> {
        let c = ColimSpec { ring, stages, tail, construction };
        c.validate()?;
        Ok(c)
    }

    /// `R^k` with identity transitions.
    pub fn finite(ring: BaseRing, rank: usize) -> Self {
        ColimSpec {
            ring,
            stages: vec![],
            tail: ColimTail::Constant { rank, transition: Matrix::identity(rank) },
            construction: Some(Construction::Finite),
        }
    }

    /// The colimit of `R^k → R^k → …` along `m`.
    pub fn constant(ring: BaseRing, transition: Matrix) -> Result<Self> {
        let construction = if transition.is_identity() { Construction::Finite } else { Construction::FiniteRank };
        Self::new(ring, vec![], ColimTail::Constant { rank: transition.rows(), transition }, Some(construction))
    }

    /// `ℤ[1/p]` as `ℤ → ℤ → …` along multiplication by `p`.
    pub fn localization(p: i64) -> Self {
        Self::constant(BaseRing::integers(), Matrix::from_i64(&[&[p]])).expect("nonzero scalar")
    }

    /// A free module of countable rank.
    pub fn split_inclusions(ring: BaseRing, start_rank: usize) -> Self {
        ColimSpec { ring, stages: vec![], tail: ColimTail::SplitInclusions { start_rank }, construction: Some(Construction::Split) }
    }

    pub fn direct_sum(left: ColimSpec, right: ColimSpec) -> Result<Self> {
        if left.ring != right.ring {
            return Err(Error::Precondition(format!("direct sum over different rings {} and {}", left.ring, right.ring)));
        }
        let construction = match (&left.construction, &right.construction) {
            (Some(a), Some(b)) => Some(Construction::Sum { parts: vec![a.clone(), b.clone()] }),
            _ => None,
        };
        Self::new(left.ring.clone(), vec![], ColimTail::Sum { left: Box::new(left), right: Box::new(right) }, construction)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: ColimSpec = serde_json::from_str(s).map_err(|e| Error::Parse(format!("module: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("module specs serialize")
    }

    /// Index of the last known stage; `None` when every stage is known.
    pub fn known_stages(&self) -> Option<usize> {
        match &self.tail {
            ColimTail::StageLimited { .. } => Some(self.stages.len()),
            ColimTail::Sum { left, right } => match (left.known_stages(), right.known_stages()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            _ => None,
        }
    }

    fn check_known(&self, n: usize) -> Result<()> {
        match self.known_stages() {
            Some(k) if n > k => Err(Error::Precondition(format!("stage {n} lies beyond the last known stage {k}"))),
            _ => Ok(()),
        }
    }

    /// `rank C_n`.
    pub fn rank(&self, n: usize) -> Result<usize> {
        self.check_known(n)?;
        let len = self.stages.len();
        if n < len {
            return Ok(self.stages[n].rank);
        }
        Ok(match &self.tail {
            ColimTail::Constant { rank, .. } => *rank,
            ColimTail::SplitInclusions { start_rank } => start_rank + (n - len),
            ColimTail::StageLimited { top_rank } => *top_rank,
            ColimTail::Sum { left, right } => left.rank(n)? + right.rank(n)?,
        })
    }

    /// `C_n → C_{n+1}`.
    pub fn transition(&self, n: usize) -> Result<Matrix> {
        self.check_known(n + 1)?;
        let len = self.stages.len();
        if n < len {
            return Ok(self.stages[n].transition.clone());
        }
        Ok(match &self.tail {
            ColimTail::Constant { transition, .. } => transition.clone(),
            ColimTail::SplitInclusions { start_rank } => inclusion(start_rank + (n - len)),
            ColimTail::StageLimited { .. } => unreachable!("checked above"),
            ColimTail::Sum { left, right } => left.transition(n)?.block_diag(&right.transition(n)?),
        })
    }

    /// `C_n → C_m` for `n ≤ m`.
    pub fn compose(&self, n: usize, m: usize) -> Result<Matrix> {
        if m < n {
            return Err(Error::Precondition(format!("compose needs n <= m, got ({n}, {m})")));
        }
        let mut acc = Matrix::identity(self.rank(n)?);
        for i in n..m {
            acc = self.transition(i)?.mul(&acc)?;
        }
        Ok(acc)
    }

    /// Whether the image of `C_n` in `C_{n+1}` is a pure submodule.
    pub fn is_pure(&self, n: usize) -> Result<bool> {
        let t = self.transition(n)?;
        Ok(Lattice::from_generators(&t.transpose(), &self.ring).is_saturated())
    }

    /// Purity flags for stages `0..upto`, stopping at the last known stage.
    pub fn purity_flags(&self, upto: usize) -> Result<Vec<bool>> {
        let top = self.known_stages().map_or(upto, |k| k.min(upto));
        (0..top).map(|n| self.is_pure(n)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if let ColimTail::Sum { left, right } = &self.tail {
            if !self.stages.is_empty() {
                return Err(Error::Precondition("a direct sum carries no explicit stages".into()));
            }
            if left.ring != self.ring || right.ring != self.ring {
                return Err(Error::Precondition("direct summands must share the ring".into()));
            }
            left.validate()?;
            return right.validate();
        }
        let len = self.stages.len();
        for n in 0..len {
            let t = &self.stages[n].transition;
            let next = self.rank(n + 1)?;
            if t.cols() != self.stages[n].rank || t.rows() != next {
                return Err(Error::Shape(format!(
                    "transition {n} is {}x{}, expected {next}x{}",
                    t.rows(),
                    t.cols(),
                    self.stages[n].rank
                )));
            }
            if t.rank() != t.cols() {
                return Err(Error::Precondition(format!("transition {n} is not injective")));
            }
        }
        if let ColimTail::Constant { rank, transition } = &self.tail {
            if transition.rows() != *rank || transition.cols() != *rank {
                return Err(Error::Shape(format!("constant transition must be {rank}x{rank}")));
            }
            if transition.rank() != *rank {
                return Err(Error::Precondition("constant transition is not injective".into()));
            }
        }
        Ok(())
    }
}

/// Truncations `τ₀, τ₁, …` of a `p`-adic integer, `τ_n ∈ [0, p^{n+1})`.
/// JSON carries the base-`p` digits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DigitsJson", into = "DigitsJson")]
pub struct PAdicDigits {
    pub p: u64,
    pub truncations: Vec<BigInt>,
    /// Whether `τ ≡ 1 (mod p)` is required.
    pub unit_mod_p: bool,
}

#[derive(Serialize, Deserialize)]
struct DigitsJson {
    p: u64,
    digits: Vec<u64>,
    #[serde(default)]
    unit_mod_p: bool,
}

impl TryFrom<DigitsJson> for PAdicDigits {
    type Error = Error;
    fn try_from(j: DigitsJson) -> Result<Self> {
        if let Some(d) = j.digits.iter().find(|&&d| d >= j.p) {
            return Err(Error::Parse(format!("digit {d} is not below {}", j.p)));
        }
        PAdicDigits::from_digits(j.p, &j.digits, j.unit_mod_p)
    }
}

impl From<PAdicDigits> for DigitsJson {
    fn from(d: PAdicDigits) -> Self {
        DigitsJson { p: d.p, digits: d.digits(), unit_mod_p: d.unit_mod_p }
    }
}

impl PAdicDigits {
    /// Base-`p` digits `d_n = (τ_n − τ_{n−1}) / p^n`.
    pub fn digits(&self) -> Vec<u64> {
        let pb = BigInt::from(self.p);
        let mut prev = BigInt::zero();
        let mut pk = BigInt::one();
        let mut out = Vec::with_capacity(self.truncations.len());
        for t in &self.truncations {
            let d: BigInt = (t - &prev) / &pk;
            out.push(u64::try_from(&d).expect("digits are below p"));
            prev = t.clone();
            pk *= &pb;
        }
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("digits: {e}")))
    }

    /// From base-`p` digits `d₀, d₁, …`.
    pub fn from_digits(p: u64, digits: &[u64], unit_mod_p: bool) -> Result<Self> {
        let pb = BigInt::from(p);
        let mut pk = BigInt::one();
        let mut acc = BigInt::zero();
        let mut truncations = Vec::with_capacity(digits.len());
        for &d in digits {
            acc += &pk * BigInt::from(d);
            pk *= &pb;
            truncations.push(acc.clone());
        }
        let out = PAdicDigits { p, truncations, unit_mod_p };
        out.validate()?;
        Ok(out)
    }

    /// `count` digits drawn from a seeded stream, with `d₀ = 1`.
    pub fn random(p: u64, count: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let digits: Vec<u64> = (0..count).map(|k| if k == 0 { 1 } else { rng.gen_range(0..p) }).collect();
        Self::from_digits(p, &digits, true)
    }

    pub fn validate(&self) -> Result<()> {
        if !crate::exactlin::ring::is_prime_u64(self.p) {
            return Err(Error::Precondition(format!("{} is not prime", self.p)));
        }
        let pb = BigInt::from(self.p);
        let mut pk = pb.clone();
        for (n, t) in self.truncations.iter().enumerate() {
            if t < &BigInt::zero() || t >= &pk {
                return Err(Error::Precondition(format!("truncation {n} is outside [0, p^{})", n + 1)));
            }
            if n > 0 && !(t - &self.truncations[n - 1]).is_multiple_of(&(&pk / &pb)) {
                return Err(Error::Precondition(format!("truncations {} and {n} are incompatible", n - 1)));
            }
            pk *= &pb;
        }
        if self.unit_mod_p {
            if let Some(t) = self.truncations.first() {
                if !(t - BigInt::one()).is_multiple_of(&pb) {
                    return Err(Error::Precondition("tau is not 1 mod p".into()));
                }
            }
        }
        Ok(())
    }

    /// `c_n` with `τ_{n+1} = τ_n + c_n p^{n+1}`.
    pub fn carry(&self, n: usize) -> BigInt {
        let pk = BigInt::from(self.p).pow(n as u32 + 1);
        (&self.truncations[n + 1] - &self.truncations[n]) / pk
    }
}

/// Syntactic plain-tree-length bound of a constructor-built module.
pub fn tree_length_certificate(c: &ColimSpec) -> Result<Ordinal> {
    match &c.construction {
        Some(t) => Ok(tree_bound(t)),
        None => Err(Error::Precondition("the module has no construction tree".into())),
    }
}

fn tree_bound(t: &Construction) -> Ordinal {
    match t {
        Construction::Finite => Ordinal::zero(),
        Construction::FiniteRank | Construction::Split | Construction::Xi { .. } => Ordinal::nat(1),
        Construction::Wedge { arms } => match arms.iter().map(tree_bound).max() {
            Some(b) => b.succ(),
            None => Ordinal::zero(),
        },
        Construction::Sum { parts } => parts.iter().map(tree_bound).max().unwrap_or_else(Ordinal::zero),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_access() {
        let c = ColimSpec::split_inclusions(BaseRing::integers(), 1);
        assert_eq!(c.rank(3).unwrap(), 4);
        assert_eq!(c.compose(0, 2).unwrap(), Matrix::from_i64(&[&[1], &[0], &[0]]));
        let s = ColimSpec::direct_sum(ColimSpec::localization(2), c).unwrap();
        assert_eq!(s.rank(2).unwrap(), 4);
        assert_eq!(s.transition(0).unwrap().rows(), 3);
        assert!(s.purity_flags(4).unwrap().iter().all(|&x| !x));
        assert!(ColimSpec::finite(BaseRing::integers(), 2).purity_flags(3).unwrap().iter().all(|&x| x));
    }

    #[test]
    fn rejects_bad_transitions() {
        let r = ColimSpec::new(
            BaseRing::integers(),
            vec![Stage { rank: 1, transition: Matrix::from_i64(&[&[0]]) }],
            ColimTail::StageLimited { top_rank: 1 },
            None,
        );
        assert!(matches!(r, Err(Error::Precondition(_))));
        let r = ColimSpec::new(
            BaseRing::integers(),
            vec![Stage { rank: 1, transition: Matrix::from_i64(&[&[1, 0]]) }],
            ColimTail::StageLimited { top_rank: 1 },
            None,
        );
        assert!(matches!(r, Err(Error::Shape(_))));
        let c = ColimSpec::new(BaseRing::integers(), vec![], ColimTail::StageLimited { top_rank: 2 }, None).unwrap();
        assert!(c.rank(1).is_err());
    }

    #[test]
    fn digits() {
        let d = PAdicDigits::from_digits(3, &[1, 2, 0, 1], true).unwrap();
        let t: Vec<i64> = d.truncations.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(t, vec![1, 7, 7, 34]);
        assert_eq!(d.carry(0), BigInt::from(2));
        assert_eq!(d.carry(2), BigInt::from(1));
        let bad = PAdicDigits { p: 3, truncations: vec![BigInt::from(1), BigInt::from(5)], unit_mod_p: true };
        assert!(bad.validate().is_err());
        assert!(PAdicDigits::from_digits(3, &[2], true).is_err());
        let r = PAdicDigits::random(3, 64, 7).unwrap();
        assert_eq!(r, PAdicDigits::random(3, 64, 7).unwrap());
        assert_eq!(r.truncations.len(), 64);
        let j = serde_json::to_string(&d).unwrap();
        assert_eq!(j, r#"{"p":3,"digits":[1,2,0,1],"unit_mod_p":true}"#);
        assert_eq!(PAdicDigits::from_json(&j).unwrap(), d);
        assert!(PAdicDigits::from_json(r#"{"p":3,"digits":[1,3]}"#).is_err());
    }

    #[test]
    fn tree_bounds() {
        assert_eq!(tree_length_certificate(&ColimSpec::finite(BaseRing::integers(), 3)).unwrap(), Ordinal::zero());
        assert_eq!(tree_length_certificate(&ColimSpec::localization(5)).unwrap(), Ordinal::nat(1));
        let s = ColimSpec::direct_sum(ColimSpec::localization(5), ColimSpec::localization(7)).unwrap();
        assert_eq!(tree_length_certificate(&s).unwrap(), Ordinal::nat(1));
        let mut bare = ColimSpec::localization(5);
        bare.construction = None;
        assert!(tree_length_certificate(&bare).is_err());
    }
}
