//! Localizations of ℤ: either a finite set of inverted primes, or the local
//! ring at one prime (every other prime inverted).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseRing {
    /// ℤ with the listed primes made invertible (empty: ℤ itself).
    Inverted(BTreeSet<u64>),
    /// ℤ localized at `p`: every prime other than `p` is a unit.
    LocalAt(u64),
}

impl Default for BaseRing {
    fn default() -> Self {
        BaseRing::integers()
    }
}

pub fn is_prime_u64(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

/// Prime factorization of `|n|` (empty for 0 and ±1).
pub fn factorize(n: &BigInt) -> BTreeMap<BigInt, u32> {
    if n.is_zero() {
        return BTreeMap::new();
    }
    let m: BigUint = n.magnitude().clone();
    num_prime::nt_funcs::factorize(m)
        .into_iter()
        .map(|(p, e)| (BigInt::from_biguint(Sign::Plus, p), e as u32))
        .collect()
}

impl BaseRing {
    pub fn integers() -> Self {
        BaseRing::Inverted(BTreeSet::new())
    }

    pub fn inverting(primes: &[u64]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &p in primes {
            if !is_prime_u64(p) {
                return Err(Error::Precondition(format!("{p} is not prime")));
            }
            if !set.insert(p) {
                return Err(Error::Precondition(format!("prime {p} listed twice")));
            }
        }
        Ok(BaseRing::Inverted(set))
    }

    pub fn local_at(p: u64) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        Ok(BaseRing::LocalAt(p))
    }

    pub fn is_integers(&self) -> bool {
        matches!(self, BaseRing::Inverted(s) if s.is_empty())
    }

    pub fn is_prime_unit(&self, p: &BigInt) -> bool {
        match self {
            BaseRing::Inverted(s) => s.iter().any(|&q| BigInt::from(q) == *p),
            BaseRing::LocalAt(q) => BigInt::from(*q) != *p,
        }
    }

    /// The non-unit part of `n`: a positive integer generating the same ideal
    /// of the ring as `n`. Zero stays zero.
    pub fn non_unit_part(&self, n: &BigInt) -> BigInt {
        if n.is_zero() {
            return BigInt::zero();
        }
        match self {
            BaseRing::Inverted(s) => {
                let mut m = n.abs();
                for &p in s {
                    let p = BigInt::from(p);
                    while m.is_multiple_of(&p) {
                        m /= &p;
                    }
                }
                m
            }
            BaseRing::LocalAt(p) => {
                let p = BigInt::from(*p);
                let mut m = n.abs();
                let mut out = BigInt::one();
                while m.is_multiple_of(&p) {
                    m /= &p;
                    out *= &p;
                }
                out
            }
        }
    }

    pub fn is_unit(&self, n: &BigInt) -> bool {
        self.non_unit_part(n).is_one()
    }

    /// The distinct non-unit primes dividing `n` (`n ≠ 0`).
    pub fn non_unit_primes(&self, n: &BigInt) -> Vec<BigInt> {
        match self {
            BaseRing::LocalAt(p) => {
                let p = BigInt::from(*p);
                if !n.is_zero() && n.is_multiple_of(&p) {
                    vec![p]
                } else {
                    vec![]
                }
            }
            BaseRing::Inverted(_) => factorize(&self.non_unit_part(n)).into_keys().collect(),
        }
    }

    pub fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Inverted(s) if s.is_empty() => write!(f, "Z"),
            BaseRing::Inverted(s) => {
                let ps: Vec<String> = s.iter().map(|p| p.to_string()).collect();
                write!(f, "Z[1/{}]", ps.join(","))
            }
            BaseRing::LocalAt(p) => write!(f, "Z_({p})"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RingJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inverted_primes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    local_at: Option<u64>,
}

impl Serialize for BaseRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match self {
            BaseRing::Inverted(set) => RingJson { inverted_primes: Some(set.iter().copied().collect()), local_at: None },
            BaseRing::LocalAt(p) => RingJson { inverted_primes: None, local_at: Some(*p) },
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BaseRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = RingJson::deserialize(d)?;
        match (j.inverted_primes, j.local_at) {
            (Some(_), Some(_)) => Err(D::Error::custom("ring: give either inverted_primes or local_at")),
            (None, Some(p)) => BaseRing::local_at(p).map_err(D::Error::custom),
            (ps, None) => BaseRing::inverting(&ps.unwrap_or_default()).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_stripping() {
        let r = BaseRing::inverting(&[2]).unwrap();
        assert_eq!(r.non_unit_part(&BigInt::from(-24)), BigInt::from(3));
        assert!(r.is_unit(&BigInt::from(16)));
        let l = BaseRing::local_at(3).unwrap();
        assert_eq!(l.non_unit_part(&BigInt::from(-36)), BigInt::from(9));
        assert!(l.is_unit(&BigInt::from(10)));
        assert!(!BaseRing::integers().is_unit(&BigInt::from(2)));
    }

    #[test]
    fn rejects_bad_primes() {
        assert!(BaseRing::inverting(&[4]).is_err());
        assert!(BaseRing::inverting(&[3, 3]).is_err());
    }

    #[test]
    fn json_forms() {
        let r: BaseRing = serde_json::from_str(r#"{"inverted_primes":[5,2]}"#).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"inverted_primes":[2,5]}"#);
        let l: BaseRing = serde_json::from_str(r#"{"local_at":7}"#).unwrap();
        assert_eq!(l, BaseRing::LocalAt(7));
        let z: BaseRing = serde_json::from_str("{}").unwrap();
        assert!(z.is_integers());
    }

    #[test]
    fn factor_small() {
        let f = factorize(&BigInt::from(-360));
        let v: Vec<(i64, u32)> = f.iter().map(|(p, e)| (p.try_into().unwrap(), *e)).collect();
        assert_eq!(v, vec![(2, 3), (3, 2), (5, 1)]);
    }
}
