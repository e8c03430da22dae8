//! Ordinals below ω^ω in Cantor normal form, with a fixed rule for
//! fundamental sequences.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents must stay below this bound unless a caller asks for more.
pub const DEFAULT_EXPONENT_CAP: u32 = 10;

/// Identifier of the fundamental-sequence rule, echoed in every report.
pub const FUNDAMENTAL_RULE: &str = "cnf-peel-v1: (b + w^e)[n] = b + w^(e-1)*(n+1) + 1 for e >= 2, b + (n+1) for e = 1";

/// `Σ ω^e·c` with strictly decreasing exponents and positive coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: vec![] }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(0, n)] }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(1)
    }

    pub fn omega_pow(e: u32) -> Self {
        Ordinal { terms: vec![(e, 1)] }
    }

    /// `ω^e·c`.
    pub fn term(e: u32, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(e, c)] }
        }
    }

    pub fn from_terms(terms: Vec<(u32, u64)>) -> Result<Self> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(Error::Parse("exponents must strictly decrease".into()));
            }
        }
        if terms.iter().any(|&(_, c)| c == 0) {
            return Err(Error::Parse("coefficients must be positive".into()));
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|&(e, _)| e == 0)
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|&(e, _)| e > 0)
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, c)] => Some(*c),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn leading_exponent(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0)
    }

    pub fn last_exponent(&self) -> Option<u32> {
        self.terms.last().map(|t| t.0)
    }

    /// Ordinal sum `self + other` (lower terms of `self` are absorbed).
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(&(e0, c0)) = other.terms.first() else { return self.clone() };
        let mut terms: Vec<(u32, u64)> = self.terms.iter().copied().filter(|&(e, _)| e >= e0).collect();
        match terms.last_mut() {
            Some(last) if last.0 == e0 => last.1 += c0,
            _ => terms.push((e0, c0)),
        }
        terms.extend(other.terms.iter().skip(1).copied());
        Ordinal { terms }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::nat(1))
    }

    /// `α − 1` for a successor `α`.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().unwrap();
        last.1 -= 1;
        if last.1 == 0 {
            terms.pop();
        }
        Some(Ordinal { terms })
    }

    /// `self·n` for a natural `n`.
    pub fn mul_nat(&self, n: u64) -> Ordinal {
        if n == 0 || self.is_zero() {
            return Ordinal::zero();
        }
        let mut terms = self.terms.clone();
        terms[0].1 *= n;
        Ordinal { terms }
    }

    /// The n-th term of the canonical fundamental sequence; successors and 0
    /// are returned unchanged.
    pub fn fundamental(&self, n: u64) -> Ordinal {
        if !self.is_limit() {
            return self.clone();
        }
        let mut terms = self.terms.clone();
        let (e, c) = terms.pop().unwrap();
        if c > 1 {
            terms.push((e, c - 1));
        }
        let beta = Ordinal { terms };
        if e == 1 {
            beta.add(&Ordinal::nat(n + 1))
        } else {
            beta.add(&Ordinal::term(e - 1, n + 1)).succ()
        }
    }

    /// Recover `λ` from a prefix `λ_0, λ_1, …` of its fundamental sequence.
    /// Needs at least two terms; the answer is checked against every term.
    pub fn limit_of(seq: &[Ordinal]) -> Option<Ordinal> {
        if seq.len() < 2 {
            return None;
        }
        let (a, b) = (&seq[0], &seq[1]);
        let common = a.terms.iter().zip(&b.terms).take_while(|(x, y)| x == y).count();
        let (e, _) = *b.terms.get(common)?;
        let head = Ordinal { terms: b.terms[..common].to_vec() };
        let lam = head.add(&Ordinal::omega_pow(e + 1));
        let ok = seq.iter().enumerate().all(|(n, s)| lam.fundamental(n as u64) == *s);
        ok.then_some(lam)
    }

    pub fn parse_with_cap(s: &str, cap: u32) -> Result<Ordinal> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty ordinal".into()));
        }
        if t == "0" {
            return Ok(Ordinal::zero());
        }
        let mut terms: Vec<(u32, u64)> = Vec::new();
        for raw in t.split('+') {
            let part = raw.trim();
            let (e, c) = parse_term(part).ok_or_else(|| Error::Parse(format!("bad ordinal term {part:?} in {s:?}")))?;
            if e >= cap {
                return Err(Error::Parse(format!("exponent {e} reaches the cap w^{cap}")));
            }
            if c == 0 {
                return Err(Error::Parse(format!("zero coefficient in {s:?}")));
            }
            if let Some(&(pe, _)) = terms.last() {
                if e >= pe {
                    return Err(Error::Parse(format!("terms of {s:?} are not in Cantor normal form")));
                }
            }
            terms.push((e, c));
        }
        Ok(Ordinal { terms })
    }

    /// Ordinals `< ω^cap` as a coarse check used by recursions.
    pub fn below_cap(&self, cap: u32) -> bool {
        self.leading_exponent().is_none_or(|e| e < cap)
    }
}

fn parse_term(t: &str) -> Option<(u32, u64)> {
    if t.is_empty() {
        return None;
    }
    if t.bytes().all(|b| b.is_ascii_digit()) {
        return Some((0, t.parse().ok()?));
    }
    let rest = t.strip_prefix('w')?;
    let (exp, coef) = match rest.split_once('*') {
        Some((a, b)) => (a, Some(b)),
        None => (rest, None),
    };
    let e = if exp.is_empty() {
        1
    } else {
        let d = exp.strip_prefix('^')?;
        if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        d.parse().ok()?
    };
    let c = match coef {
        None => 1,
        Some(c) if !c.is_empty() && c.bytes().all(|b| b.is_ascii_digit()) => c.parse().ok()?,
        Some(_) => return None,
    };
    Some((e, c))
}

impl FromStr for Ordinal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ordinal::parse_with_cap(s, DEFAULT_EXPONENT_CAP)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(e, c)| {
                let base = match e {
                    0 => return c.to_string(),
                    1 => "w".to_string(),
                    _ => format!("w^{e}"),
                };
                if c == 1 {
                    base
                } else {
                    format!("{base}*{c}")
                }
            })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Serialize, Deserialize)]
struct OrdJson {
    cnf: Vec<(u32, u64)>,
}

impl Serialize for Ordinal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrdJson { cnf: self.terms.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    /// Accepts either `{"cnf": [[e, c], ...]}` or a grammar string.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Cnf(OrdJson),
            Text(String),
        }
        match Either::deserialize(d)? {
            Either::Cnf(j) => Ordinal::from_terms(j.cnf).map_err(D::Error::custom),
            Either::Text(s) => s.parse().map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(o("w^2*2+3").cmp(&o("w^3")), Ordering::Less);
        assert_eq!(o("w+1").add(&o("w")), o("w*2"));
        assert_eq!(o("w^2").succ(), o("w^2+1"));
        assert_eq!(o("w^1*1").to_string(), "w");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "w^", "w+w", "1+w", "w^10", "x", "w*0", "3+"] {
            assert!(bad.parse::<Ordinal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn fundamental_examples() {
        assert_eq!(o("w").fundamental(3), o("4"));
        assert_eq!(o("w^2").fundamental(2), o("w*3+1"));
        assert_eq!(o("5").fundamental(7), o("5"));
        assert_eq!(o("w*2").fundamental(0), o("w+1"));
        assert_eq!(o("w^3+w^2").fundamental(1), o("w^3+w*2+1"));
    }

    #[test]
    fn limit_reconstruction() {
        for s in ["w", "w^2", "w*3", "w^4+w^2", "w^2*2+w"] {
            let l = o(s);
            let seq: Vec<Ordinal> = (0..4).map(|n| l.fundamental(n)).collect();
            assert_eq!(Ordinal::limit_of(&seq), Some(l));
        }
    }

    #[test]
    fn json_forms() {
        let a = o("w^2*2+3");
        let j = serde_json::to_string(&a).unwrap();
        assert_eq!(j, r#"{"cnf":[[2,2],[0,3]]}"#);
        assert_eq!(serde_json::from_str::<Ordinal>(&j).unwrap(), a);
        assert_eq!(serde_json::from_str::<Ordinal>("\"w+1\"").unwrap(), o("w+1"));
    }
}
