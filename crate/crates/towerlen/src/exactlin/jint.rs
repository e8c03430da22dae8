//! JSON integers of arbitrary size: plain numbers when they fit in `i64`,
//! decimal strings otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JInt(pub BigInt);

impl Serialize for JInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = JInt;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JInt, E> {
                Ok(JInt(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JInt, E> {
                Ok(JInt(v.into()))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<JInt, E> {
                if v.fract() == 0.0 && v.abs() < 9.0e15 {
                    Ok(JInt((v as i64).into()))
                } else {
                    Err(E::custom(format!("non-integral number {v}")))
                }
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<JInt, E> {
                v.trim().parse::<BigInt>().map(JInt).map_err(|_| E::custom(format!("bad integer {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn to_json_vec(v: &[BigInt]) -> Vec<JInt> {
    v.iter().cloned().map(JInt).collect()
}

/// `#[serde(with = "…")]` adapter for `Vec<BigInt>` fields.
pub mod vec {
    use super::JInt;
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        super::to_json_vec(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Ok(Vec::<JInt>::deserialize(d)?.into_iter().map(|x| x.0).collect())
    }
}
