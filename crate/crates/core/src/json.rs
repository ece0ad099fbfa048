//! JSON encoding for arbitrary-precision integers: a plain number when it fits
//! in 64 bits, a decimal string otherwise.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

struct JsonIntVisitor;

impl<'de> Visitor<'de> for JsonIntVisitor {
    type Value = JsonInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a decimal integer string")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
        Ok(JsonInt(v.into()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
        Ok(JsonInt(v.into()))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
        BigInt::from_str(v.trim())
            .map(JsonInt)
            .map_err(|_| E::invalid_value(de::Unexpected::Str(v), &self))
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(JsonIntVisitor)
    }
}

pub fn wrap(v: &BigInt) -> JsonInt {
    JsonInt(v.clone())
}

/// For `#[serde(serialize_with = ...)]` on `BigInt` fields.
pub fn serialize_big<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    wrap(v).serialize(s)
}

pub fn serialize_big_grid<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<JsonInt>> = v.iter().map(|r| r.iter().map(wrap).collect()).collect();
    rows.serialize(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_are_numbers_large_values_are_strings() {
        let small = serde_json::to_string(&JsonInt(BigInt::from(-151))).unwrap();
        assert_eq!(small, "-151");
        let big: BigInt = BigInt::from(u64::MAX) * 1000;
        let text = serde_json::to_string(&JsonInt(big.clone())).unwrap();
        assert_eq!(text, format!("\"{big}\""));
        let back: JsonInt = serde_json::from_str(&text).unwrap();
        assert_eq!(back.0, big);
        let from_u64: JsonInt = serde_json::from_str(&u64::MAX.to_string()).unwrap();
        assert_eq!(from_u64.0, BigInt::from(u64::MAX));
    }
}
