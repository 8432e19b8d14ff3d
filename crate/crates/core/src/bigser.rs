//! Serde adapters for arbitrary-precision integers.
//!
//! Certificates must stay byte-stable and survive readers that cannot parse
//! arbitrarily large JSON numbers, so integers are serialized as decimal
//! strings. Deserialization also accepts plain JSON integers for
//! hand-written inputs.

use std::fmt;

use num_bigint::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

pub fn serialize<S: Serializer>(value: &BigInt, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&value.to_string())
}

struct BigIntVisitor;

impl Visitor<'_> for BigIntVisitor {
    type Value = BigInt;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a decimal integer string or JSON integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<BigInt, E> {
        v.trim()
            .parse::<BigInt>()
            .map_err(|_| E::custom(format!("invalid integer literal: {v:?}")))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<BigInt, E> {
        Ok(BigInt::from(v))
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigInt, D::Error> {
    de.deserialize_any(BigIntVisitor)
}
