//! JSON encodings shared by every file format.
//!
//! Integers are written as JSON numbers when they fit in an `i64` and as
//! decimal strings otherwise; both forms are accepted on input. Rationals
//! are always strings, `"p"` or `"p/q"`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::exactmath::{format_rational, parse_rational, IntMatrix, IntVector, RatVector};

/// A big integer that (de)serializes as a number or numeric string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub BigInt);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
                Ok(JsonInt(BigInt::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
                Ok(JsonInt(BigInt::from(v)))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<JsonInt, E> {
                if v.fract() == 0.0 && v.abs() < 9.0e15 {
                    Ok(JsonInt(BigInt::from(v as i64)))
                } else {
                    Err(E::custom(format!("{v} is not an integer")))
                }
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
                BigInt::from_str(v.trim())
                    .map(JsonInt)
                    .map_err(|_| E::custom(format!("{v:?} is not an integer")))
            }
        }
        d.deserialize_any(V)
    }
}

pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        JsonInt(v.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        JsonInt::deserialize(d).map(|j| j.0)
    }
}

/// A rational that (de)serializes as `"p/q"`; numbers are accepted on
/// input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonRational(pub BigRational);

impl Serialize for JsonRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for JsonRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonRational;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonRational, E> {
                Ok(JsonRational(BigRational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonRational, E> {
                Ok(JsonRational(BigRational::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonRational, E> {
                parse_rational(v).map(JsonRational).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        JsonRational::deserialize(d).map(|r| r.0)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for e in v {
                seq.serialize_element(&format_rational(e))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            Vec::<JsonRational>::deserialize(d).map(|v| v.into_iter().map(|r| r.0).collect())
        }
    }
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for e in self.iter() {
            seq.serialize_element(&JsonInt(e.clone()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = IntVector;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of integers")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<IntVector, A::Error> {
                let mut out = Vec::new();
                while let Some(JsonInt(e)) = seq.next_element()? {
                    out.push(e);
                }
                Ok(IntVector::new(out))
            }
        }
        d.deserialize_seq(V)
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows()))?;
        for r in 0..self.rows() {
            seq.serialize_element(&self.row_vector(r))?;
        }
        seq.end()
    }
}

/// A matrix read from JSON keeps `cols == 0` when it has no rows; callers
/// that know the intended width fix it up with [`IntMatrix::with_width`].
impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<IntVector>::deserialize(d)?;
        let cols = rows.first().map_or(0, IntVector::len);
        IntMatrix::from_rows(rows.into_iter().map(IntVector::into_inner).collect(), cols)
            .map_err(de::Error::custom)
    }
}

impl IntMatrix {
    /// An empty (row-less) matrix takes on the width `cols`; any other
    /// matrix must already have it.
    pub fn with_width(self, cols: usize) -> crate::Result<IntMatrix> {
        if self.rows() == 0 {
            return Ok(IntMatrix::zeros(0, cols));
        }
        if self.cols() != cols {
            return Err(crate::Error::DimensionMismatch(format!(
                "matrix has {} columns, expected {cols}",
                self.cols()
            )));
        }
        Ok(self)
    }
}

impl Serialize for RatVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rational::vec::serialize(self.entries(), s)
    }
}

impl<'de> Deserialize<'de> for RatVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        rational::vec::deserialize(d).map(RatVector::new)
    }
}
