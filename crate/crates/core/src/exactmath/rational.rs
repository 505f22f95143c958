use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A vector of exact rationals; entries are always in reduced form with a
/// positive denominator (guaranteed by `BigRational`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RatVector(Vec<BigRational>);

impl RatVector {
    pub fn new(entries: Vec<BigRational>) -> Self {
        RatVector(entries)
    }

    pub fn zeros(len: usize) -> Self {
        RatVector(vec![BigRational::zero(); len])
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        RatVector(entries.iter().map(|&e| int(e)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<BigRational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigRational> {
        self.0.iter()
    }

    pub fn dot(&self, other: &RatVector) -> Result<BigRational> {
        Error::check_len(self.len(), other.len())?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn sum(&self) -> BigRational {
        self.0.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|e| !e.is_negative())
    }

    /// Divides by the entry sum so the result sums to one; `None` if the
    /// sum is zero.
    pub fn normalized(&self) -> Option<RatVector> {
        let total = self.sum();
        if total.is_zero() {
            return None;
        }
        Some(self.0.iter().map(|e| e / &total).collect())
    }
}

impl FromIterator<BigRational> for RatVector {
    fn from_iter<I: IntoIterator<Item = BigRational>>(iter: I) -> Self {
        RatVector(iter.into_iter().collect())
    }
}

impl Index<usize> for RatVector {
    type Output = BigRational;

    fn index(&self, j: usize) -> &BigRational {
        &self.0[j]
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (j, e) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            f.write_str(&format_rational(e))?;
        }
        f.write_str(")")
    }
}

pub fn int(value: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `"p"`, `"p/q"` or a plain decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = whole.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(numer, scale));
    }
    BigInt::from_str(text)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}
