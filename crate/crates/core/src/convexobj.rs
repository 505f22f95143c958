//! Univariate cost functions with exact rational evaluation.
//!
//! Four closed-form families are provided, plus two wrappers used
//! internally (`Shifted` for best responses, `Scaled` for weighted inverse
//! checks). Anything added later only has to evaluate exactly at integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::IntVector;
use crate::json::rational as rat_serde;

pub const DEFAULT_PROBE_RANGE: u32 = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnivariateCost {
    /// `a*y + b`
    Affine {
        #[serde(with = "rat_serde")]
        a: BigRational,
        #[serde(with = "rat_serde")]
        b: BigRational,
    },
    /// `a*y^2 + b*y + c`
    Quadratic {
        #[serde(with = "rat_serde")]
        a: BigRational,
        #[serde(with = "rat_serde")]
        b: BigRational,
        #[serde(with = "rat_serde")]
        c: BigRational,
    },
    /// `a*y^k`
    Power {
        #[serde(with = "rat_serde")]
        a: BigRational,
        k: u32,
    },
    /// Starts at `intercept`; slope `slopes[i]` applies between
    /// `breakpoints[i-1]` and `breakpoints[i]` (with `0` and infinity at
    /// the ends), so there is one more slope than breakpoints.
    PiecewiseLinear {
        #[serde(with = "rat_serde")]
        intercept: BigRational,
        #[serde(with = "rat_serde::vec")]
        breakpoints: Vec<BigRational>,
        #[serde(with = "rat_serde::vec")]
        slopes: Vec<BigRational>,
    },
    /// `base(y + offset)`
    Shifted {
        base: Box<UnivariateCost>,
        #[serde(with = "crate::json::bigint")]
        offset: BigInt,
    },
    /// `factor * base(y)`
    Scaled {
        #[serde(with = "rat_serde")]
        factor: BigRational,
        base: Box<UnivariateCost>,
    },
}

fn r(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl UnivariateCost {
    pub fn affine(a: BigRational, b: BigRational) -> Self {
        UnivariateCost::Affine { a, b }
    }

    pub fn quadratic(a: BigRational, b: BigRational, c: BigRational) -> Self {
        UnivariateCost::Quadratic { a, b, c }
    }

    pub fn power(a: BigRational, k: u32) -> Self {
        UnivariateCost::Power { a, k }
    }

    pub fn piecewise_linear(
        intercept: BigRational,
        breakpoints: Vec<BigRational>,
        slopes: Vec<BigRational>,
    ) -> Self {
        UnivariateCost::PiecewiseLinear {
            intercept,
            breakpoints,
            slopes,
        }
    }

    pub fn shifted(self, offset: BigInt) -> Self {
        if offset.is_zero() {
            return self;
        }
        UnivariateCost::Shifted {
            base: Box::new(self),
            offset,
        }
    }

    pub fn scaled(self, factor: BigRational) -> Self {
        UnivariateCost::Scaled {
            factor,
            base: Box::new(self),
        }
    }

    /// `y^2`
    pub fn square() -> Self {
        Self::quadratic(r(1), r(0), r(0))
    }

    pub fn linear(slope: i64) -> Self {
        Self::affine(r(slope), r(0))
    }

    pub fn zero() -> Self {
        Self::affine(r(0), r(0))
    }

    /// Exact value at any integer. Callers that require `y >= 0` use
    /// [`eval_cost`].
    pub fn value_at(&self, y: &BigInt) -> BigRational {
        let yq = BigRational::from_integer(y.clone());
        match self {
            UnivariateCost::Affine { a, b } => a * &yq + b,
            UnivariateCost::Quadratic { a, b, c } => a * &yq * &yq + b * &yq + c,
            UnivariateCost::Power { a, k } => a * num_traits::pow(yq, *k as usize),
            UnivariateCost::PiecewiseLinear {
                intercept,
                breakpoints,
                slopes,
            } => piecewise_value(intercept, breakpoints, slopes, &yq),
            UnivariateCost::Shifted { base, offset } => base.value_at(&(y + offset)),
            UnivariateCost::Scaled { factor, base } => factor * base.value_at(y),
        }
    }

    fn parameters_ok(&self, require_monotone: bool) -> bool {
        let nonneg = |v: &BigRational| !v.is_negative();
        match self {
            UnivariateCost::Affine { a, b } => !require_monotone || (nonneg(a) && nonneg(b)),
            UnivariateCost::Quadratic { a, b, c } => {
                nonneg(a) && (!require_monotone || (nonneg(b) && nonneg(c)))
            }
            UnivariateCost::Power { a, k } => nonneg(a) && *k >= 1,
            UnivariateCost::PiecewiseLinear {
                intercept,
                breakpoints,
                slopes,
            } => {
                slopes.len() == breakpoints.len() + 1
                    && breakpoints.first().is_none_or(BigRational::is_positive)
                    && breakpoints.windows(2).all(|w| w[0] < w[1])
                    && slopes.windows(2).all(|w| w[0] <= w[1])
                    && (!require_monotone || (nonneg(intercept) && nonneg(&slopes[0])))
            }
            UnivariateCost::Shifted { base, offset } => {
                base.parameters_ok(require_monotone) && !offset.is_negative()
            }
            UnivariateCost::Scaled { factor, base } => {
                nonneg(factor) && base.parameters_ok(require_monotone)
            }
        }
    }

    /// Convex on the probe range `0..=probe+1` with well-formed parameters.
    /// Monotonicity is not required (inverse shapes may decrease).
    pub fn is_convex(&self, probe: u32) -> bool {
        self.parameters_ok(false) && probe_differences(self, probe, false)
    }
}

fn piecewise_value(
    intercept: &BigRational,
    breakpoints: &[BigRational],
    slopes: &[BigRational],
    y: &BigRational,
) -> BigRational {
    if y.is_negative() {
        // extend the first piece to the left
        return intercept + &slopes[0] * y;
    }
    let mut total = intercept.clone();
    let mut left = BigRational::zero();
    for (i, slope) in slopes.iter().enumerate() {
        let right = breakpoints.get(i);
        let end = match right {
            Some(b) if b < y => b.clone(),
            _ => y.clone(),
        };
        if end > left {
            total += slope * (&end - &left);
        }
        match right {
            Some(b) if b < y => left = b.clone(),
            _ => break,
        }
    }
    total
}

/// Forward differences on `0..=probe+1`: always nondecreasing, and also
/// nonnegative when `monotone` is set.
fn probe_differences(c: &UnivariateCost, probe: u32, monotone: bool) -> bool {
    let mut prev_value = c.value_at(&BigInt::zero());
    let mut prev_diff: Option<BigRational> = None;
    for y in 1..=probe as i64 + 2 {
        let value = c.value_at(&BigInt::from(y));
        let diff = &value - &prev_value;
        if monotone && diff.is_negative() {
            return false;
        }
        if let Some(p) = &prev_diff {
            if diff < *p {
                return false;
            }
        }
        prev_diff = Some(diff);
        prev_value = value;
    }
    true
}

/// Exact `c(y)` for `y >= 0`.
pub fn eval_cost(c: &UnivariateCost, y: &BigInt) -> Result<BigRational> {
    if y.is_negative() {
        return Err(Error::NegativeArgument(y.to_string()));
    }
    Ok(c.value_at(y))
}

/// Parameter constraints plus a probe of `0..=K+1`: differences
/// `c(y+1) - c(y)` must be nonnegative and nondecreasing, and `c(0) >= 0`.
pub fn validate(c: &UnivariateCost, probe: u32) -> bool {
    c.parameters_ok(true)
        && !c.value_at(&BigInt::zero()).is_negative()
        && probe_differences(c, probe, true)
}

/// A list of univariate costs, one per variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeparableObjective {
    terms: Vec<UnivariateCost>,
}

impl SeparableObjective {
    pub fn new(terms: Vec<UnivariateCost>) -> Self {
        SeparableObjective { terms }
    }

    /// `n` copies of the zero function.
    pub fn zeros(n: usize) -> Self {
        SeparableObjective {
            terms: vec![UnivariateCost::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[UnivariateCost] {
        &self.terms
    }

    pub fn term(&self, j: usize) -> &UnivariateCost {
        &self.terms[j]
    }

    pub fn push(&mut self, c: UnivariateCost) {
        self.terms.push(c);
    }

    pub fn extend(&mut self, other: SeparableObjective) {
        self.terms.extend(other.terms);
    }

    pub fn validate_all(&self, probe: u32) -> Result<()> {
        for (j, c) in self.terms.iter().enumerate() {
            if !validate(c, probe) {
                return Err(Error::InvalidCost(format!(
                    "term {j} is not convex and monotonously increasing: {c:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn check_convex(&self, probe: u32) -> Result<()> {
        for (j, c) in self.terms.iter().enumerate() {
            if !c.is_convex(probe) {
                return Err(Error::InvalidCost(format!("term {j} is not convex: {c:?}")));
            }
        }
        Ok(())
    }
}

/// `sum_j F_j(x_j)` for nonnegative `x`.
pub fn eval_objective(f: &SeparableObjective, x: &IntVector) -> Result<BigRational> {
    Error::check_len(f.len(), x.len())?;
    let mut total = BigRational::zero();
    for (c, xj) in f.terms.iter().zip(x.iter()) {
        total += eval_cost(c, xj)?;
    }
    Ok(total)
}

impl From<Vec<UnivariateCost>> for SeparableObjective {
    fn from(terms: Vec<UnivariateCost>) -> Self {
        SeparableObjective::new(terms)
    }
}
