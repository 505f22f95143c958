//! Inverse integer optimization.
//!
//! Given `P = {Dx = d, 0 <= x <= u}`, a point `x*` in it and fixed convex
//! shapes `f_j`, look for weights `lambda >= 0`, not all zero, such that
//! `x*` minimizes `sum_j lambda_j f_j(x_j)` over the integer points of `P`.
//! By the Graver optimality criterion it suffices that no feasible Graver
//! step improves, which is the linear system
//! `sum_j [f_j(x*_j + g_j) - f_j(x*_j)] lambda_j >= 0` for every feasible
//! shift `g`. Infeasibility comes with a nonnegative combination of the
//! shift rows that is negative in every coordinate.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::convexobj::{SeparableObjective, DEFAULT_PROBE_RANGE};
use crate::error::{Error, Result};
use crate::exactmath::lp::verify_feasible_point;
use crate::exactmath::rational::int;
use crate::exactmath::{
    format_rational, parse_rational, rational_lp_feasibility, IntMatrix, IntVector, LpOutcome,
    RatVector,
};
use crate::graver::GraverBasis;
use crate::solver::{check_optimal, IpInstance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IiopJson", into = "IiopJson")]
pub struct IiopInstance {
    polytope: IpInstance,
    xstar: IntVector,
}

#[derive(Serialize, Deserialize)]
struct IiopJson {
    #[serde(rename = "D")]
    matrix: IntMatrix,
    d: IntVector,
    u: IntVector,
    xstar: IntVector,
    shapes: SeparableObjective,
}

impl TryFrom<IiopJson> for IiopInstance {
    type Error = Error;

    fn try_from(j: IiopJson) -> Result<Self> {
        IiopInstance::new(j.matrix, j.d, j.u, j.xstar, j.shapes)
    }
}

impl From<IiopInstance> for IiopJson {
    fn from(i: IiopInstance) -> Self {
        let xstar = i.xstar;
        let p = i.polytope;
        IiopJson {
            matrix: p.matrix().clone(),
            d: p.rhs().clone(),
            u: p.upper().clone(),
            xstar,
            shapes: p.objective().clone(),
        }
    }
}

impl IiopInstance {
    /// Requires `x*` to be a feasible point and every shape to be convex.
    pub fn new(
        matrix: IntMatrix,
        rhs: IntVector,
        upper: IntVector,
        xstar: IntVector,
        shapes: SeparableObjective,
    ) -> Result<Self> {
        if upper.is_empty() {
            return Err(Error::InvalidInput(
                "at least one variable is required".into(),
            ));
        }
        shapes.check_convex(DEFAULT_PROBE_RANGE)?;
        let polytope = IpInstance::new(matrix, rhs, upper, shapes)?;
        Error::check_len(polytope.dim(), xstar.len())?;
        if !polytope.is_feasible(&xstar) {
            return Err(Error::InvalidInput(format!(
                "x* = {xstar} is not a feasible point"
            )));
        }
        Ok(IiopInstance { polytope, xstar })
    }

    pub fn matrix(&self) -> &IntMatrix {
        self.polytope.matrix()
    }

    pub fn rhs(&self) -> &IntVector {
        self.polytope.rhs()
    }

    pub fn upper(&self) -> &IntVector {
        self.polytope.upper()
    }

    pub fn xstar(&self) -> &IntVector {
        &self.xstar
    }

    pub fn shapes(&self) -> &SeparableObjective {
        self.polytope.objective()
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    /// The polytope with objective `sum_j lambda_j f_j`.
    pub fn weighted_program(&self, lambda: &RatVector) -> Result<IpInstance> {
        Error::check_len(self.dim(), lambda.len())?;
        let terms = self
            .shapes()
            .terms()
            .iter()
            .zip(lambda.iter())
            .map(|(f, w)| f.clone().scaled(w.clone()))
            .collect::<Vec<_>>();
        self.polytope.with_objective(terms.into())
    }

    /// `f_j(x*_j + g_j) - f_j(x*_j)` for every `j`.
    pub fn shift_row(&self, g: &IntVector) -> RatVector {
        self.shapes()
            .terms()
            .iter()
            .zip(self.xstar.iter().zip(g.iter()))
            .map(|(f, (x, gj))| f.value_at(&(x + gj)) - f.value_at(x))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IiopAnswer {
    /// Weights summing to one.
    Yes { lambda: RatVector },
    /// `certificate[i]` weighs the row of `shifts[i]`.
    No {
        shifts: Vec<IntVector>,
        certificate: RatVector,
    },
}

impl IiopAnswer {
    pub fn is_yes(&self) -> bool {
        matches!(self, IiopAnswer::Yes { .. })
    }

    /// Nonzero certificate entries paired with their shift.
    pub fn certificate_support(&self) -> Vec<(BigRational, IntVector)> {
        match self {
            IiopAnswer::Yes { .. } => Vec::new(),
            IiopAnswer::No {
                shifts,
                certificate,
            } => certificate
                .iter()
                .zip(shifts)
                .filter(|(v, _)| !v.is_zero())
                .map(|(v, g)| (v.clone(), g.clone()))
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
enum AnswerJson {
    Yes {
        lambda: RatVector,
    },
    No {
        shifts: Vec<IntVector>,
        certificate: Vec<(String, String)>,
    },
}

impl Serialize for IiopAnswer {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let json = match self {
            IiopAnswer::Yes { lambda } => AnswerJson::Yes {
                lambda: lambda.clone(),
            },
            IiopAnswer::No { shifts, .. } => AnswerJson::No {
                shifts: shifts.clone(),
                certificate: self
                    .certificate_support()
                    .iter()
                    .map(|(v, g)| (format_rational(v), g.to_string()))
                    .collect(),
            },
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IiopAnswer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match AnswerJson::deserialize(d)? {
            AnswerJson::Yes { lambda } => Ok(IiopAnswer::Yes { lambda }),
            AnswerJson::No {
                shifts,
                certificate,
            } => {
                let mut v = vec![BigRational::zero(); shifts.len()];
                for (value, shift) in certificate {
                    let value = parse_rational(&value).map_err(de::Error::custom)?;
                    let shift = parse_tuple(&shift).map_err(de::Error::custom)?;
                    let i = shifts.iter().position(|g| *g == shift).ok_or_else(|| {
                        de::Error::custom(format!("{shift} is not a listed shift"))
                    })?;
                    v[i] = value;
                }
                Ok(IiopAnswer::No {
                    shifts,
                    certificate: RatVector::new(v),
                })
            }
        }
    }
}

/// Parses the `(a,b,...)` form produced by `IntVector`'s `Display`.
fn parse_tuple(text: &str) -> Result<IntVector> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::InvalidInput(format!("{text:?} is not a tuple")))?;
    if inner.trim().is_empty() {
        return Ok(IntVector::zeros(0));
    }
    inner
        .split(',')
        .map(|e| {
            BigInt::from_str(e.trim())
                .map_err(|_| Error::InvalidInput(format!("{e:?} is not an integer")))
        })
        .collect()
}

impl fmt::Display for IiopAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IiopAnswer::Yes { lambda } => write!(f, "yes {lambda}"),
            IiopAnswer::No { .. } => {
                write!(f, "no")?;
                for (v, g) in self.certificate_support() {
                    write!(f, " {}*{g}", format_rational(&v))?;
                }
                Ok(())
            }
        }
    }
}

/// Graver elements that keep `x*` inside the box. `D g = 0` makes the
/// equality constraints automatic.
pub fn feasible_shifts(graver: &GraverBasis, inst: &IiopInstance) -> Result<Vec<IntVector>> {
    check_graver(graver, inst)?;
    let zero = IntVector::zeros(inst.dim());
    Ok(graver
        .elements()
        .iter()
        .filter(|g| {
            inst.xstar
                .checked_add(g)
                .is_ok_and(|y| y.within(&zero, inst.upper()))
        })
        .cloned()
        .collect())
}

fn check_graver(graver: &GraverBasis, inst: &IiopInstance) -> Result<()> {
    if graver.matrix() != inst.matrix() {
        return Err(Error::InvalidInput(
            "Graver basis does not belong to the instance matrix".into(),
        ));
    }
    Ok(())
}

fn ones(n: usize) -> RatVector {
    (0..n).map(|_| int(1)).collect()
}

/// Solves the weight system over the feasible shifts. With no feasible
/// shift every weighting works and the uniform one is returned.
pub fn solve_iiop(inst: &IiopInstance, graver: &GraverBasis) -> Result<IiopAnswer> {
    let shifts = feasible_shifts(graver, inst)?;
    let n = inst.dim();
    if shifts.is_empty() {
        let share = BigRational::new(1.into(), BigInt::from(n));
        return Ok(IiopAnswer::Yes {
            lambda: (0..n).map(|_| share.clone()).collect(),
        });
    }
    let rows: Vec<RatVector> = shifts.iter().map(|g| inst.shift_row(g)).collect();
    match rational_lp_feasibility(&rows, &ones(n))? {
        LpOutcome::Feasible(lambda) => Ok(IiopAnswer::Yes {
            lambda: lambda
                .normalized()
                .expect("homogenized system yields a nonzero point"),
        }),
        LpOutcome::FarkasRay(certificate) => Ok(IiopAnswer::No {
            shifts,
            certificate,
        }),
    }
}

/// Independent recheck of an answer. A yes is additionally confirmed by
/// the Graver optimality test under the weighted objective.
pub fn verify_answer(
    inst: &IiopInstance,
    graver: &GraverBasis,
    answer: &IiopAnswer,
) -> Result<bool> {
    let shifts = feasible_shifts(graver, inst)?;
    let rows: Vec<RatVector> = shifts.iter().map(|g| inst.shift_row(g)).collect();
    let n = inst.dim();
    match answer {
        IiopAnswer::Yes { lambda } => {
            if lambda.len() != n || lambda.sum() != int(1) {
                return Ok(false);
            }
            if !verify_feasible_point(&rows, &ones(n), lambda) {
                return Ok(false);
            }
            let program = inst.weighted_program(lambda)?;
            Ok(check_optimal(inst.xstar(), graver, &program)?.0)
        }
        IiopAnswer::No {
            shifts: listed,
            certificate,
        } => {
            if *listed != shifts
                || certificate.len() != shifts.len()
                || !certificate.is_nonnegative()
            {
                return Ok(false);
            }
            let strictly_negative = (0..n).all(|j| {
                let combo: BigRational = rows
                    .iter()
                    .zip(certificate.iter())
                    .map(|(row, v)| v * &row[j])
                    .sum();
                combo.is_negative()
            });
            Ok(strictly_negative)
        }
    }
}
