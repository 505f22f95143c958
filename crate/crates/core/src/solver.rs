//! Separable convex integer minimization over `{Dx = d, 0 <= x <= u}` by
//! Graver-basis augmentation.
//!
//! A feasible start comes from an integer solution of `Dx = d` (column
//! echelon form) pushed into the box by minimizing the total bound
//! violation with the same augmentation loop and the same Graver basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::convexobj::{eval_objective, SeparableObjective};
use crate::error::{Error, Result};
use crate::exactmath::{solve_integer, IntMatrix, IntVector};
use crate::graver::{graver_basis_with_cap, GraverBasis, DEFAULT_GRAVER_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub graver_cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            graver_cap: DEFAULT_GRAVER_CAP,
        }
    }
}

/// `min { sum_j F_j(x_j) : Dx = d, 0 <= x <= u }` over the integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IpInstanceJson", into = "IpInstanceJson")]
pub struct IpInstance {
    matrix: IntMatrix,
    rhs: IntVector,
    upper: IntVector,
    objective: SeparableObjective,
}

impl IpInstance {
    pub fn new(
        matrix: IntMatrix,
        rhs: IntVector,
        upper: IntVector,
        objective: SeparableObjective,
    ) -> Result<Self> {
        let n = upper.len();
        let matrix = matrix.with_width(n)?;
        Error::check_len(matrix.rows(), rhs.len())?;
        Error::check_len(n, objective.len())?;
        if !upper.is_nonnegative() {
            return Err(Error::InvalidInput(
                "upper bounds must be nonnegative".into(),
            ));
        }
        Ok(IpInstance {
            matrix,
            rhs,
            upper,
            objective,
        })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &IntVector {
        &self.rhs
    }

    pub fn upper(&self) -> &IntVector {
        &self.upper
    }

    pub fn objective(&self) -> &SeparableObjective {
        &self.objective
    }

    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn with_objective(&self, objective: SeparableObjective) -> Result<Self> {
        IpInstance::new(
            self.matrix.clone(),
            self.rhs.clone(),
            self.upper.clone(),
            objective,
        )
    }

    pub fn is_feasible(&self, x: &IntVector) -> bool {
        x.len() == self.dim()
            && x.within(&IntVector::zeros(self.dim()), &self.upper)
            && self.matrix.mul_vec(x).is_ok_and(|r| r == self.rhs)
    }

    pub fn value(&self, x: &IntVector) -> Result<BigRational> {
        eval_objective(&self.objective, x)
    }
}

#[derive(Serialize, Deserialize)]
struct IpInstanceJson {
    #[serde(rename = "D")]
    matrix: IntMatrix,
    d: IntVector,
    u: IntVector,
    objective: SeparableObjective,
}

impl TryFrom<IpInstanceJson> for IpInstance {
    type Error = Error;

    fn try_from(j: IpInstanceJson) -> Result<Self> {
        IpInstance::new(j.matrix, j.d, j.u, j.objective)
    }
}

impl From<IpInstance> for IpInstanceJson {
    fn from(i: IpInstance) -> Self {
        IpInstanceJson {
            matrix: i.matrix,
            d: i.rhs,
            u: i.upper,
            objective: i.objective,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<IntVector>,
    #[serde(
        with = "opt_rational",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub objective: Option<BigRational>,
    /// Improving steps taken from the feasible start.
    pub augmentation_count: usize,
    /// Steps spent reaching the feasible start.
    pub feasibility_augmentations: usize,
    pub graver_size: usize,
}

mod opt_rational {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::json::JsonRational;

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => crate::json::rational::serialize(r, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<JsonRational>::deserialize(d).map(|o| o.map(|r| r.0))
    }
}

// --- generic augmentation over a box ---------------------------------------

/// What the augmentation loop needs: separable term values at arbitrary
/// integers and a finite box.
trait BoxedSeparable {
    fn term(&self, j: usize, t: &BigInt) -> BigRational;
    fn lower(&self) -> &[BigInt];
    fn upper(&self) -> &[BigInt];

    fn total(&self, x: &[BigInt]) -> BigRational {
        x.iter().enumerate().map(|(j, t)| self.term(j, t)).sum()
    }
}

struct Phase2<'a> {
    objective: &'a SeparableObjective,
    lower: Vec<BigInt>,
    upper: &'a [BigInt],
}

impl BoxedSeparable for Phase2<'_> {
    fn term(&self, j: usize, t: &BigInt) -> BigRational {
        self.objective.term(j).value_at(t)
    }
    fn lower(&self) -> &[BigInt] {
        &self.lower
    }
    fn upper(&self) -> &[BigInt] {
        self.upper
    }
}

impl<'a> Phase2<'a> {
    fn new(inst: &'a IpInstance) -> Self {
        Phase2 {
            objective: &inst.objective,
            lower: vec![BigInt::zero(); inst.dim()],
            upper: inst.upper.entries(),
        }
    }
}

/// Total violation of `0 <= x <= u` over a box that also contains the
/// (possibly out-of-bounds) starting point.
struct Violation<'a> {
    bounds: &'a [BigInt],
    lower: Vec<BigInt>,
    upper: Vec<BigInt>,
}

impl BoxedSeparable for Violation<'_> {
    fn term(&self, j: usize, t: &BigInt) -> BigRational {
        let below = if t.is_negative() { -t } else { BigInt::zero() };
        let above = if t > &self.bounds[j] {
            t - &self.bounds[j]
        } else {
            BigInt::zero()
        };
        BigRational::from_integer(below + above)
    }
    fn lower(&self) -> &[BigInt] {
        &self.lower
    }
    fn upper(&self) -> &[BigInt] {
        &self.upper
    }
}

/// Largest `lambda` with `lower <= x + lambda*g <= upper`; zero for `g = 0`.
fn max_step(x: &[BigInt], g: &[BigInt], lower: &[BigInt], upper: &[BigInt]) -> BigInt {
    let mut best: Option<BigInt> = None;
    for j in 0..x.len() {
        let room = if g[j].is_positive() {
            (&upper[j] - &x[j]).div_floor(&g[j])
        } else if g[j].is_negative() {
            (&x[j] - &lower[j]).div_floor(&-&g[j])
        } else {
            continue;
        };
        best = Some(match best {
            Some(b) if b <= room => b,
            _ => room,
        });
    }
    match best {
        Some(b) if b.is_positive() => b,
        _ => BigInt::zero(),
    }
}

/// Smallest minimizer of the convex `lambda -> F(x + lambda*g)` on
/// `[0, lambda_max]` and the improvement over `lambda = 0`.
fn step_search<P: BoxedSeparable>(p: &P, x: &[BigInt], g: &[BigInt]) -> (BigInt, BigRational) {
    let lambda_max = max_step(x, g, p.lower(), p.upper());
    if lambda_max.is_zero() {
        return (BigInt::zero(), BigRational::zero());
    }
    let support: Vec<usize> = (0..g.len()).filter(|&j| !g[j].is_zero()).collect();
    let phi = |lambda: &BigInt| -> BigRational {
        support
            .iter()
            .map(|&j| p.term(j, &(&x[j] + lambda * &g[j])))
            .sum()
    };

    let three = BigInt::from(3);
    let mut lo = BigInt::zero();
    let mut hi = lambda_max;
    while &hi - &lo > BigInt::from(2) {
        let third = (&hi - &lo) / &three;
        let m1 = &lo + &third;
        let m2 = &hi - &third;
        if phi(&m1) <= phi(&m2) {
            hi = m2;
        } else {
            lo = m1 + 1;
        }
    }
    let base = phi(&BigInt::zero());
    let mut best = (BigInt::zero(), base.clone());
    let mut lambda = lo;
    while lambda <= hi {
        let value = phi(&lambda);
        if value < best.1 {
            best = (lambda.clone(), value);
        }
        lambda += 1;
    }
    (best.0, base - best.1)
}

/// Best-improvement augmentation until no Graver step improves.
fn augment<P: BoxedSeparable>(
    p: &P,
    mut x: Vec<BigInt>,
    graver: &[IntVector],
) -> (Vec<BigInt>, usize) {
    let mut steps = 0;
    loop {
        let mut best: Option<(usize, BigInt, BigRational)> = None;
        for (k, g) in graver.iter().enumerate() {
            let (lambda, gain) = step_search(p, &x, g.entries());
            if !gain.is_positive() {
                continue;
            }
            if best.as_ref().is_none_or(|b| gain > b.2) {
                best = Some((k, lambda, gain));
            }
        }
        let Some((k, lambda, _)) = best else {
            return (x, steps);
        };
        for (xj, gj) in x.iter_mut().zip(graver[k].entries()) {
            *xj += &lambda * gj;
        }
        steps += 1;
    }
}

fn first_improving<P: BoxedSeparable>(
    p: &P,
    x: &[BigInt],
    graver: &[IntVector],
) -> Option<IntVector> {
    let current = p.total(x);
    graver
        .iter()
        .find(|g| {
            let y: Vec<BigInt> = x.iter().zip(g.entries()).map(|(a, b)| a + b).collect();
            let inside = y
                .iter()
                .zip(p.lower().iter().zip(p.upper()))
                .all(|(v, (l, u))| l <= v && v <= u);
            inside && p.total(&y) < current
        })
        .cloned()
}

// --- public operations ------------------------------------------------------

fn check_graver(g: &GraverBasis, inst: &IpInstance) -> Result<()> {
    if g.matrix() != inst.matrix() {
        return Err(Error::InvalidInput(
            "Graver basis does not belong to the instance matrix".into(),
        ));
    }
    Ok(())
}

fn require_feasible(x: &IntVector, inst: &IpInstance) -> Result<()> {
    if inst.is_feasible(x) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{x} is not a feasible point")))
    }
}

/// The step length in `[0, lambda_max]` that minimizes `F(x + lambda*g)`,
/// smallest on ties, and the resulting improvement.
pub fn best_step(x: &IntVector, g: &IntVector, inst: &IpInstance) -> Result<(BigInt, BigRational)> {
    Error::check_len(inst.dim(), g.len())?;
    require_feasible(x, inst)?;
    Ok(step_search(&Phase2::new(inst), x.entries(), g.entries()))
}

/// Greedy best-improvement augmentation from a feasible `x0`. Ties go to
/// the earlier element in canonical Graver order.
pub fn greedy_augment(
    x0: &IntVector,
    graver: &GraverBasis,
    inst: &IpInstance,
) -> Result<SolveResult> {
    check_graver(graver, inst)?;
    require_feasible(x0, inst)?;
    let (x, steps) = augment(&Phase2::new(inst), x0.entries().to_vec(), graver.elements());
    let x = IntVector::new(x);
    let objective = inst.value(&x)?;
    Ok(SolveResult {
        status: SolveStatus::Optimal,
        x: Some(x),
        objective: Some(objective),
        augmentation_count: steps,
        feasibility_augmentations: 0,
        graver_size: graver.len(),
    })
}

/// `(true, None)` when no single Graver step stays feasible and improves;
/// otherwise `(false, Some(g))` for the first improving `g`.
pub fn check_optimal(
    x: &IntVector,
    graver: &GraverBasis,
    inst: &IpInstance,
) -> Result<(bool, Option<IntVector>)> {
    check_graver(graver, inst)?;
    require_feasible(x, inst)?;
    let violator = first_improving(&Phase2::new(inst), x.entries(), graver.elements());
    Ok((violator.is_none(), violator))
}

/// A point of `{Dx = d, 0 <= x <= u}`, or `None` when the set is empty.
pub fn find_feasible(inst: &IpInstance) -> Result<Option<IntVector>> {
    find_feasible_with(inst, &SolverConfig::default())
}

pub fn find_feasible_with(inst: &IpInstance, config: &SolverConfig) -> Result<Option<IntVector>> {
    let graver = graver_basis_with_cap(inst.matrix(), config.graver_cap)?;
    Ok(feasible_start(inst, &graver)?.map(|(x, _)| x))
}

/// Feasible start plus the number of violation-reducing steps it took.
fn feasible_start(inst: &IpInstance, graver: &GraverBasis) -> Result<Option<(IntVector, usize)>> {
    let Some(x0) = solve_integer(inst.matrix(), inst.rhs())? else {
        return Ok(None);
    };
    let bounds = inst.upper.entries();
    let lower = x0
        .iter()
        .map(|v| {
            if v.is_negative() {
                v.clone()
            } else {
                BigInt::zero()
            }
        })
        .collect();
    let upper = x0
        .iter()
        .zip(bounds)
        .map(|(v, u)| v.max(u).clone())
        .collect();
    let violation = Violation {
        bounds,
        lower,
        upper,
    };
    let (x, steps) = augment(&violation, x0.into_inner(), graver.elements());
    if violation.total(&x).is_zero() {
        Ok(Some((IntVector::new(x), steps)))
    } else {
        Ok(None)
    }
}

pub fn solve_ip(inst: &IpInstance) -> Result<SolveResult> {
    solve_ip_with(inst, &SolverConfig::default())
}

/// Graver basis, feasible start, then greedy augmentation.
pub fn solve_ip_with(inst: &IpInstance, config: &SolverConfig) -> Result<SolveResult> {
    let graver = graver_basis_with_cap(inst.matrix(), config.graver_cap)?;
    solve_ip_given(inst, &graver)
}

/// As [`solve_ip`] with a precomputed Graver basis of the instance matrix.
pub fn solve_ip_given(inst: &IpInstance, graver: &GraverBasis) -> Result<SolveResult> {
    check_graver(graver, inst)?;
    let Some((x0, phase1)) = feasible_start(inst, graver)? else {
        return Ok(SolveResult {
            status: SolveStatus::Infeasible,
            x: None,
            objective: None,
            augmentation_count: 0,
            feasibility_augmentations: 0,
            graver_size: graver.len(),
        });
    };
    let mut result = greedy_augment(&x0, graver, inst)?;
    result.feasibility_augmentations = phase1;
    debug_assert!(check_optimal(result.x.as_ref().unwrap(), graver, inst)?.0);
    Ok(result)
}
