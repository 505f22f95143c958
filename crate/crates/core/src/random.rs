//! Seeded generators for small test instances.
//!
//! All generators draw from a caller-supplied RNG; [`seeded`] gives the
//! ChaCha stream used throughout, so a seed fixes every instance.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convexobj::{SeparableObjective, UnivariateCost};
use crate::error::Result;
use crate::exactmath::rational::{int, ratio};
use crate::exactmath::{IntMatrix, IntVector, RatVector};
use crate::game::{GameInstance, PlayerSpec};
use crate::inverse::IiopInstance;
use crate::oracle::brute_ip_opt;
use crate::solver::IpInstance;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries drawn uniformly from `lo..=hi`.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, lo: i64, hi: i64) -> IntMatrix {
    let data = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| rng.random_range(lo..=hi).into())
                .collect()
        })
        .collect();
    IntMatrix::from_rows(data, cols).expect("rectangular by construction")
}

pub fn random_vector<R: Rng>(rng: &mut R, len: usize, lo: i64, hi: i64) -> IntVector {
    IntVector::from_i64s(
        &(0..len)
            .map(|_| rng.random_range(lo..=hi))
            .collect::<Vec<_>>(),
    )
}

fn small_ratio<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> BigRational {
    ratio(rng.random_range(lo..=hi), rng.random_range(1..=2))
}

/// A convex, nondecreasing cost with `c(0) >= 0` from one of the closed
/// families.
pub fn random_cost<R: Rng>(rng: &mut R) -> UnivariateCost {
    match rng.random_range(0..4) {
        0 => UnivariateCost::affine(small_ratio(rng, 0, 4), small_ratio(rng, 0, 2)),
        1 => {
            let a = int(rng.random_range(0..=3));
            UnivariateCost::quadratic(
                a,
                int(rng.random_range(0..=3)),
                int(rng.random_range(0..=2)),
            )
        }
        2 => UnivariateCost::power(small_ratio(rng, 0, 2), rng.random_range(1..=3)),
        _ => {
            let pieces = rng.random_range(1..=3);
            let mut slopes = Vec::with_capacity(pieces);
            let mut slope = rng.random_range(0..=2);
            for _ in 0..pieces {
                slopes.push(int(slope));
                slope += rng.random_range(0..=3);
            }
            let mut breakpoints = Vec::with_capacity(pieces - 1);
            let mut at = 0;
            for _ in 1..pieces {
                at += rng.random_range(1..=2);
                breakpoints.push(int(at));
            }
            UnivariateCost::piecewise_linear(int(rng.random_range(0..=2)), breakpoints, slopes)
        }
    }
}

/// A convex cost that may decrease, e.g. `a (y - t)^2`.
pub fn random_shape<R: Rng>(rng: &mut R) -> UnivariateCost {
    if rng.random_bool(0.5) {
        let a = rng.random_range(1..=2);
        let t = rng.random_range(0..=3);
        UnivariateCost::quadratic(int(a), int(-2 * a * t), int(a * t * t))
    } else {
        random_cost(rng)
    }
}

pub fn random_objective<R: Rng>(rng: &mut R, n: usize) -> SeparableObjective {
    (0..n).map(|_| random_cost(rng)).collect::<Vec<_>>().into()
}

/// At most `max_vars` variables, one or two rows with entries in
/// `[-2, 2]`, bounds up to `max_bound`. Most right-hand sides come from a
/// planted point; the rest are arbitrary and may be infeasible.
pub fn random_ip_instance<R: Rng>(rng: &mut R, max_vars: usize, max_bound: i64) -> IpInstance {
    let n = rng.random_range(1..=max_vars);
    let rows = rng.random_range(1..=2);
    let matrix = random_matrix(rng, rows, n, -2, 2);
    let upper = random_vector(rng, n, 0, max_bound);
    let rhs = if rng.random_bool(0.85) {
        let planted: IntVector = upper
            .iter()
            .map(|u| rng.random_range(0..=u.try_into().unwrap_or(0i64)).into())
            .collect();
        matrix.mul_vec(&planted).expect("matching width")
    } else {
        random_vector(rng, rows, -3, 3)
    };
    IpInstance::new(matrix, rhs, upper, random_objective(rng, n)).expect("consistent shapes")
}

/// `players` players over `n` resources, each with one constraint row,
/// bounds up to `max_bound`, and at most one coupling row.
pub fn random_game<R: Rng>(rng: &mut R, players: usize, n: usize, max_bound: i64) -> GameInstance {
    let coupled = rng.random_bool(0.5);
    let m = usize::from(coupled);
    let shared_type = rng.random_bool(0.5);
    let first_a = random_matrix(rng, 1, n, 0, 2);
    let first_b = random_matrix(rng, m, n, 0, 1);
    let specs = (0..players)
        .map(|_| {
            let (a, coupling) = if shared_type {
                (first_a.clone(), first_b.clone())
            } else {
                (
                    random_matrix(rng, 1, n, 0, 2),
                    random_matrix(rng, m, n, 0, 1),
                )
            };
            let u = random_vector(rng, n, 0, max_bound);
            let target = a
                .row(0)
                .iter()
                .zip(u.iter())
                .map(|(x, y)| x * y)
                .sum::<num_bigint::BigInt>();
            let hi: i64 = target.try_into().unwrap_or(0);
            let b = IntVector::from_i64s(&[rng.random_range(0..=hi.max(0))]);
            PlayerSpec { a, b, u, coupling }
        })
        .collect();
    let b0 = random_vector(rng, m, 0, 2 * players as i64);
    GameInstance::new(specs, b0, random_objective(rng, n)).expect("valid by construction")
}

/// A planted inverse instance: shapes and weights are drawn, `x*` is a
/// brute-force minimizer of the weighted objective. Returns the weights
/// alongside. `None` when the drawn polytope is empty.
pub fn planted_iiop<R: Rng>(
    rng: &mut R,
    max_vars: usize,
    max_bound: i64,
) -> Result<Option<(IiopInstance, RatVector)>> {
    let n = rng.random_range(2..=max_vars.max(2));
    let matrix = random_matrix(rng, 1, n, -2, 2);
    let upper = random_vector(rng, n, 0, max_bound);
    let planted: IntVector = upper
        .iter()
        .map(|u| rng.random_range(0..=u.try_into().unwrap_or(0i64)).into())
        .collect();
    let rhs = matrix.mul_vec(&planted)?;
    let shapes: SeparableObjective = (0..n).map(|_| random_shape(rng)).collect::<Vec<_>>().into();
    let mut weights: Vec<i64> = (0..n).map(|_| rng.random_range(0..=3)).collect();
    if weights.iter().all(|w| *w == 0) {
        weights[rng.random_range(0..n)] = 1;
    }
    let lambda = RatVector::from_i64s(&weights);
    let weighted: Vec<UnivariateCost> = shapes
        .terms()
        .iter()
        .zip(lambda.iter())
        .map(|(f, w)| f.clone().scaled(w.clone()))
        .collect();
    let program = IpInstance::new(matrix.clone(), rhs.clone(), upper.clone(), weighted.into())?;
    let best = match brute_ip_opt(&program) {
        Ok(b) => b,
        Err(crate::Error::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let xstar = best.argmins[rng.random_range(0..best.argmins.len())].clone();
    let inst = IiopInstance::new(matrix, rhs, upper, xstar, shapes)?;
    Ok(Some((inst, lambda)))
}

/// `sum_j x_j = n`, `0 <= x <= 2`, `x* = 1`, `f_1 = k_1 (y - 2)^2` and
/// `f_j = k_j y^2` otherwise. Moving one unit from any `j > 1` to the first
/// coordinate lowers every shape, so no weighting makes `x*` optimal.
pub fn refutable_iiop(weights: &[i64]) -> Result<IiopInstance> {
    let n = weights.len();
    let ones = IntVector::from_i64s(&vec![1; n]);
    let matrix = IntMatrix::from_i64_rows(&[&vec![1; n]]);
    let shapes: Vec<UnivariateCost> = weights
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let k = int(k);
            if j == 0 {
                UnivariateCost::quadratic(k.clone(), -int(4) * &k, int(4) * &k)
            } else {
                UnivariateCost::quadratic(k, int(0), int(0))
            }
        })
        .collect();
    IiopInstance::new(
        matrix,
        IntVector::from_i64s(&[n as i64]),
        IntVector::from_i64s(&vec![2; n]),
        ones,
        shapes.into(),
    )
}
