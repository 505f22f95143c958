//! Brute-force reference implementations for tests.
//!
//! Everything here enumerates integer points of a box and shares nothing
//! with the completion, augmentation or LP code. Enumeration runs on
//! `i64`; inputs that do not fit are rejected.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::convexobj::eval_objective;
use crate::error::{Error, Result};
use crate::exactmath::{sort_canonical, IntMatrix, IntVector};
use crate::game::{GameInstance, StrategyProfile};
use crate::graver::GraverBasis;
use crate::solver::IpInstance;

pub const DEFAULT_BOX_CAP: u64 = 10_000_000;

/// Integer box `lower <= x <= upper`. A side with `lower > upper` makes it
/// empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBox {
    pub lower: IntVector,
    pub upper: IntVector,
}

impl LatticeBox {
    pub fn new(lower: IntVector, upper: IntVector) -> Result<Self> {
        Error::check_len(lower.len(), upper.len())?;
        Ok(LatticeBox { lower, upper })
    }

    /// `[-bound, bound]^n`
    pub fn symmetric(n: usize, bound: i64) -> Self {
        LatticeBox {
            lower: IntVector::from_i64s(&vec![-bound; n]),
            upper: IntVector::from_i64s(&vec![bound; n]),
        }
    }

    fn to_i64(&self) -> Result<(Vec<i64>, Vec<i64>)> {
        match (self.lower.to_i64s(), self.upper.to_i64s()) {
            (Some(l), Some(u)) => Ok((l, u)),
            _ => Err(Error::InvalidInput(
                "box corners exceed the i64 range".into(),
            )),
        }
    }
}

fn cap_error(cap: u64) -> Error {
    Error::ResourceCap {
        what: "enumerated box points",
        cap,
    }
}

/// Visits every point of `[lower, upper]` in lexicographic order.
fn for_each_point(
    lower: &[i64],
    upper: &[i64],
    cap: u64,
    mut visit: impl FnMut(&[i64]),
) -> Result<()> {
    let mut count: u64 = 1;
    for (l, u) in lower.iter().zip(upper) {
        if l > u {
            return Ok(());
        }
        let side = (u - l) as u64 + 1;
        count = count
            .checked_mul(side)
            .filter(|c| *c <= cap)
            .ok_or(cap_error(cap))?;
    }
    let n = lower.len();
    let mut x = lower.to_vec();
    loop {
        visit(&x);
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(());
            }
            j -= 1;
            if x[j] < upper[j] {
                x[j] += 1;
                break;
            }
            x[j] = lower[j];
        }
    }
}

/// All points of the box satisfying `keep`, lexicographically ascending.
pub fn enumerate_box_points(
    bx: &LatticeBox,
    mut keep: impl FnMut(&IntVector) -> bool,
    cap: u64,
) -> Result<Vec<IntVector>> {
    let (lower, upper) = bx.to_i64()?;
    let mut out = Vec::new();
    for_each_point(&lower, &upper, cap, |x| {
        let p = IntVector::from_i64s(x);
        if keep(&p) {
            out.push(p);
        }
    })?;
    Ok(out)
}

fn small_matrix(d: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    d.to_i64_rows()
        .ok_or_else(|| Error::InvalidInput("matrix entries exceed the i64 range".into()))
}

fn annihilates(rows: &[Vec<i64>], x: &[i64]) -> bool {
    rows.iter().all(|r| {
        r.iter()
            .zip(x)
            .map(|(a, b)| *a as i128 * *b as i128)
            .sum::<i128>()
            == 0
    })
}

fn below(u: &[i64], v: &[i64]) -> bool {
    u.iter()
        .zip(v)
        .all(|(a, b)| *a == 0 || (a.signum() == b.signum() && a.abs() <= b.abs()))
}

/// Conformally minimal nonzero kernel points of `d` in
/// `[-bound, bound]^n`, canonically sorted.
///
/// Points are visited by increasing 1-norm, so a point is minimal exactly
/// when no minimal point found earlier lies below it.
pub fn brute_graver(d: &IntMatrix, bound: u32) -> Result<GraverBasis> {
    brute_graver_with_cap(d, bound, DEFAULT_BOX_CAP)
}

pub fn brute_graver_with_cap(d: &IntMatrix, bound: u32, cap: u64) -> Result<GraverBasis> {
    let rows = small_matrix(d)?;
    let n = d.cols();
    let b = bound as i64;
    let mut kernel: Vec<Vec<i64>> = Vec::new();
    for_each_point(&vec![-b; n], &vec![b; n], cap, |x| {
        if x.iter().any(|v| *v != 0) && annihilates(&rows, x) {
            kernel.push(x.to_vec());
        }
    })?;
    kernel.sort_by_key(|x| x.iter().map(|v| v.unsigned_abs()).sum::<u64>());
    let mut minimal: Vec<Vec<i64>> = Vec::new();
    for x in kernel {
        if !minimal.iter().any(|m| below(m, &x)) {
            minimal.push(x);
        }
    }
    let mut elements: Vec<IntVector> = minimal.iter().map(|m| IntVector::from_i64s(m)).collect();
    sort_canonical(&mut elements);
    GraverBasis::from_parts(d.clone(), elements)
}

/// `g` is a nonzero kernel point with no other nonzero kernel point
/// conformally below it.
pub fn is_graver_element(d: &IntMatrix, g: &IntVector) -> Result<bool> {
    Error::check_len(d.cols(), g.len())?;
    let rows = small_matrix(d)?;
    let g = g
        .to_i64s()
        .ok_or_else(|| Error::InvalidInput("entries exceed the i64 range".into()))?;
    if g.iter().all(|v| *v == 0) || !annihilates(&rows, &g) {
        return Ok(false);
    }
    let lower: Vec<i64> = g.iter().map(|v| (*v).min(0)).collect();
    let upper: Vec<i64> = g.iter().map(|v| (*v).max(0)).collect();
    let mut found = false;
    for_each_point(&lower, &upper, DEFAULT_BOX_CAP, |y| {
        if !found && y != g.as_slice() && y.iter().any(|v| *v != 0) && annihilates(&rows, y) {
            found = true;
        }
    })?;
    Ok(!found)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteOptimum {
    pub value: BigRational,
    /// All minimizers, lexicographically ascending.
    pub argmins: Vec<IntVector>,
}

/// Feasible points of `{Dx = d, 0 <= x <= u}` in lexicographic order.
pub fn feasible_points(inst: &IpInstance) -> Result<Vec<IntVector>> {
    let rows = small_matrix(inst.matrix())?;
    let rhs = inst
        .rhs()
        .to_i64s()
        .ok_or_else(|| Error::InvalidInput("right-hand side exceeds the i64 range".into()))?;
    let upper = inst
        .upper()
        .to_i64s()
        .ok_or_else(|| Error::InvalidInput("bounds exceed the i64 range".into()))?;
    let mut out = Vec::new();
    for_each_point(&vec![0; inst.dim()], &upper, DEFAULT_BOX_CAP, |x| {
        let ok = rows.iter().zip(&rhs).all(|(r, b)| {
            r.iter()
                .zip(x)
                .map(|(a, v)| *a as i128 * *v as i128)
                .sum::<i128>()
                == *b as i128
        });
        if ok {
            out.push(IntVector::from_i64s(x));
        }
    })?;
    Ok(out)
}

/// Exhaustive minimum of the objective over the feasible points.
pub fn brute_ip_opt(inst: &IpInstance) -> Result<BruteOptimum> {
    let mut best: Option<BruteOptimum> = None;
    for x in feasible_points(inst)? {
        let value = eval_objective(inst.objective(), &x)?;
        match &mut best {
            Some(b) if value > b.value => {}
            Some(b) if value == b.value => b.argmins.push(x),
            _ => {
                best = Some(BruteOptimum {
                    value,
                    argmins: vec![x],
                })
            }
        }
    }
    best.ok_or_else(|| Error::Infeasible("no integer point satisfies the constraints".into()))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NashCensus {
    pub profiles: Vec<StrategyProfile>,
    pub potential_minima: Vec<StrategyProfile>,
    pub equilibria: Vec<StrategyProfile>,
}

impl NashCensus {
    /// Potential minima that are not equilibria.
    pub fn violations(&self) -> Vec<&StrategyProfile> {
        self.potential_minima
            .iter()
            .filter(|p| !self.equilibria.contains(p))
            .collect()
    }
}

fn mat_vec(m: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn usage(strategies: &[&[i64]], n: usize) -> Vec<i64> {
    let mut y = vec![0; n];
    for x in strategies {
        for (yj, xj) in y.iter_mut().zip(x.iter()) {
            *yj += xj;
        }
    }
    y
}

fn cost_of(game: &GameInstance, y: &[i64]) -> Result<BigRational> {
    eval_objective(game.costs(), &IntVector::from_i64s(y))
}

/// Enumerates every feasible profile, marks the minimizers of the provider
/// cost and, by trying every unilateral deviation, the equilibria.
#[allow(clippy::needless_range_loop)]
pub fn brute_nash_check(game: &GameInstance) -> Result<NashCensus> {
    let n = game.n();
    let players = game.player_count();
    let b0 = game
        .b0()
        .to_i64s()
        .ok_or_else(|| Error::InvalidInput("b0 exceeds the i64 range".into()))?;

    let mut strategy_sets: Vec<Vec<Vec<i64>>> = Vec::with_capacity(players);
    let mut couplings: Vec<Vec<Vec<i64>>> = Vec::with_capacity(players);
    for p in game.players() {
        let a = small_matrix(&p.a)?;
        let b =
            p.b.to_i64s()
                .ok_or_else(|| Error::InvalidInput("b exceeds i64".into()))?;
        let u =
            p.u.to_i64s()
                .ok_or_else(|| Error::InvalidInput("u exceeds i64".into()))?;
        let mut set = Vec::new();
        for_each_point(&vec![0; n], &u, DEFAULT_BOX_CAP, |x| {
            if mat_vec(&a, x) == b {
                set.push(x.to_vec());
            }
        })?;
        strategy_sets.push(set);
        couplings.push(small_matrix(&p.coupling)?);
    }
    let total = strategy_sets
        .iter()
        .try_fold(1u64, |acc, s| {
            acc.checked_mul(s.len() as u64)
                .filter(|c| *c <= DEFAULT_BOX_CAP)
        })
        .ok_or(cap_error(DEFAULT_BOX_CAP))?;

    let loads: Vec<Vec<Vec<i64>>> = strategy_sets
        .iter()
        .zip(&couplings)
        .map(|(set, c)| set.iter().map(|x| mat_vec(c, x)).collect())
        .collect();
    let coupled_ok = |choice: &[usize]| -> bool {
        (0..b0.len()).all(|r| {
            let load: i64 = choice
                .iter()
                .enumerate()
                .map(|(i, &s)| loads[i][s][r])
                .sum();
            load <= b0[r]
        })
    };

    let mut census = NashCensus::default();
    if total == 0 {
        return Ok(census);
    }
    let mut feasible: Vec<(Vec<usize>, BigRational, bool)> = Vec::new();
    let mut choice = vec![0usize; players];
    loop {
        if coupled_ok(&choice) {
            let picked: Vec<&[i64]> = choice
                .iter()
                .enumerate()
                .map(|(i, &s)| strategy_sets[i][s].as_slice())
                .collect();
            let y = usage(&picked, n);
            let potential = cost_of(game, &y)?;
            let mut stable = true;
            'players: for k in 0..players {
                let mine = cost_of(game, &y)? - cost_of(game, &usage(&without(&picked, k), n))?;
                let mut alt = choice.clone();
                for s in 0..strategy_sets[k].len() {
                    if s == choice[k] {
                        continue;
                    }
                    alt[k] = s;
                    if !coupled_ok(&alt) {
                        continue;
                    }
                    let mut moved = picked.clone();
                    moved[k] = strategy_sets[k][s].as_slice();
                    let y_alt = usage(&moved, n);
                    let theirs =
                        cost_of(game, &y_alt)? - cost_of(game, &usage(&without(&moved, k), n))?;
                    if theirs < mine {
                        stable = false;
                        break 'players;
                    }
                }
            }
            feasible.push((choice.clone(), potential, stable));
        }
        if !advance(&mut choice, &strategy_sets) {
            break;
        }
    }

    let to_profile = |c: &[usize]| {
        StrategyProfile::new(
            c.iter()
                .enumerate()
                .map(|(i, &s)| IntVector::from_i64s(&strategy_sets[i][s]))
                .collect(),
        )
    };
    let minimum = feasible.iter().map(|f| f.1.clone()).min();
    for (c, potential, stable) in &feasible {
        let profile = to_profile(c);
        if Some(potential) == minimum.as_ref() {
            census.potential_minima.push(profile.clone());
        }
        if *stable {
            census.equilibria.push(profile.clone());
        }
        census.profiles.push(profile);
    }
    Ok(census)
}

fn without<'a>(picked: &[&'a [i64]], k: usize) -> Vec<&'a [i64]> {
    picked
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, x)| *x)
        .collect()
}

/// Odometer over the strategy indices; `false` once exhausted.
fn advance(choice: &mut [usize], sets: &[Vec<Vec<i64>>]) -> bool {
    for k in (0..choice.len()).rev() {
        if choice[k] + 1 < sets[k].len() {
            choice[k] += 1;
            return true;
        }
        choice[k] = 0;
    }
    false
}

/// Largest absolute entry as a `u32` box bound, for comparing against
/// [`brute_graver`].
pub fn bound_of(g: &GraverBasis) -> Option<u32> {
    g.max_norm().to_u32()
}

/// Checks that `x` is an integer combination of `basis` by solving for the
/// coefficients exactly.
pub fn in_lattice(basis: &[IntVector], x: &IntVector) -> Result<bool> {
    if basis.is_empty() {
        return Ok(x.is_zero());
    }
    let cols = basis.len();
    let mut m = IntMatrix::zeros(x.len(), cols);
    for (c, b) in basis.iter().enumerate() {
        Error::check_len(x.len(), b.len())?;
        for (r, e) in b.iter().enumerate() {
            m.set(r, c, e.clone());
        }
    }
    Ok(crate::exactmath::solve_integer(&m, x)?.is_some())
}
