//! Integer-programming games with congestion costs.
//!
//! Player `i` picks `x^i` with `A^i x^i = b^i`, `0 <= x^i <= u^i`; all
//! players share `sum_i B^i x^i <= b^0`. With aggregate usage
//! `y = sum_i x^i` the provider pays `sum_j c_j(y_j)` and player `k` is
//! charged the marginal amount `sum_j c_j(y_j) - sum_j c_j(y_j - x^k_j)`.
//! Every minimizer of the provider cost is a generalized Nash equilibrium,
//! which is how [`find_equilibrium`] computes one.
//!
//! Players are indexed from zero.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::convexobj::{eval_objective, SeparableObjective, DEFAULT_PROBE_RANGE};
use crate::error::{Error, Result};
use crate::exactmath::{IntMatrix, IntVector};
use crate::nfold::{
    build_multitype_matrix, build_nash_matrix, coupling_slack_bound, NfoldSpec, TypeCatalog,
};
use crate::solver::{solve_ip_with, IpInstance, SolveResult, SolveStatus, SolverConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerSpec {
    #[serde(rename = "A")]
    pub a: IntMatrix,
    pub b: IntVector,
    pub u: IntVector,
    #[serde(rename = "B")]
    pub coupling: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GameJson", into = "GameJson")]
pub struct GameInstance {
    players: Vec<PlayerSpec>,
    b0: IntVector,
    costs: SeparableObjective,
}

#[derive(Serialize, Deserialize)]
struct GameJson {
    players: Vec<PlayerSpec>,
    #[serde(default)]
    b0: IntVector,
    costs: SeparableObjective,
}

impl TryFrom<GameJson> for GameInstance {
    type Error = Error;

    fn try_from(j: GameJson) -> Result<Self> {
        GameInstance::new(j.players, j.b0, j.costs)
    }
}

impl From<GameInstance> for GameJson {
    fn from(g: GameInstance) -> Self {
        GameJson {
            players: g.players,
            b0: g.b0,
            costs: g.costs,
        }
    }
}

impl GameInstance {
    /// Validates shapes and requires every cost to be convex and
    /// monotonously increasing. Empty `A`/`B` blocks take the common width.
    pub fn new(players: Vec<PlayerSpec>, b0: IntVector, costs: SeparableObjective) -> Result<Self> {
        if players.is_empty() {
            return Err(Error::InvalidInput(
                "a game needs at least one player".into(),
            ));
        }
        let n = costs.len();
        let m = b0.len();
        let mut fixed = Vec::with_capacity(players.len());
        for (i, p) in players.into_iter().enumerate() {
            Error::check_len(n, p.u.len())?;
            let a = p.a.with_width(n)?;
            Error::check_len(a.rows(), p.b.len())?;
            let coupling = if p.coupling.rows() == 0 {
                IntMatrix::zeros(m, n)
            } else {
                p.coupling.with_width(n)?
            };
            if coupling.rows() != m {
                return Err(Error::DimensionMismatch(format!(
                    "player {i}: coupling block has {} rows, b0 has {m}",
                    coupling.rows()
                )));
            }
            if !p.u.is_nonnegative() {
                return Err(Error::InvalidInput(format!(
                    "player {i}: negative upper bound"
                )));
            }
            fixed.push(PlayerSpec {
                a,
                b: p.b,
                u: p.u,
                coupling,
            });
        }
        costs.validate_all(DEFAULT_PROBE_RANGE)?;
        Ok(GameInstance {
            players: fixed,
            b0,
            costs,
        })
    }

    pub fn players(&self) -> &[PlayerSpec] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn b0(&self) -> &IntVector {
        &self.b0
    }

    pub fn costs(&self) -> &SeparableObjective {
        &self.costs
    }

    /// Number of resources.
    pub fn n(&self) -> usize {
        self.costs.len()
    }

    /// Number of coupling rows.
    pub fn m(&self) -> usize {
        self.b0.len()
    }

    /// `A^k z = b^k` and `0 <= z <= u^k`.
    pub fn is_strategy(&self, k: usize, z: &IntVector) -> bool {
        let p = &self.players[k];
        z.len() == self.n()
            && z.within(&IntVector::zeros(self.n()), &p.u)
            && p.a.mul_vec(z).is_ok_and(|r| r == p.b)
    }

    /// `sum_i B^i x^i`
    pub fn coupling_load(&self, p: &StrategyProfile) -> IntVector {
        let mut load = IntVector::zeros(self.m());
        for (spec, x) in self.players.iter().zip(&p.strategies) {
            let part = spec.coupling.mul_vec(x).expect("validated profile");
            load = load.checked_add(&part).expect("same length");
        }
        load
    }

    pub fn check_profile(&self, p: &StrategyProfile) -> Result<()> {
        Error::check_len(self.player_count(), p.strategies.len())?;
        for (k, x) in p.strategies.iter().enumerate() {
            Error::check_len(self.n(), x.len())?;
            if !self.is_strategy(k, x) {
                return Err(Error::Infeasible(format!(
                    "{x} is not a strategy of player {k}"
                )));
            }
        }
        let load = self.coupling_load(p);
        if load.iter().zip(self.b0.iter()).any(|(l, b)| l > b) {
            return Err(Error::Infeasible(format!(
                "coupling load {load} exceeds b0 {}",
                self.b0
            )));
        }
        Ok(())
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k < self.player_count() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: k,
                len: self.player_count(),
            })
        }
    }

    /// Distinct `(A, B)` pairs in first-appearance order and each player's
    /// index into them.
    pub fn type_catalog(&self) -> Result<TypeCatalog> {
        let mut types: Vec<(IntMatrix, IntMatrix)> = Vec::new();
        let mut assignment = Vec::with_capacity(self.players.len());
        for p in &self.players {
            let key = (p.a.clone(), p.coupling.clone());
            let idx = match types.iter().position(|t| *t == key) {
                Some(i) => i,
                None => {
                    types.push(key);
                    types.len() - 1
                }
            };
            assignment.push(idx);
        }
        TypeCatalog::new(types, assignment)
    }

    /// The equilibrium program: minimize `sum_j c_j(y_j)` over
    /// `(x^1..x^N, y, s)` subject to the aggregation, coupling-with-slack
    /// and per-player rows. Same-type games use the N-fold matrix directly.
    pub fn equilibrium_program(&self) -> Result<IpInstance> {
        let catalog = self.type_catalog()?;
        let matrix = if catalog.types().len() == 1 {
            let (a, b) = &catalog.types()[0];
            build_nash_matrix(&NfoldSpec::new(a.clone(), b.clone(), self.player_count())?)
        } else {
            build_multitype_matrix(&catalog)
        };
        let n = self.n();
        let mut rhs: Vec<BigInt> = vec![BigInt::from(0); n];
        rhs.extend(self.b0.iter().cloned());
        for p in &self.players {
            rhs.extend(p.b.iter().cloned());
        }

        let mut upper: Vec<BigInt> = Vec::new();
        let mut usage_bound = IntVector::zeros(n);
        for p in &self.players {
            upper.extend(p.u.iter().cloned());
            usage_bound = usage_bound.checked_add(&p.u)?;
        }
        upper.extend(usage_bound.into_inner());
        let couplings: Vec<&IntMatrix> = self.players.iter().map(|p| &p.coupling).collect();
        let uppers: Vec<&IntVector> = self.players.iter().map(|p| &p.u).collect();
        upper.extend(coupling_slack_bound(&self.b0, &couplings, &uppers).into_inner());

        let mut objective = SeparableObjective::zeros(self.player_count() * n);
        objective.extend(self.costs.clone());
        objective.extend(SeparableObjective::zeros(self.m()));
        IpInstance::new(
            matrix,
            IntVector::new(rhs),
            IntVector::new(upper),
            objective,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub strategies: Vec<IntVector>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<IntVector>) -> Self {
        StrategyProfile { strategies }
    }
}

/// Componentwise sum of all strategies.
pub fn aggregate_usage(p: &StrategyProfile) -> IntVector {
    let n = p.strategies.first().map_or(0, IntVector::len);
    p.strategies.iter().fold(IntVector::zeros(n), |acc, x| {
        acc.checked_add(x).expect("equal lengths")
    })
}

/// `sum_j c_j(y_j)` at the aggregate usage.
pub fn provider_cost(game: &GameInstance, p: &StrategyProfile) -> Result<BigRational> {
    game.check_profile(p)?;
    eval_objective(game.costs(), &aggregate_usage(p))
}

/// Usage of everyone except player `k`.
fn others_usage(p: &StrategyProfile, k: usize) -> IntVector {
    aggregate_usage(p)
        .checked_sub(&p.strategies[k])
        .expect("equal lengths")
}

/// Marginal cost of player `k`: provider cost minus what it would be
/// without `k`.
pub fn player_cost(game: &GameInstance, p: &StrategyProfile, k: usize) -> Result<BigRational> {
    game.check_index(k)?;
    game.check_profile(p)?;
    let with = eval_objective(game.costs(), &aggregate_usage(p))?;
    let without = eval_objective(game.costs(), &others_usage(p, k))?;
    Ok(with - without)
}

/// Player `k`'s own program given the others: minimize
/// `sum_j c_j(z_j + r_j)` over `z` with `A^k z = b^k`, `0 <= z <= u^k` and
/// `B^k z + s = b^0 - sum_{i != k} B^i x^i`, `s >= 0`.
pub fn best_response_program(
    game: &GameInstance,
    p: &StrategyProfile,
    k: usize,
) -> Result<IpInstance> {
    game.check_index(k)?;
    Error::check_len(game.player_count(), p.strategies.len())?;
    let (n, m) = (game.n(), game.m());
    let spec = &game.players[k];
    let others = others_usage(p, k);

    let mut remaining = game.b0.clone();
    for (i, (q, x)) in game.players.iter().zip(&p.strategies).enumerate() {
        if i != k {
            remaining = remaining.checked_sub(&q.coupling.mul_vec(x)?)?;
        }
    }

    let d = spec.a.rows();
    let mut matrix = IntMatrix::zeros(d + m, n + m);
    matrix.place(0, 0, &spec.a);
    matrix.place(d, 0, &spec.coupling);
    matrix.place(d, n, &IntMatrix::identity(m));
    let rhs = IntVector::concat(&[&spec.b, &remaining]);
    let slack = coupling_slack_bound(&remaining, &[&spec.coupling], &[&spec.u]);
    let upper = IntVector::concat(&[&spec.u, &slack]);

    let mut objective = SeparableObjective::new(
        game.costs()
            .terms()
            .iter()
            .zip(others.iter())
            .map(|(c, r)| c.clone().shifted(r.clone()))
            .collect(),
    );
    objective.extend(SeparableObjective::zeros(m));
    IpInstance::new(matrix, rhs, upper, objective)
}

pub fn best_response(game: &GameInstance, p: &StrategyProfile, k: usize) -> Result<IntVector> {
    best_response_with(game, p, k, &SolverConfig::default())
}

/// A minimizer of player `k`'s program.
pub fn best_response_with(
    game: &GameInstance,
    p: &StrategyProfile,
    k: usize,
    config: &SolverConfig,
) -> Result<IntVector> {
    let program = best_response_program(game, p, k)?;
    let result = solve_ip_with(&program, config)?;
    match result.x {
        Some(x) => Ok(x.slice(0, game.n())),
        None => Err(Error::Infeasible(format!(
            "player {k} has no admissible strategy"
        ))),
    }
}

pub fn is_satisfied(game: &GameInstance, p: &StrategyProfile, k: usize) -> Result<bool> {
    is_satisfied_with(game, p, k, &SolverConfig::default())
}

/// Player `k` pays no more than a best response would. Both costs share
/// the subtracted term, so the provider costs are compared directly.
pub fn is_satisfied_with(
    game: &GameInstance,
    p: &StrategyProfile,
    k: usize,
    config: &SolverConfig,
) -> Result<bool> {
    game.check_profile(p)?;
    let z = best_response_with(game, p, k, config)?;
    let others = others_usage(p, k);
    let current = eval_objective(game.costs(), &aggregate_usage(p))?;
    let best = eval_objective(game.costs(), &others.checked_add(&z)?)?;
    Ok(current <= best)
}

pub fn is_generalized_nash(game: &GameInstance, p: &StrategyProfile) -> Result<bool> {
    is_generalized_nash_with(game, p, &SolverConfig::default())
}

pub fn is_generalized_nash_with(
    game: &GameInstance,
    p: &StrategyProfile,
    config: &SolverConfig,
) -> Result<bool> {
    for k in 0..game.player_count() {
        if !is_satisfied_with(game, p, k, config)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct Equilibrium {
    pub profile: StrategyProfile,
    pub solve: SolveResult,
}

pub fn find_equilibrium(game: &GameInstance) -> Result<StrategyProfile> {
    find_equilibrium_with(game, &SolverConfig::default()).map(|e| e.profile)
}

/// Minimizes the provider cost over all feasible profiles and returns the
/// minimizer's strategies.
pub fn find_equilibrium_with(game: &GameInstance, config: &SolverConfig) -> Result<Equilibrium> {
    let program = game.equilibrium_program()?;
    let solve = solve_ip_with(&program, config)?;
    if solve.status == SolveStatus::Infeasible {
        return Err(Error::Infeasible(
            "no strategy profile satisfies the coupling constraint".into(),
        ));
    }
    let x = solve.x.as_ref().expect("optimal result carries a point");
    let n = game.n();
    let strategies = (0..game.player_count())
        .map(|i| x.slice(i * n, n))
        .collect();
    Ok(Equilibrium {
        profile: StrategyProfile { strategies },
        solve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexobj::UnivariateCost;
    use crate::exactmath::rational::int;

    fn v(e: &[i64]) -> IntVector {
        IntVector::from_i64s(e)
    }

    fn pick_one(u: &[i64], coupling: &[&[i64]]) -> PlayerSpec {
        PlayerSpec {
            a: IntMatrix::from_i64_rows(&[&vec![1; u.len()]]),
            b: v(&[1]),
            u: v(u),
            coupling: IntMatrix::from_i64_rows(coupling),
        }
    }

    /// Two players each pick one of two resources, `c(y) = y^2`.
    fn two_by_two() -> GameInstance {
        GameInstance::new(
            vec![pick_one(&[1, 1], &[]), pick_one(&[1, 1], &[])],
            IntVector::zeros(0),
            vec![UnivariateCost::square(); 2].into(),
        )
        .unwrap()
    }

    fn profile(rows: &[&[i64]]) -> StrategyProfile {
        StrategyProfile::new(rows.iter().map(|r| v(r)).collect())
    }

    #[test]
    fn usage_examples() {
        assert_eq!(aggregate_usage(&profile(&[&[1, 0], &[0, 1]])), v(&[1, 1]));
        assert_eq!(aggregate_usage(&profile(&[&[1, 0], &[1, 0]])), v(&[2, 0]));
        assert_eq!(aggregate_usage(&profile(&[&[3, 4]])), v(&[3, 4]));
    }

    #[test]
    fn provider_and_player_costs() {
        let g = two_by_two();
        assert_eq!(
            provider_cost(&g, &profile(&[&[1, 0], &[0, 1]])).unwrap(),
            int(2)
        );
        assert_eq!(
            provider_cost(&g, &profile(&[&[1, 0], &[1, 0]])).unwrap(),
            int(4)
        );
        assert_eq!(
            player_cost(&g, &profile(&[&[1, 0], &[0, 1]]), 0).unwrap(),
            int(1)
        );
        assert_eq!(
            player_cost(&g, &profile(&[&[1, 0], &[1, 0]]), 0).unwrap(),
            int(3)
        );
        assert!(player_cost(&g, &profile(&[&[1, 0], &[0, 1]]), 2).is_err());
        assert!(provider_cost(&g, &profile(&[&[1, 1], &[0, 1]])).is_err());
    }

    #[test]
    fn zero_strategy_costs_nothing() {
        let free = PlayerSpec {
            a: IntMatrix::zeros(0, 2),
            b: IntVector::zeros(0),
            u: v(&[1, 1]),
            coupling: IntMatrix::zeros(0, 2),
        };
        let g = GameInstance::new(
            vec![free.clone(), free],
            IntVector::zeros(0),
            vec![UnivariateCost::square(); 2].into(),
        )
        .unwrap();
        assert_eq!(
            player_cost(&g, &profile(&[&[0, 0], &[1, 1]]), 0).unwrap(),
            int(0)
        );
        assert_eq!(
            provider_cost(&g, &profile(&[&[0, 0], &[0, 0]])).unwrap(),
            int(0)
        );
    }

    #[test]
    fn best_responses() {
        let g = two_by_two();
        assert_eq!(
            best_response(&g, &profile(&[&[1, 0], &[1, 0]]), 1).unwrap(),
            v(&[0, 1])
        );
        assert_eq!(
            best_response(&g, &profile(&[&[0, 1], &[0, 1]]), 1).unwrap(),
            v(&[1, 0])
        );
    }

    #[test]
    fn single_player_best_response_is_the_global_optimum() {
        let g = GameInstance::new(
            vec![PlayerSpec {
                a: IntMatrix::from_i64_rows(&[&[1, 1, 1]]),
                b: v(&[4]),
                u: v(&[4, 4, 4]),
                coupling: IntMatrix::zeros(0, 3),
            }],
            IntVector::zeros(0),
            vec![
                UnivariateCost::square(),
                UnivariateCost::linear(5),
                UnivariateCost::square(),
            ]
            .into(),
        )
        .unwrap();
        let z = best_response(&g, &profile(&[&[4, 0, 0]]), 0).unwrap();
        assert_eq!(z, v(&[2, 0, 2]));
        assert_eq!(find_equilibrium(&g).unwrap(), profile(&[&[2, 0, 2]]));
    }

    #[test]
    fn satisfaction() {
        let g = two_by_two();
        let split = profile(&[&[1, 0], &[0, 1]]);
        assert!(is_satisfied(&g, &split, 0).unwrap());
        assert!(is_satisfied(&g, &split, 1).unwrap());
        assert!(is_generalized_nash(&g, &split).unwrap());
        let crowded = profile(&[&[1, 0], &[1, 0]]);
        assert!(!is_satisfied(&g, &crowded, 0).unwrap());
        assert!(!is_satisfied(&g, &crowded, 1).unwrap());
        assert!(!is_generalized_nash(&g, &crowded).unwrap());
    }

    #[test]
    fn only_strategy_is_always_satisfied() {
        let g = GameInstance::new(
            vec![pick_one(&[1, 0], &[])],
            IntVector::zeros(0),
            vec![UnivariateCost::square(); 2].into(),
        )
        .unwrap();
        assert!(is_satisfied(&g, &profile(&[&[1, 0]]), 0).unwrap());
    }

    #[test]
    fn equilibrium_spreads_players() {
        let eq = find_equilibrium(&two_by_two()).unwrap();
        assert_eq!(aggregate_usage(&eq), v(&[1, 1]));
        assert!(is_generalized_nash(&two_by_two(), &eq).unwrap());
    }

    #[test]
    fn coupling_forces_resource_two() {
        let g = GameInstance::new(
            vec![pick_one(&[1, 1], &[&[1, 0]]), pick_one(&[1, 1], &[&[1, 0]])],
            v(&[0]),
            vec![UnivariateCost::square(); 2].into(),
        )
        .unwrap();
        let eq = find_equilibrium(&g).unwrap();
        assert_eq!(eq, profile(&[&[0, 1], &[0, 1]]));
        assert!(is_generalized_nash(&g, &eq).unwrap());
    }

    #[test]
    fn infeasible_game_is_reported() {
        let g = GameInstance::new(
            vec![pick_one(&[1, 1], &[&[1, 1]])],
            v(&[0]),
            vec![UnivariateCost::square(); 2].into(),
        )
        .unwrap();
        assert!(matches!(find_equilibrium(&g), Err(Error::Infeasible(_))));
    }

    #[test]
    fn mixed_types_use_the_catalog() {
        let g = GameInstance::new(
            vec![
                pick_one(&[1, 1, 1], &[&[1, 0, 0]]),
                PlayerSpec {
                    a: IntMatrix::from_i64_rows(&[&[1, 1, 0]]),
                    b: v(&[2]),
                    u: v(&[2, 2, 2]),
                    coupling: IntMatrix::from_i64_rows(&[&[0, 1, 0]]),
                },
            ],
            v(&[2]),
            vec![UnivariateCost::square(); 3].into(),
        )
        .unwrap();
        assert_eq!(g.type_catalog().unwrap().types().len(), 2);
        let eq = find_equilibrium(&g).unwrap();
        assert!(is_generalized_nash(&g, &eq).unwrap());
    }

    #[test]
    fn costs_must_be_monotone() {
        let bad = GameInstance::new(
            vec![pick_one(&[1, 1], &[])],
            IntVector::zeros(0),
            vec![UnivariateCost::square(), UnivariateCost::linear(-1)].into(),
        );
        assert!(matches!(bad, Err(Error::InvalidCost(_))));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"players": [
            {"A": [[1,1]], "b": [1], "u": [1,1], "B": []},
            {"A": [[1,1]], "b": [1], "u": [1,1], "B": []}],
          "b0": [],
          "costs": [{"kind":"quadratic","a":"1","b":"0","c":"0"},
                    {"kind":"quadratic","a":"1","b":"0","c":"0"}]}"#;
        let g: GameInstance = serde_json::from_str(text).unwrap();
        assert_eq!(g, two_by_two());
        let back: GameInstance = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
