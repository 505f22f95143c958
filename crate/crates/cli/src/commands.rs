use std::fs;
use std::path::PathBuf;

use nashfold_core::exactmath::{format_rational, IntMatrix};
use nashfold_core::game::{
    best_response_with, find_equilibrium_with, is_satisfied_with, player_cost, provider_cost,
    GameInstance, StrategyProfile,
};
use nashfold_core::graver::graver_basis_with_cap;
use nashfold_core::inverse::{
    feasible_shifts, solve_iiop, verify_answer, IiopAnswer, IiopInstance,
};
use nashfold_core::nfold::{
    build_c_matrix, build_multitype_matrix, build_nash_matrix, build_nfold, graver_growth,
    NfoldSpec, TypeCatalog,
};
use nashfold_core::oracle::{brute_graver_with_cap, brute_ip_opt, brute_nash_check};
use nashfold_core::random;
use nashfold_core::solver::{solve_ip_with, IpInstance, SolveStatus, SolverConfig};
use nashfold_core::{aggregate_usage, Error};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{Command, MatrixKind, OracleKind};
use crate::report::{Failure, Metrics, Outcome, Status};

/// Input files read up front so their digest covers exactly what was
/// parsed.
pub struct Inputs {
    paths: Vec<PathBuf>,
    pub bytes: Vec<Vec<u8>>,
}

impl Inputs {
    pub fn read(paths: &[PathBuf]) -> Result<Self, Failure> {
        let bytes = paths
            .iter()
            .map(|p| {
                fs::read(p).map_err(|e| Failure::input(format!("cannot read {}: {e}", p.display())))
            })
            .collect::<Result<_, _>>()?;
        Ok(Inputs {
            paths: paths.to_vec(),
            bytes,
        })
    }

    fn expect(&self, count: usize, what: &str) -> Result<(), Failure> {
        if self.paths.len() == count {
            Ok(())
        } else {
            Err(Failure::input(format!(
                "expected {count} --input file(s) ({what}), got {}",
                self.paths.len()
            )))
        }
    }

    fn parse<T: DeserializeOwned>(&self, index: usize) -> Result<T, Failure> {
        serde_json::from_slice(&self.bytes[index])
            .map_err(|e| Failure::input(format!("{}: {e}", self.paths[index].display())))
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload types serialize infallibly")
}

fn config(cap: Option<u64>) -> SolverConfig {
    let mut c = SolverConfig::default();
    if let Some(cap) = cap {
        c.graver_cap = cap as usize;
    }
    c
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Wrapped {
        #[serde(rename = "D")]
        d: IntMatrix,
    },
    Bare(IntMatrix),
}

pub fn run(command: &Command, inputs: &Inputs, m: &mut Metrics) -> Result<Outcome, Failure> {
    let common = command.common();
    let cfg = config(common.cap);
    match command {
        Command::Graver(_) => {
            inputs.expect(1, "matrix")?;
            let d = match inputs.parse::<MatrixInput>(0)? {
                MatrixInput::Wrapped { d } | MatrixInput::Bare(d) => d,
            };
            let g = m.time("graver", || graver_basis_with_cap(&d, cfg.graver_cap))?;
            m.count("graver_size", g.len());
            Ok(Outcome::ok(
                json!({ "size": g.len(), "elements": g.elements() }),
            ))
        }
        Command::Nfold { kind, growth, .. } => {
            inputs.expect(1, "matrix description")?;
            nfold(inputs, *kind, *growth, &cfg, m)
        }
        Command::Solve(_) => {
            inputs.expect(1, "integer program")?;
            let inst: IpInstance = inputs.parse(0)?;
            let r = m.time("solve", || solve_ip_with(&inst, &cfg))?;
            m.count("graver_size", r.graver_size);
            m.count("augmentation_count", r.augmentation_count);
            m.count("feasibility_augmentations", r.feasibility_augmentations);
            if r.status == SolveStatus::Infeasible {
                Ok(Outcome::with_status(
                    Status::Infeasible,
                    to_value(&r),
                    "no feasible point",
                ))
            } else {
                Ok(Outcome::ok(to_value(&r)))
            }
        }
        Command::Equilibrium(_) => {
            inputs.expect(1, "game")?;
            let game: GameInstance = inputs.parse(0)?;
            let eq = match m.time("equilibrium", || find_equilibrium_with(&game, &cfg)) {
                Ok(eq) => eq,
                Err(Error::Infeasible(msg)) => {
                    return Ok(Outcome::with_status(Status::Infeasible, Value::Null, msg))
                }
                Err(e) => return Err(e.into()),
            };
            m.count("graver_size", eq.solve.graver_size);
            m.count("augmentation_count", eq.solve.augmentation_count);
            let cost = provider_cost(&game, &eq.profile)?;
            Ok(Outcome::ok(json!({
                "strategies": eq.profile.strategies,
                "usage": aggregate_usage(&eq.profile),
                "provider_cost": format_rational(&cost),
            })))
        }
        Command::VerifyEquilibrium(_) => {
            inputs.expect(2, "game and profile")?;
            let game: GameInstance = inputs.parse(0)?;
            let profile: StrategyProfile = inputs.parse(1)?;
            game.check_profile(&profile)
                .map_err(|e| Failure::input(format!("profile rejected: {e}")))?;
            let satisfied = m.time("verify", || {
                (0..game.player_count())
                    .map(|k| is_satisfied_with(&game, &profile, k, &cfg))
                    .collect::<Result<Vec<_>, _>>()
            })?;
            let all = satisfied.iter().all(|s| *s);
            let result = json!({
                "equilibrium": all,
                "satisfied": satisfied,
                "provider_cost": format_rational(&provider_cost(&game, &profile)?),
            });
            if all {
                Ok(Outcome::ok(result))
            } else {
                Ok(Outcome::with_status(
                    Status::Rejected,
                    result,
                    "some player can improve",
                ))
            }
        }
        Command::BestResponse { player, .. } => {
            inputs.expect(2, "game and profile")?;
            let game: GameInstance = inputs.parse(0)?;
            let profile: StrategyProfile = inputs.parse(1)?;
            let z = m.time("best_response", || {
                best_response_with(&game, &profile, *player, &cfg)
            })?;
            let mut moved = profile.clone();
            moved.strategies[*player] = z.clone();
            let result = json!({
                "player": player,
                "strategy": z,
                "cost": format_rational(&player_cost(&game, &moved, *player)?),
            });
            Ok(Outcome::ok(result))
        }
        Command::Inverse(_) => {
            inputs.expect(1, "inverse instance")?;
            let inst: IiopInstance = inputs.parse(0)?;
            let g = m.time("graver", || {
                graver_basis_with_cap(inst.matrix(), cfg.graver_cap)
            })?;
            m.count("graver_size", g.len());
            m.count("feasible_shifts", feasible_shifts(&g, &inst)?.len());
            let ans = m.time("lp", || solve_iiop(&inst, &g))?;
            if ans.is_yes() {
                Ok(Outcome::ok(to_value(&ans)))
            } else {
                Ok(Outcome::with_status(
                    Status::No,
                    to_value(&ans),
                    "no weighting makes x* optimal",
                ))
            }
        }
        Command::VerifyInverse(_) => {
            inputs.expect(2, "inverse instance and answer")?;
            let inst: IiopInstance = inputs.parse(0)?;
            let ans: IiopAnswer = inputs.parse(1)?;
            let g = m.time("graver", || {
                graver_basis_with_cap(inst.matrix(), cfg.graver_cap)
            })?;
            m.count("graver_size", g.len());
            let valid = m.time("verify", || verify_answer(&inst, &g, &ans))?;
            let result =
                json!({ "valid": valid, "verdict": if ans.is_yes() { "yes" } else { "no" } });
            if valid {
                Ok(Outcome::ok(result))
            } else {
                Ok(Outcome::with_status(
                    Status::Rejected,
                    result,
                    "answer does not verify",
                ))
            }
        }
        Command::Oracle { kind, .. } => {
            inputs.expect(0, "none; instances come from --seed")?;
            oracle(*kind, common.seed, common.cap, m)
        }
    }
}

fn nfold(
    inputs: &Inputs,
    kind: MatrixKind,
    growth: Option<usize>,
    cfg: &SolverConfig,
    m: &mut Metrics,
) -> Result<Outcome, Failure> {
    let (matrix, spec) = if kind == MatrixKind::Multitype {
        let catalog: TypeCatalog = inputs.parse(0)?;
        (m.time("build", || build_multitype_matrix(&catalog)), None)
    } else {
        let spec: NfoldSpec = inputs.parse(0)?;
        let matrix = m.time("build", || match kind {
            MatrixKind::Nfold => build_nfold(&spec),
            MatrixKind::Nash => build_nash_matrix(&spec),
            _ => build_c_matrix(&spec),
        });
        (matrix, Some(spec))
    };
    let mut result = json!({
        "rows": matrix.rows(),
        "cols": matrix.cols(),
        "matrix": matrix,
    });
    if let Some(max) = growth {
        let spec =
            spec.ok_or_else(|| Failure::input("--growth needs an {\"A\",\"B\",\"N\"} spec"))?;
        let table = m.time("growth", || graver_growth(&spec, max, Some(cfg.graver_cap)))?;
        result["growth"] = table
            .iter()
            .map(|(n, size)| json!({ "N": n, "graver_size": size }))
            .collect();
    }
    Ok(Outcome::ok(result))
}

fn oracle(
    kind: OracleKind,
    seed: u64,
    cap: Option<u64>,
    m: &mut Metrics,
) -> Result<Outcome, Failure> {
    let mut rng = random::seeded(seed);
    let result = match kind {
        OracleKind::Graver => {
            let d = random::random_matrix(&mut rng, 2, 4, -2, 2);
            let box_cap = cap.unwrap_or(nashfold_core::oracle::DEFAULT_BOX_CAP);
            let g = m.time("oracle", || brute_graver_with_cap(&d, 3, box_cap))?;
            json!({ "seed": seed, "D": d, "bound": 3, "elements": g.elements() })
        }
        OracleKind::Ip => {
            let inst = random::random_ip_instance(&mut rng, 4, 4);
            let opt = match m.time("oracle", || brute_ip_opt(&inst)) {
                Ok(o) => json!({
                    "value": format_rational(&o.value),
                    "argmins": o.argmins,
                }),
                Err(Error::Infeasible(_)) => json!("infeasible"),
                Err(e) => return Err(e.into()),
            };
            json!({ "seed": seed, "instance": inst, "optimum": opt })
        }
        OracleKind::Game => {
            let game = random::random_game(&mut rng, 2, 2, 2);
            let c = m.time("oracle", || brute_nash_check(&game))?;
            json!({
                "seed": seed,
                "game": game,
                "profiles": c.profiles,
                "potential_minima": c.potential_minima,
                "equilibria": c.equilibria,
            })
        }
        OracleKind::Iiop => match m.time("oracle", || random::planted_iiop(&mut rng, 3, 3))? {
            Some((inst, weights)) => {
                json!({ "seed": seed, "instance": inst, "planted_weights": weights })
            }
            None => json!({ "seed": seed, "instance": null }),
        },
    };
    Ok(Outcome::ok(result))
}
