//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use nashfold_core::exactmath::IntMatrix;
use nashfold_core::game::find_equilibrium;
use nashfold_core::graver::graver_basis;
use nashfold_core::inverse::{solve_iiop, verify_answer};
use nashfold_core::nfold::{build_c_matrix, build_nash_matrix, graver_growth, pad_to_c, NfoldSpec};
use nashfold_core::oracle::{
    bound_of, brute_graver, brute_ip_opt, brute_nash_check, feasible_points, is_graver_element,
};
use nashfold_core::random::{
    planted_iiop, random_game, random_ip_instance, random_matrix, refutable_iiop, seeded,
};
use nashfold_core::solver::{check_optimal, solve_ip, SolveStatus};
use nashfold_core::{Error, IntVector};
use rand::Rng;

const GRAVER_TIME_LIMIT: Duration = Duration::from_secs(60);
const GAME_TIME_LIMIT: Duration = Duration::from_secs(300);

type Verdict = Result<String, String>;

fn graver_correctness() -> Verdict {
    let start = Instant::now();
    let mut rng = seeded(0xC1);
    let (mut total, mut widest) = (0, 0);
    for i in 0..100 {
        let rows = rng.random_range(1..=2);
        let cols = rng.random_range(1..=4);
        let d = random_matrix(&mut rng, rows, cols, -2, 2);
        let g = graver_basis(&d).map_err(|e| format!("matrix {i}: {e}"))?;
        let bound = bound_of(&g).ok_or("bound exceeds u32")?.max(1);
        let brute = brute_graver(&d, bound).map_err(|e| format!("matrix {i}: {e}"))?;
        if g.elements() != brute.elements() {
            return Err(format!(
                "matrix {i} {d:?}: {} vs {} elements",
                g.len(),
                brute.len()
            ));
        }
        total += g.len();
        widest = widest.max(bound);
    }
    let elapsed = start.elapsed();
    if elapsed > GRAVER_TIME_LIMIT {
        return Err(format!("took {elapsed:.1?}, limit {GRAVER_TIME_LIMIT:?}"));
    }
    Ok(format!(
        "100/100 matrices equal ({total} elements, largest box bound {widest}), {elapsed:.2?} (limit 60 s)"
    ))
}

fn known_basis() -> Verdict {
    let g = graver_basis(&IntMatrix::from_i64_rows(&[&[1, 1, 1]])).map_err(|e| e.to_string())?;
    let mut expected: Vec<IntVector> = [
        [1, -1, 0],
        [-1, 1, 0],
        [1, 0, -1],
        [-1, 0, 1],
        [0, 1, -1],
        [0, -1, 1],
    ]
    .iter()
    .map(|v| IntVector::from_i64s(v))
    .collect();
    nashfold_core::exactmath::sort_canonical(&mut expected);
    if g.elements() == expected.as_slice() {
        Ok("6 elements ±(1,-1,0) ±(1,0,-1) ±(0,1,-1)".into())
    } else {
        Err(format!("got {:?}", g.elements()))
    }
}

fn equilibrium_existence() -> Verdict {
    let start = Instant::now();
    let mut rng = seeded(0xC3);
    let (mut games, mut drawn, mut checked_minima) = (0, 0, 0);
    while games < 50 {
        drawn += 1;
        if drawn > 10_000 {
            return Err("could not draw 50 games with feasible profiles".into());
        }
        let players = rng.random_range(1..=3);
        let n = rng.random_range(1..=3);
        let game = random_game(&mut rng, players, n, 2);
        let census = brute_nash_check(&game).map_err(|e| e.to_string())?;
        if census.profiles.is_empty() {
            continue;
        }
        games += 1;
        checked_minima += census.potential_minima.len();
        let violations = census.violations();
        if !violations.is_empty() {
            return Err(format!(
                "game {drawn}: potential minimum {:?} is not an equilibrium",
                violations[0]
            ));
        }
        let eq = find_equilibrium(&game).map_err(|e| format!("game {drawn}: {e}"))?;
        if !census.equilibria.contains(&eq) {
            return Err(format!(
                "game {drawn}: computed profile {eq:?} is not an equilibrium"
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > GAME_TIME_LIMIT {
        return Err(format!("took {elapsed:.1?}, limit {GAME_TIME_LIMIT:?}"));
    }
    Ok(format!(
        "50 games ({drawn} drawn), {checked_minima} potential minima, 0 violations, {elapsed:.2?} (limit 300 s)"
    ))
}

fn solver_optimality() -> Verdict {
    let mut rng = seeded(0xC4);
    let (mut feasible, mut certificates) = (0, 0);
    for i in 0..100 {
        let inst = random_ip_instance(&mut rng, 4, 4);
        let r = solve_ip(&inst).map_err(|e| format!("instance {i}: {e}"))?;
        let best = match brute_ip_opt(&inst) {
            Ok(b) => b,
            Err(Error::Infeasible(_)) if r.status == SolveStatus::Infeasible => continue,
            Err(e) => return Err(format!("instance {i}: oracle {e}, solver {:?}", r.status)),
        };
        feasible += 1;
        if r.objective.as_ref() != Some(&best.value) {
            return Err(format!(
                "instance {i}: solver {:?}, oracle {}",
                r.objective, best.value
            ));
        }
        let g = graver_basis(inst.matrix()).map_err(|e| e.to_string())?;
        for x in feasible_points(&inst).map_err(|e| e.to_string())? {
            let optimal = check_optimal(&x, &g, &inst).map_err(|e| e.to_string())?.0;
            let value = inst.value(&x).map_err(|e| e.to_string())?;
            if optimal != (value == best.value) {
                return Err(format!("instance {i}: certificate says {optimal} at {x}"));
            }
            certificates += 1;
        }
    }
    Ok(format!(
        "100 instances ({feasible} feasible) exact; certificate agreed on {certificates} points"
    ))
}

fn embedding() -> Verdict {
    let spec = NfoldSpec::new(
        IntMatrix::from_i64_rows(&[&[1, 1]]),
        IntMatrix::from_i64_rows(&[&[1, 0]]),
        2,
    )
    .map_err(|e| e.to_string())?;
    let c = build_c_matrix(&spec);
    let g = graver_basis(&build_nash_matrix(&spec)).map_err(|e| e.to_string())?;
    let mut violations = 0;
    for e in g.elements() {
        let padded = pad_to_c(e, &spec).map_err(|e| e.to_string())?;
        let in_kernel = c.mul_vec(&padded).map_err(|e| e.to_string())?.is_zero();
        if !in_kernel || !is_graver_element(&c, &padded).map_err(|e| e.to_string())? {
            violations += 1;
        }
    }
    if violations == 0 {
        Ok(format!("{} padded elements, 0 violations", g.len()))
    } else {
        Err(format!(
            "{violations} of {} padded elements violate",
            g.len()
        ))
    }
}

fn growth() -> Verdict {
    let spec = NfoldSpec::new(
        IntMatrix::from_i64_rows(&[&[1, 1]]),
        IntMatrix::from_i64_rows(&[&[1, 0]]),
        1,
    )
    .map_err(|e| e.to_string())?;
    let table = graver_growth(&spec, 4, None).map_err(|e| e.to_string())?;
    println!("    N | |graver_basis(build_nash_matrix)|");
    for (n, size) in &table {
        println!("    {n} | {size}");
    }
    let sizes: Vec<usize> = table.iter().map(|(_, s)| *s).collect();
    if table.len() == 4 && sizes.windows(2).all(|w| w[0] <= w[1]) {
        Ok(format!("sizes {sizes:?}, nondecreasing"))
    } else {
        Err(format!("sizes {sizes:?}"))
    }
}

fn inverse_soundness() -> Verdict {
    let mut rng = seeded(0xC7);
    let (mut planted, mut drawn) = (0, 0);
    while planted < 50 {
        drawn += 1;
        if drawn > 10_000 {
            return Err("could not draw 50 planted instances".into());
        }
        let Some((inst, weights)) = planted_iiop(&mut rng, 4, 3).map_err(|e| e.to_string())? else {
            continue;
        };
        // planted optimality confirmed by enumeration before solving
        let program = inst.weighted_program(&weights).map_err(|e| e.to_string())?;
        let best = brute_ip_opt(&program).map_err(|e| e.to_string())?;
        if program.value(inst.xstar()).map_err(|e| e.to_string())? != best.value {
            return Err(format!("instance {drawn}: planted point is not optimal"));
        }
        planted += 1;
        let g = graver_basis(inst.matrix()).map_err(|e| e.to_string())?;
        let ans = solve_iiop(&inst, &g).map_err(|e| e.to_string())?;
        if !ans.is_yes() || !verify_answer(&inst, &g, &ans).map_err(|e| e.to_string())? {
            return Err(format!("planted instance {drawn}: answer {ans}"));
        }
    }
    let mut refuted = 0;
    for n in 2..=4 {
        for k in 1..=3 {
            let mut weights = vec![1; n];
            weights[0] = k;
            weights[n - 1] = 4 - k;
            let inst = refutable_iiop(&weights).map_err(|e| e.to_string())?;
            let g = graver_basis(inst.matrix()).map_err(|e| e.to_string())?;
            let ans = solve_iiop(&inst, &g).map_err(|e| e.to_string())?;
            if ans.is_yes() || !verify_answer(&inst, &g, &ans).map_err(|e| e.to_string())? {
                return Err(format!("no-instance n={n} k={k}: answer {ans}"));
            }
            refuted += 1;
        }
    }
    Ok(format!("50/50 planted yes verified; {refuted}/{refuted} no-instances refuted with valid certificates"))
}

const D_JSON: &str = r#"{"D": [[1, 1, 1]]}"#;
const SPEC_JSON: &str = r#"{"A": [[1, 1]], "B": [[1, 0]], "N": 2}"#;
const IP_JSON: &str = r#"{"D": [[1, 1, 1]], "d": [3], "u": [3, 3, 3],
  "objective": [{"kind": "quadratic", "a": "1", "b": "0", "c": "0"},
                {"kind": "affine", "a": "2", "b": "0"},
                {"kind": "power", "a": "1/2", "k": 3}]}"#;
const GAME_JSON: &str = r#"{"players": [
    {"A": [[1, 1]], "b": [1], "u": [1, 1], "B": [[1, 0]]},
    {"A": [[1, 1]], "b": [1], "u": [1, 1], "B": [[1, 0]]}],
  "b0": [1],
  "costs": [{"kind": "quadratic", "a": "1", "b": "0", "c": "0"},
            {"kind": "quadratic", "a": "1", "b": "0", "c": "0"}]}"#;
const PROFILE_JSON: &str = r#"{"strategies": [[1, 0], [0, 1]]}"#;
const IIOP_YES_JSON: &str = r#"{"D": [[1, 1]], "d": [2], "u": [2, 2], "xstar": [2, 0],
  "shapes": [{"kind": "quadratic", "a": "1", "b": "0", "c": "0"},
             {"kind": "quadratic", "a": "1", "b": "0", "c": "0"}]}"#;
const IIOP_NO_JSON: &str = r#"{"D": [[1, 1]], "d": [2], "u": [2, 2], "xstar": [1, 1],
  "shapes": [{"kind": "quadratic", "a": "1", "b": "-4", "c": "4"},
             {"kind": "quadratic", "a": "1", "b": "0", "c": "0"}]}"#;
const ANSWER_JSON: &str =
    r#"{"verdict": "no", "shifts": [[1, -1], [-1, 1]], "certificate": [["1", "(1,-1)"]]}"#;

fn run_payload(dir: &Path, tag: &str, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = dir.join(format!("{tag}.json"));
    let status = Command::new(env!("CARGO_BIN_EXE_nashfold"))
        .args(args)
        .arg("--output")
        .arg(&out)
        .arg("--quiet")
        .current_dir(dir)
        .stderr(Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if status.code().is_none_or(|c| c > 1) {
        return Err(format!("{args:?} exited with {status}"));
    }
    fs::read(&out).map_err(|e| e.to_string())
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let files = [
        ("d.json", D_JSON),
        ("spec.json", SPEC_JSON),
        ("ip.json", IP_JSON),
        ("game.json", GAME_JSON),
        ("profile.json", PROFILE_JSON),
        ("yes.json", IIOP_YES_JSON),
        ("no.json", IIOP_NO_JSON),
        ("answer.json", ANSWER_JSON),
    ];
    for (name, text) in files {
        fs::write(dir.path().join(name), text).map_err(|e| e.to_string())?;
    }
    let runs: [&[&str]; 11] = [
        &["graver", "--input", "d.json"],
        &[
            "nfold",
            "--input",
            "spec.json",
            "--kind",
            "nash",
            "--growth",
            "3",
        ],
        &["solve", "--input", "ip.json"],
        &["equilibrium", "--input", "game.json"],
        &[
            "verify-equilibrium",
            "--input",
            "game.json",
            "--input",
            "profile.json",
        ],
        &[
            "best-response",
            "--input",
            "game.json",
            "--input",
            "profile.json",
            "--player",
            "1",
        ],
        &["inverse", "--input", "yes.json"],
        &["inverse", "--input", "no.json"],
        &[
            "verify-inverse",
            "--input",
            "no.json",
            "--input",
            "answer.json",
        ],
        &["oracle", "--kind", "game", "--seed", "5"],
        &["oracle", "--kind", "iiop", "--seed", "5"],
    ];
    let mut subcommands = std::collections::BTreeSet::new();
    for (i, args) in runs.iter().enumerate() {
        let first = run_payload(dir.path(), &format!("{i}a"), args)?;
        let second = run_payload(dir.path(), &format!("{i}b"), args)?;
        if first != second {
            return Err(format!("{args:?} produced different payloads"));
        }
        if first.is_empty() || first.starts_with(b"null") {
            return Err(format!("{args:?} produced no payload"));
        }
        subcommands.insert(args[0]);
    }
    Ok(format!(
        "{} runs over {} subcommands byte-identical",
        runs.len(),
        subcommands.len()
    ))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        ("graver correctness vs brute force", graver_correctness),
        ("known basis of [1 1 1]", known_basis),
        ("potential minima are equilibria", equilibrium_existence),
        ("solver optimality and certificate", solver_optimality),
        ("padded embedding into the lifted matrix", embedding),
        ("Graver growth report", growth),
        ("inverse soundness and round trip", inverse_soundness),
        ("CLI determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let elapsed = start.elapsed();
        match verdict {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} FAIL  {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
