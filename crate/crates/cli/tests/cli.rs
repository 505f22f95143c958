use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nashfold_core::game::GameInstance;
use nashfold_core::inverse::{IiopAnswer, IiopInstance};
use nashfold_core::solver::{IpInstance, SolveResult};
use serde_json::Value;

fn nashfold(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nashfold"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn setup(files: &[(&str, &str)]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

const SQUARE: &str = r#"{"kind": "quadratic", "a": "1", "b": "0", "c": "0"}"#;

fn two_by_two_game() -> String {
    format!(
        r#"{{"players": [{{"A": [[1,1]], "b": [1], "u": [1,1], "B": []}},
                        {{"A": [[1,1]], "b": [1], "u": [1,1], "B": []}}],
            "b0": [], "costs": [{SQUARE}, {SQUARE}]}}"#
    )
}

#[test]
fn graver_of_two_ones() {
    let dir = setup(&[("d.json", r#"{"D": [[1, 1]]}"#)]);
    let out = nashfold(dir.path(), &["graver", "--input", "d.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "graver");
    assert_eq!(r["status"], "ok");
    assert_eq!(
        r["result"]["elements"],
        serde_json::json!([[1, -1], [-1, 1]])
    );
    assert_eq!(r["counters"]["graver_size"], 2);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn bare_matrix_input_is_accepted() {
    let dir = setup(&[("d.json", "[[1, 2]]")]);
    let r = report(&nashfold(dir.path(), &["graver", "--input", "d.json"]));
    assert_eq!(
        r["result"]["elements"],
        serde_json::json!([[2, -1], [-2, 1]])
    );
}

#[test]
fn equilibrium_of_the_two_by_two_game() {
    let dir = setup(&[("game.json", &two_by_two_game())]);
    let out = nashfold(dir.path(), &["equilibrium", "--input", "game.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["usage"], serde_json::json!([1, 1]));
    assert_eq!(r["result"]["provider_cost"], "2");
}

#[test]
fn verification_and_best_response() {
    let dir = setup(&[
        ("game.json", &two_by_two_game()),
        ("crowded.json", r#"{"strategies": [[1, 0], [1, 0]]}"#),
        ("split.json", r#"{"strategies": [[1, 0], [0, 1]]}"#),
    ]);
    let ok = nashfold(
        dir.path(),
        &[
            "verify-equilibrium",
            "--input",
            "game.json",
            "--input",
            "split.json",
        ],
    );
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(report(&ok)["result"]["equilibrium"], true);

    let bad = nashfold(
        dir.path(),
        &[
            "verify-equilibrium",
            "--input",
            "game.json",
            "--input",
            "crowded.json",
        ],
    );
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(
        report(&bad)["result"]["satisfied"],
        serde_json::json!([false, false])
    );
    assert_eq!(String::from_utf8_lossy(&bad.stderr).lines().count(), 1);

    let br = nashfold(
        dir.path(),
        &[
            "best-response",
            "--input",
            "game.json",
            "--input",
            "crowded.json",
            "--player",
            "1",
        ],
    );
    assert_eq!(report(&br)["result"]["strategy"], serde_json::json!([0, 1]));
    let oob = nashfold(
        dir.path(),
        &[
            "best-response",
            "--input",
            "game.json",
            "--input",
            "crowded.json",
            "--player",
            "2",
        ],
    );
    assert_eq!(oob.status.code(), Some(2));
}

#[test]
fn inverse_no_instance() {
    let iiop = format!(
        r#"{{"D": [[1,1]], "d": [2], "u": [2,2], "xstar": [1,1],
            "shapes": [{{"kind": "quadratic", "a": "1", "b": "-4", "c": "4"}}, {SQUARE}]}}"#
    );
    let dir = setup(&[("iiop.json", &iiop)]);
    let out = nashfold(
        dir.path(),
        &["inverse", "--input", "iiop.json", "--output", "ans.json"],
    );
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "no");
    assert_eq!(r["result"]["verdict"], "no");
    assert_eq!(
        r["result"]["certificate"],
        serde_json::json!([["1", "(1,-1)"]])
    );

    let check = nashfold(
        dir.path(),
        &[
            "verify-inverse",
            "--input",
            "iiop.json",
            "--input",
            "ans.json",
        ],
    );
    assert_eq!(check.status.code(), Some(0));
    assert_eq!(report(&check)["result"]["valid"], true);
}

#[test]
fn inverse_yes_instance() {
    let iiop = format!(
        r#"{{"D": [[1,1]], "d": [2], "u": [2,2], "xstar": [2,0], "shapes": [{SQUARE}, {SQUARE}]}}"#
    );
    let dir = setup(&[("iiop.json", &iiop)]);
    let out = nashfold(dir.path(), &["inverse", "--input", "iiop.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        report(&out)["result"]["lambda"],
        serde_json::json!(["0", "1"])
    );
}

#[test]
fn exit_codes() {
    let ip =
        format!(r#"{{"D": [[1,1]], "d": [5], "u": [2,2], "objective": [{SQUARE}, {SQUARE}]}}"#);
    let dir = setup(&[
        ("ip.json", &ip),
        ("bad.json", "{not json"),
        ("d.json", r#"{"D": [[1, 1, 1, 1, 1]]}"#),
    ]);
    let infeasible = nashfold(dir.path(), &["solve", "--input", "ip.json"]);
    assert_eq!(infeasible.status.code(), Some(1));
    assert_eq!(report(&infeasible)["result"]["status"], "infeasible");

    let malformed = nashfold(dir.path(), &["solve", "--input", "bad.json"]);
    assert_eq!(malformed.status.code(), Some(2));
    assert_eq!(report(&malformed)["status"], "input_error");

    let missing = nashfold(dir.path(), &["solve"]);
    assert_eq!(missing.status.code(), Some(2));

    let capped = nashfold(dir.path(), &["graver", "--input", "d.json", "--cap", "3"]);
    assert_eq!(capped.status.code(), Some(3));
    assert_eq!(report(&capped)["status"], "resource_cap");

    let usage = nashfold(dir.path(), &["no-such-command"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn quiet_keeps_stdout_empty_and_output_file_written() {
    let dir = setup(&[("d.json", r#"{"D": [[1, 1]]}"#)]);
    let out = nashfold(
        dir.path(),
        &[
            "graver", "--input", "d.json", "--quiet", "--output", "p.json",
        ],
    );
    assert!(out.stdout.is_empty());
    let payload: Value =
        serde_json::from_slice(&fs::read(dir.path().join("p.json")).unwrap()).unwrap();
    assert_eq!(payload["size"], 2);
}

#[test]
fn payloads_round_trip() {
    let ip = format!(
        r#"{{"D": [[1,1,1]], "d": [3], "u": [3,3,3], "objective": [{SQUARE}, {SQUARE}, {SQUARE}]}}"#
    );
    let dir = setup(&[("ip.json", &ip)]);
    nashfold(
        dir.path(),
        &[
            "solve", "--input", "ip.json", "--output", "r.json", "--quiet",
        ],
    );
    let text = fs::read_to_string(dir.path().join("r.json")).unwrap();
    let parsed: SolveResult = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed.objective.as_ref().unwrap().to_string(), "3");
    assert_eq!(
        serde_json::from_str::<SolveResult>(&serde_json::to_string(&parsed).unwrap()).unwrap(),
        parsed
    );

    let inst: IpInstance = serde_json::from_str(&ip).unwrap();
    assert_eq!(
        serde_json::from_str::<IpInstance>(&serde_json::to_string(&inst).unwrap()).unwrap(),
        inst
    );
    let game: GameInstance = serde_json::from_str(&two_by_two_game()).unwrap();
    assert_eq!(
        serde_json::from_str::<GameInstance>(&serde_json::to_string(&game).unwrap()).unwrap(),
        game
    );
}

#[test]
fn inverse_payload_round_trips() {
    let iiop = format!(
        r#"{{"D": [[1,1]], "d": [2], "u": [2,2], "xstar": [1,1],
            "shapes": [{{"kind": "quadratic", "a": "1", "b": "-4", "c": "4"}}, {SQUARE}]}}"#
    );
    let dir = setup(&[("iiop.json", &iiop)]);
    nashfold(
        dir.path(),
        &[
            "inverse",
            "--input",
            "iiop.json",
            "--output",
            "a.json",
            "--quiet",
        ],
    );
    let ans: IiopAnswer =
        serde_json::from_slice(&fs::read(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(
        serde_json::from_str::<IiopAnswer>(&serde_json::to_string(&ans).unwrap()).unwrap(),
        ans
    );
    let inst: IiopInstance = serde_json::from_str(&iiop).unwrap();
    assert_eq!(
        serde_json::from_str::<IiopInstance>(&serde_json::to_string(&inst).unwrap()).unwrap(),
        inst
    );
}

#[test]
fn nfold_matrices_and_growth() {
    let dir = setup(&[("spec.json", r#"{"A": [[1, 1]], "B": [[1, 0]], "N": 2}"#)]);
    let c = report(&nashfold(
        dir.path(),
        &["nfold", "--input", "spec.json", "--kind", "c"],
    ));
    assert_eq!(
        (c["result"]["rows"].as_u64(), c["result"]["cols"].as_u64()),
        (Some(5), Some(10))
    );
    let nash = report(&nashfold(
        dir.path(),
        &[
            "nfold",
            "--input",
            "spec.json",
            "--kind",
            "nash",
            "--growth",
            "3",
        ],
    ));
    assert_eq!(nash["result"]["rows"], 5);
    let sizes: Vec<u64> = nash["result"]["growth"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["graver_size"].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, vec![2, 6, 12]);
}

#[test]
fn oracle_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = report(&nashfold(
        dir.path(),
        &["oracle", "--kind", "ip", "--seed", "11"],
    ));
    let b = report(&nashfold(
        dir.path(),
        &["oracle", "--kind", "ip", "--seed", "11"],
    ));
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["result"]["seed"], 11);
}
