use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn normeq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normeq"))
        .args(args)
        .output()
        .expect("failed to launch normeq")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Drops the wall-time column, which is outside the determinism contract.
fn without_wall_time(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut fields: Vec<&str> = l.split(',').collect();
            fields.remove(7);
            fields.join(",")
        })
        .collect()
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = normeq(&[
            "gen",
            "toeplitz",
            "--n",
            "30",
            "--m",
            "40",
            "--seed",
            "7",
            "--out",
            path_str(p),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["kind"], "toeplitz");
    assert_eq!(v["b"].as_array().unwrap().len(), 40);
    assert_eq!(v["strict"], true);
}

#[test]
fn experiment_csv_is_deterministic() {
    let run = || {
        let out = normeq(&["experiment", "solver_compare", "--n", "40", "--seed", "3"]);
        assert!(out.status.success(), "{}", stderr(&out));
        stdout(&out)
    };
    let (a, b) = (run(), run());
    assert_eq!(without_wall_time(&a), without_wall_time(&b));
    let header = a.lines().next().unwrap();
    assert_eq!(
        header,
        "experiment,solver,tau,n,k,residual,mu,wall_ms,status"
    );
}

#[test]
fn csv_rows_match_iteration_counts() {
    let out = normeq(&[
        "experiment",
        "solver_compare",
        "--n",
        "40",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let records: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 4);
    let csv = stdout(&normeq(&["experiment", "solver_compare", "--n", "40"]));
    for r in records {
        let solver = r["solver"].as_str().unwrap();
        let rows = csv
            .lines()
            .filter(|l| l.split(',').nth(1) == Some(solver))
            .count();
        assert_eq!(rows as u64, r["iterations"].as_u64().unwrap());
        assert_eq!(
            r["rows"].as_array().unwrap().len() as u64,
            r["iterations"].as_u64().unwrap()
        );
        assert_eq!(r["status"], "converged");
    }
}

#[test]
fn zero_rhs_converges_immediately() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("zero.json");
    std::fs::write(
        &file,
        r#"{"kind": "dense", "matrix": [[0.1, 0.2], [0.05, 0.1]], "b": [0.0, 0.0]}"#,
    )
    .unwrap();
    let out = normeq(&[
        "experiment",
        "custom",
        "--problem",
        path_str(&file),
        "--solver",
        "fp,rfpi,newton,sda",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let records: Value = serde_json::from_str(&stdout(&out)).unwrap();
    for r in records.as_array().unwrap() {
        assert!(r["iterations"].as_u64().unwrap() <= 1, "{r}");
        assert_eq!(r["mu"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    let out = normeq(&["gen", "dense", "--n", "20", "--out", path_str(&file)]);
    assert!(out.status.success());

    let ok = normeq(&["solve", path_str(&file), "--solver", "newton,sda"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));

    let capped = normeq(&[
        "solve",
        path_str(&file),
        "--solver",
        "fp",
        "--max-iter",
        "2",
    ]);
    assert_eq!(capped.status.code(), Some(1));
    assert!(stdout(&capped).contains("max_iterations"));

    let missing = normeq(&["solve", path_str(&dir.path().join("absent.json"))]);
    assert_eq!(missing.status.code(), Some(2));

    let bad_solver = normeq(&["solve", path_str(&file), "--solver", "gauss"]);
    assert!(!bad_solver.status.success());
}

#[test]
fn strict_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("loose.json");
    // beta = 0.5 and ||b||_1 = 0.3 > beta^2, yet mu = (1.5 - sqrt(1.05)) / 2 solves it.
    std::fs::write(
        &file,
        r#"{"kind": "dense", "matrix": [[0, 0.5], [0, 0]], "b": [0.3, 0], "strict": false}"#,
    )
    .unwrap();
    assert_eq!(normeq(&["solve", path_str(&file)]).status.code(), Some(0));
    let strict = normeq(&["solve", path_str(&file), "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(stderr(&strict).contains("norm_condition_square"));
}

#[test]
fn tau_sweep_reports_every_admissible_tau() {
    let out = normeq(&[
        "experiment",
        "rfpi_tau_sweep",
        "--n",
        "40",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let records: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let taus: Vec<f64> = records
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["tau"].as_f64().unwrap())
        .collect();
    assert!(taus.len() >= 5);
    for t in [0.1, 0.5, 0.9, 1.0] {
        assert!(taus.contains(&t), "{taus:?}");
    }
}

#[test]
fn laplacian_demo_prints_root() {
    let out = normeq(&["laplacian"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(
        err.contains("y = [0.4472 0.1097 0.1667 0.1097 0.1667]"),
        "{err}"
    );

    let graph = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/undirected4.txt");
    let out = normeq(&["laplacian", "--graph", path_str(&graph), "--v", "1,0,0,0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("y = [0.5000 0.1667 0.1667 0.1667]"));

    let out = normeq(&["laplacian", "--v", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn perturbation_check_passes() {
    let out = normeq(&[
        "experiment",
        "perturbation_check",
        "--family",
        "dense",
        "--n",
        "30",
        "--trials",
        "4",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("0 above"));
}
