use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hopf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopf"))
        .args(args)
        .arg("--output")
        .arg(dir)
        .env("HOPF_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_vertical_covers_every_row() {
    let dir = TempDir::new().unwrap();
    let out = hopf(dir.path(), &["spectrum", "vertical", "--degree", "6"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = fs::read_to_string(dir.path().join("spectrum-vertical.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kind,n,k,eigenvalue_closed_form,eigenvalue_numeric,mult_real_closed,mult_real_numeric,abs_error"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // one row per (n, k) with k = -n, -n+2, ..., n over n ≤ 6
    assert_eq!(rows.len(), (0..=6).map(|n| n + 1).sum::<usize>());
    for r in &rows {
        let err: f64 = r[7].parse().unwrap();
        assert!(err < 1e-8);
        assert_eq!(r[5], r[6]);
    }
}

#[test]
fn spectrum_hopf_map_single_negative_row() {
    let dir = TempDir::new().unwrap();
    let out = hopf(dir.path(), &["spectrum", "hopf-map", "--degree", "4", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report = read_json(&dir.path().join("spectrum-hopf-map.json"));
    let rows = report["rows"].as_array().unwrap();
    let negative: Vec<&Value> = rows.iter().filter(|r| r["eigenvalue_closed_form"].as_f64().unwrap() < 0.0).collect();
    assert_eq!(negative.len(), 1);
    assert_eq!(negative[0]["n"], 1);
    assert_eq!(negative[0]["k"], -1);
    assert_eq!(negative[0]["mult_real_numeric"], 4);
    assert!((negative[0]["eigenvalue_numeric"].as_f64().unwrap() + 1.0).abs() < 1e-8);
}

#[test]
fn spectrum_identity_lowest_rows() {
    let dir = TempDir::new().unwrap();
    let out = hopf(dir.path(), &["spectrum", "identity", "--degree", "5"]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("spectrum-identity.csv")).unwrap();
    let rows: Vec<Vec<String>> = text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    let lowest: Vec<(f64, usize)> = rows.iter().take(2).map(|r| (r[3].parse().unwrap(), r[6].parse().unwrap())).collect();
    assert_eq!(lowest, vec![(-1.0, 4), (0.0, 6)]);
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&hopf(dir.path(), &["spectrum", "sideways"])), 1);
    assert_eq!(code(&hopf(dir.path(), &["verify", "rigidity", "--set", "nonsense=1"])), 1);
    assert_eq!(code(&hopf(dir.path(), &["spectrum", "vertical", "--degree", "6", "--grid", "2,4,4"])), 1);
    assert_eq!(code(&hopf(dir.path(), &["spectrum", "vertical", "--degree", "40"])), 1);
    assert_eq!(code(&hopf(dir.path(), &["--config", "/nonexistent/hopf.conf", "flow", "hopf"])), 1);
    assert_eq!(code(&hopf(dir.path(), &["--help"])), 0);
}

#[test]
fn verification_failure_exits_two_with_replay_record() {
    let dir = TempDir::new().unwrap();
    let out = hopf(dir.path(), &["verify", "identities", "--degree", "4", "--set", "tol.identity_relative=1e-300"]);
    assert_eq!(code(&out), 2);
    let record = read_json(&dir.path().join("verify-identities-failure.json"));
    let failures = record["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    let first = &failures[0];
    assert_eq!(first["row"]["check"], "energy_identity");
    assert!(first["row"]["seed"].is_u64());
    assert_eq!(first["field"]["basis_degree"], 4);
    assert_eq!(first["field"]["provenance"]["seed"], first["row"]["seed"]);
}

#[test]
fn verify_suites_pass_at_small_degree() {
    let dir = TempDir::new().unwrap();
    for suite in ["identities", "inequalities", "hessians", "rigidity"] {
        let out = hopf(dir.path(), &["verify", suite, "--degree", "4", "--samples", "2000"]);
        assert_eq!(code(&out), 0, "{suite}: {}", stdout(&out));
        assert!(dir.path().join(format!("verify-{suite}.csv")).exists());
    }
}

#[test]
fn reports_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["verify", "inequalities", "--degree", "3", "--samples", "500", "--seed", "9"];
    assert_eq!(code(&hopf(a.path(), &args)), 0);
    assert_eq!(code(&hopf(b.path(), &args)), 0);
    let name = "verify-inequalities.csv";
    assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());

    let args = ["flow", "random", "--degree", "3", "--seed", "3", "--max-iters", "20"];
    hopf(a.path(), &args);
    hopf(b.path(), &args);
    for name in ["flow-random-trace.csv", "flow-random-summary.json", "flow-random-field.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# small run\ndegree = 3\nformat = json\nseed = 5\n").unwrap();
    let conf = conf.to_str().unwrap();
    let out = hopf(dir.path(), &["--config", conf, "verify", "rigidity", "--seed", "8"]);
    assert_eq!(code(&out), 0);
    let report = read_json(&dir.path().join("verify-rigidity.json"));
    assert_eq!(report["basis_degree"], 3);
    assert_eq!(report["seed"], 8);
    let out = hopf(dir.path(), &["--config", conf, "--set", "degree=2", "verify", "rigidity"]);
    assert_eq!(code(&out), 0);
    let report = read_json(&dir.path().join("verify-rigidity.json"));
    assert_eq!((report["basis_degree"].as_u64(), report["seed"].as_u64()), (Some(2), Some(5)));
}

#[test]
fn flow_from_hopf_converges_immediately() {
    let dir = TempDir::new().unwrap();
    let out = hopf(dir.path(), &["flow", "hopf", "--degree", "4"]);
    assert_eq!(code(&out), 0);
    let summary = read_json(&dir.path().join("flow-hopf-summary.json"));
    assert_eq!(summary["status"], "converged");
    assert_eq!(summary["iterations"], 0);
    assert!(summary["energy_gap"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(summary["classification"]["is_hopf"], true);
}

#[test]
fn flow_perturbed_reaches_minimum() {
    let dir = TempDir::new().unwrap();
    let out = hopf(dir.path(), &["flow", "perturbed", "--degree", "4", "--amplitude", "0.3", "--seed", "7"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let summary = read_json(&dir.path().join("flow-perturbed-summary.json"));
    assert!(summary["energy_gap"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(summary["monotone"], true);
    let trace = fs::read_to_string(dir.path().join("flow-perturbed-trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "iter,energy,residual,step,unit_violation");
}

#[test]
fn flow_non_convergence_exits_three_and_keeps_trace() {
    let dir = TempDir::new().unwrap();
    let out = hopf(dir.path(), &["flow", "random", "--degree", "3", "--seed", "11", "--max-iters", "5"]);
    assert_eq!(code(&out), 3);
    let trace = fs::read_to_string(dir.path().join("flow-random-trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 1 + 5);
    let summary = read_json(&dir.path().join("flow-random-summary.json"));
    assert_eq!(summary["status"], "max_iterations");
    assert_eq!(summary["exit_status"], 3);
}

#[test]
fn fresh_prints_its_seed() {
    let dir = TempDir::new().unwrap();
    let out = hopf(dir.path(), &["verify", "rigidity", "--degree", "2", "--fresh", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let printed: u64 = stdout(&out).lines().next().unwrap().strip_prefix("seed ").unwrap().parse().unwrap();
    let report = read_json(&dir.path().join("verify-rigidity.json"));
    assert_eq!(report["seed"].as_u64(), Some(printed));
}

#[test]
fn cache_round_trip() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("basis.json");
    let cache = cache.to_str().unwrap();
    let args = ["spectrum", "vertical", "--degree", "3", "--cache", cache];
    assert_eq!(code(&hopf(dir.path(), &args)), 0);
    let first = fs::read(dir.path().join("spectrum-vertical.csv")).unwrap();
    assert_eq!(code(&hopf(dir.path(), &args)), 0);
    assert_eq!(first, fs::read(dir.path().join("spectrum-vertical.csv")).unwrap());
    assert_eq!(read_json(Path::new(cache))["max_degree"], 3);
    let out = hopf(dir.path(), &["spectrum", "vertical", "--degree", "4", "--cache", cache]);
    assert_eq!(code(&out), 0);
    assert_eq!(read_json(Path::new(cache))["max_degree"], 4);
}
