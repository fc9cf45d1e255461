use std::process::{Command, Output};

use serde_json::Value;

const U3: &str = r#"{"type":"blaschke","zeros":[{"re":0.4,"im":0.0},{"re":-0.3,"im":0.2},{"re":0.0,"im":0.1}]}"#;
const ATOM: &str = r#"{"type":"singular","atoms":[{"angle":0.0,"weight":1.0}]}"#;

fn ttokit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ttokit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn theorem_report_has_the_documented_fields() {
    let out = ttokit(&["theorem", "--u", U3, "--a", "0.4,0", "--degree-check"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["u", "a", "dim_S", "dim_T", "projector_distance", "sarason_max_residual", "grid_size", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["dim_S"], 5);
    assert_eq!(v["dim_T"], 5);
    assert!(v["projector_distance"].as_f64().unwrap() < 1e-7);
    assert_eq!(v["grid_size"], 2048);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["tolerances"]["rank"], 1e-8);
}

#[test]
fn negative_parameters_parse() {
    let out = ttokit(&["theorem", "--u", U3, "--a", "-0.3,0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let out = ttokit(&["crofoot", "--u", U3, "--a", "-0.5,-0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["unitarity"].as_f64().unwrap() < 1e-9);
    assert!(v["intertwining"].as_f64().unwrap() < 1e-8);
    assert!(v["transport"].as_f64().unwrap() < 1e-7);
}

#[test]
fn output_is_reproducible_for_a_seed() {
    let args = ["sarason", "--u", U3, "--random-trials", "20", "--seed", "7"];
    let a = ttokit(&args);
    let b = ttokit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["rows"].as_array().unwrap().len(), 40);
    assert!(v["gap"].as_f64().unwrap() >= 1e3);
    let c = ttokit(&["sarason", "--u", U3, "--random-trials", "20", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);

    let args = ["theorem", "--random-trials", "6", "--degree", "3", "--csv"];
    assert_eq!(ttokit(&args).stdout, ttokit(&args).stdout);
}

#[test]
fn random_theorem_trials_cover_every_zero() {
    let out = ttokit(&["theorem", "--random-trials", "5", "--degree", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["checks"], 20);
    assert_eq!(v["failures"], 0);
}

#[test]
fn divisors_enumerates_every_submultiset() {
    let out = ttokit(&["divisors", "--u", U3, "--all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["checked"], 7);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-9);

    let one = r#"{"type":"blaschke","zeros":[{"re":0.4,"im":0.0}]}"#;
    let out = ttokit(&["divisors", "--u", U3, "--v", one]);
    assert_eq!(json(&out)["checked"], 1);
    let not = r#"{"type":"blaschke","zeros":[{"re":0.5,"im":0.0}]}"#;
    assert_eq!(ttokit(&["divisors", "--u", U3, "--v", not]).status.code(), Some(2));
}

#[test]
fn basis_and_tto_checks_pass() {
    let out = ttokit(&["basis", "--u", U3]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dim"], 3);
    assert_eq!(v["ku0_dim"], 2);

    let chi2 = r#"{"type":"blaschke","zeros":[{"re":0,"im":0},{"re":0,"im":0}]}"#;
    let out = ttokit(&["tto", "--u", chi2]);
    assert_eq!(out.status.code(), Some(0));
    let m = &json(&out)["matrix"];
    // the compressed shift on K_{z^2} is [[0,0],[1,0]]
    assert!((m[1][0][0].as_f64().unwrap() - 1.0).abs() < 1e-13);
    assert!(m[0][1][0].as_f64().unwrap().abs() < 1e-13);
}

#[test]
fn lemma5_reports_all_blocks_and_traces() {
    let out = ttokit(&["lemma5", "--nu", ATOM, "--max-n", "60"]);
    let v = json(&out);
    for key in ["pointwise", "ratio", "uniform", "weak"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["uniform"]["passed"], true);
    let out = ttokit(&["lemma5", "--nu", ATOM, "--max-n", "60", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(data[0].starts_with("n,arc_mass,mass,"));
    assert_eq!(data.len(), 61);
    assert!(text.starts_with("# ttokit"));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = ttokit(&["theorem", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(out.stdout.is_empty());

    let bad = r#"{"type":"blaschke","zeros":[{"re":0.4,"im":"x"}]}"#;
    let out = ttokit(&["basis", "--u", bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zeros[0].im"));

    assert_eq!(ttokit(&["theorem", "--u", U3, "--a", "0.5,0"]).status.code(), Some(2));
    assert_eq!(ttokit(&["basis", "--u", U3, "--grid-size", "1000"]).status.code(), Some(2));
    assert_eq!(ttokit(&["lemma5", "--nu", ATOM, "--eta", "1.0"]).status.code(), Some(2));
    assert_eq!(ttokit(&["lemma5", "--nu", U3]).status.code(), Some(2));
    assert_eq!(ttokit(&["basis", "--u", U3, "--json", "--csv"]).status.code(), Some(2));
}

#[test]
fn failed_checks_exit_with_one() {
    // an identity tolerance below round-off cannot be met
    let out = ttokit(&["basis", "--u", U3, "--identity-tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn doubling_the_grid_keeps_decisions() {
    let a = json(&ttokit(&["theorem", "--u", U3, "--a", "0,0.1"]));
    let b = json(&ttokit(&["theorem", "--u", U3, "--a", "0,0.1", "--grid-size", "4096"]));
    assert_eq!(a["dim_S"], b["dim_S"]);
    assert_eq!(a["dim_T"], b["dim_T"]);
    let d = a["projector_distance"].as_f64().unwrap() - b["projector_distance"].as_f64().unwrap();
    assert!(d.abs() < 1e-9);
}
