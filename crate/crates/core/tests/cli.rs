use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_martbel"));
    cmd.args(args).env_remove("MARTBEL_MAX_N");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is json");
    v["error"]["kind"].as_str().unwrap().to_owned()
}

#[test]
fn envelope_reports_split_and_values() {
    let v = json_ok(&["envelope", &data("four_state.json")]);
    assert_eq!(v["split"]["s"], 3);
    assert_eq!(v["split"]["boundary"], false);
    assert!(!v["extreme_points"].as_array().unwrap().is_empty());
}

#[test]
fn mobius_and_decompose() {
    let v = json_ok(&["mobius", &data("four_state.json")]);
    assert_eq!(v["mass"]["values"]["3,4"], "4/7");
    assert_eq!(v["mass"]["values"]["1,2"], "1/7");
    let d = json_ok(&["decompose", &data("four_state.json")]);
    assert_eq!(d["alpha"], "1/5");
    assert_eq!(d["mass_1"]["values"]["1,2"], "5/7");
}

#[test]
fn interval_of_a_payoff() {
    let v = json_ok(&["interval", &data("three_state.json"), "--payoff", "20,10,10"]);
    let iv = &v["intervals"][0];
    assert_eq!(iv["lower"], "10/1");
    assert_eq!(iv["upper"], "12/1");
}

#[test]
fn dutch_book_certificate_is_replayed() {
    let v = json_ok(&["dutchbook", &data("contracts_dutch_book.json")]);
    assert_eq!(v["verdict"], "dutch_book");
    assert_eq!(v["verification"]["replayed"], true);
    let out = run(&["dutchbook", &data("contracts_dutch_book.json"), "--expect-consistent"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "DutchBook");
}

#[test]
fn consistent_assessment_passes_noarb() {
    let v = json_ok(&["noarb", &data("contracts_consistent.json")]);
    assert_eq!(v["verdict"], "consistent");
    assert_eq!(v["strictly_positive"], true);
}

#[test]
fn approx_d1_and_d2() {
    let v = json_ok(&["approx", &data("four_state.json")]);
    assert_eq!(v["value"], "32/35");
    assert_eq!(v["unique"], true);
    assert_eq!(v["mass"]["values"]["1"], "1/5");
    let d2 = json_ok(&["approx", &data("high_rate.json"), "--distance", "d2"]);
    assert_eq!(d2["dominance_minimal"], true);
    assert_eq!(d2["exact_optimum"], true);
    let value: f64 = d2["value"].as_str().unwrap().parse().unwrap();
    assert!(value > 0.0);
}

#[test]
fn contaminate_keeps_the_inner_solution() {
    let v = json_ok(&["contaminate", &data("four_state.json"), "--eps", "1/2"]);
    assert_eq!(v["value"], "32/35");
    let out = run(&["contaminate", &data("four_state.json"), "--eps", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "EpsOutOfRange");
}

#[test]
fn table_format_with_common_denominator() {
    let out = run(&["--format", "table", "--denominator", "105", "approx", &data("four_state.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("96/105"));
    assert!(text.lines().any(|l| l.starts_with("234") && l.contains("24/105")));
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("martbel-cli-{}.json", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    let out = run(&["-o", &p, "envelope", &data("four_state.json")]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["split"]["s"], 3);
    std::fs::remove_file(path).ok();
}

#[test]
fn verify_paper_passes_every_check() {
    let v = json_ok(&["verify-paper"]);
    assert_eq!(v["passed"], v["total"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["result"] == "pass"));
}

#[test]
fn exit_codes() {
    let out = run(&["envelope", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "Io");

    let bad = std::env::temp_dir().join(format!("martbel-bad-{}.json", std::process::id()));
    std::fs::write(&bad, "{").unwrap();
    let out = run(&["envelope", &bad.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "Format");
    std::fs::remove_file(bad).ok();

    let out = run_env(&["envelope", &data("four_state.json")], &[("MARTBEL_MAX_N", "3")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "TooLarge");

    let out = run(&["envelope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_model_is_rejected() {
    let path = std::env::temp_dir().join(format!("martbel-invalid-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"m": ["4", "2", "3", "1/4"], "r": "0", "s0": "20"}"#).unwrap();
    let out = run(&["envelope", &path.to_string_lossy()]);
    std::fs::remove_file(path).ok();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "InvalidModel");
}
