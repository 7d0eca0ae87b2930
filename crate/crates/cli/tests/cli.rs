use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const SCENARIOS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios");

fn decide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decide")).args(args).output().unwrap()
}

fn scenario(name: &str) -> String {
    format!("{SCENARIOS}/{name}")
}

fn temp_scenario(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn printed_stages_rank_a1_first() {
    let out = decide(&[&scenario("financial_crisis_printed_stages.json"), "--report", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let order: Vec<&str> = r["ranking"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["alternative"].as_str().unwrap())
        .collect();
    assert_eq!(order, ["A1", "A3", "A4", "A2"]);
}

#[test]
fn text_report_has_a_ranking_line() {
    let out = decide(&[&scenario("financial_crisis_printed_stages.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Ranking: A1 > A3 > A4 > A2"));
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = [scenario("financial_crisis.json"), "--report".into(), "json".into()];
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(decide(&args).stdout, decide(&args).stdout);
}

#[test]
fn stage_flag_limits_the_report() {
    let out = decide(&[
        &scenario("financial_crisis.json"),
        "--stage",
        "markov",
        "--report",
        "json",
    ]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["stage"], "markov");
    assert!(r.get("comparable_values").is_none());
    assert!(r["transition_matrix"].is_array());
}

#[test]
fn flags_reach_the_pipeline() {
    let out = decide(&[
        &scenario("financial_crisis.json"),
        "--scheme",
        "reshape",
        "--paper-literal",
        "--report",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["scheme"], "reshape");
    assert!(r["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .any(|d| d["kind"] == "paper_literal"));
}

#[test]
fn dot_export_writes_one_edge_per_nonzero_transition() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.dot");
    let out = decide(&[
        &scenario("financial_crisis_printed_stages.json"),
        "--export-dot",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(path).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 10);
    assert!(dot.contains("\"IRR\" -> \"ALR\" [label=\"0.4854\"];"));
}

#[test]
fn exit_codes() {
    assert_eq!(decide(&["/nonexistent/scenario.json"]).status.code(), Some(2));
    let bad = temp_scenario("{ not json");
    assert_eq!(decide(&[bad.path().to_str().unwrap()]).status.code(), Some(2));
    let invalid = temp_scenario(
        r#"{"format": 2, "scale": {"tau": 2, "zeta": 2}, "attributes": ["X"], "alternatives": ["a", "b"], "experts": [{"id": "e", "trust": 1}], "markov": {"periods": 1, "origin": "X"}}"#,
    );
    let out = decide(&[invalid.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("format"));
    // reshape without updates fails inside the pipeline
    let no_updates = temp_scenario(
        r#"{"format": 1, "scale": {"tau": 2, "zeta": 2}, "attributes": ["X", "Y"], "alternatives": ["a", "b"], "experts": [{"id": "e", "trust": 1}], "markov": {"periods": 1, "origin": "X"}, "overrides": {"transition_matrix": [[0.5, 0.5], [0.5, 0.5]], "priority_vectors": {"X": [0.5, 0.5], "Y": [0.5, 0.5]}}}"#,
    );
    let out = decide(&[no_updates.path().to_str().unwrap(), "--scheme", "reshape"]);
    assert_eq!(out.status.code(), Some(3));
}
