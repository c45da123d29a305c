//! Runs the `ccsynth` binary on the shipped fixtures and checks exit codes,
//! output stability and DOT snapshots.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn ccsynth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccsynth"))
        .args(args)
        .env_remove("CCSYNTH_MAX_PRODUCT_STATES")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn check_closure_reports_closed_and_not_closed() {
    let out = ccsynth(&["check-closure", "--model", &fixture("rule.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "Closed\n");

    let out = ccsynth(&["check-closure", "--model", &fixture("a_next_b.json")]);
    assert_eq!(code(&out), 3);
    let text = stdout(&out);
    assert!(text.starts_with("NotClosed\n"), "{text}");
    assert!(text.contains("in language:") && text.contains("not in language:"));
}

#[test]
fn spec_flag_overrides_the_model_formula() {
    let out = ccsynth(&["check-closure", "--model", &fixture("a_next_b.json"), "--spec", "<> a"]);
    assert_eq!(code(&out), 0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.ltl");
    std::fs::write(&path, "a & X b\n").unwrap();
    let out = ccsynth(&["check-closure", "--model", &fixture("tiny.json"), "--spec", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn synth_output_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = ccsynth(&["synth", "--model", &fixture("rule.json"), "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("verification: passed"));
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());

    // stdout mode writes the same document
    let out = ccsynth(&["synth", "--model", &fixture("rule.json")]);
    assert_eq!(out.stdout, first);
}

#[test]
fn synth_exit_codes() {
    let out = ccsynth(&["synth", "--model", &fixture("tiny.json")]);
    assert_eq!(code(&out), 0);
    let out = ccsynth(&["synth", "--model", &fixture("a_next_b.json")]);
    assert_eq!(code(&out), 3);
    let out = ccsynth(&["synth", "--model", &fixture("unreachable.json")]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).starts_with("EmptyIntersection"));
    let out = ccsynth(&["synth", "--model", &fixture("rule.json"), "--max-product-states", "1000"]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1000"));
}

#[test]
fn size_guard_reads_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ccsynth"))
        .args(["synth", "--model", &fixture("rule.json")])
        .env("CCSYNTH_MAX_PRODUCT_STATES", "1000")
        .output()
        .unwrap();
    assert_eq!(code(&out), 5);
}

#[test]
fn input_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = ccsynth(&["check-closure", "--model", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let out = ccsynth(&["check-closure", "--model", "/nonexistent/model.json"]);
    assert_eq!(code(&out), 1);
    let out = ccsynth(&["check-closure", "--model", &fixture("tiny.json"), "--spec", "[]<> zz"]);
    assert_eq!(code(&out), 1);
    let out = ccsynth(&["check-closure", "--model", &fixture("tiny.json"), "--spec", "a U"]);
    assert_eq!(code(&out), 1);
    let out = ccsynth(&["export-dot", "--model", &fixture("tiny.json"), "--which", "nope"]);
    assert_eq!(code(&out), 2);
    let out = ccsynth(&["export-dot", "--model", &fixture("tiny.json"), "--which", "bi:9"]);
    assert_eq!(code(&out), 1);
    let out = ccsynth(&["synth"]);
    assert_eq!(code(&out), 2);
    let out = ccsynth(&["frobnicate"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_writes_traces_and_detects_deadlock() {
    let dir = tempfile::tempdir().unwrap();
    let out = ccsynth(&[
        "simulate",
        "--model",
        &fixture("rule.json"),
        "--strategies",
        &fixture("rule_printed_strategies.json"),
        "--seed",
        "7",
        "--runs",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).ends_with("runs: 5, deadlocks: 0, consistent: 5/5\n"), "{}", stdout(&out));
    for seed in 7..12 {
        let trace = std::fs::read_to_string(dir.path().join(format!("trace_{seed}.txt"))).unwrap();
        assert!(trace.lines().count() > 0);
    }

    let out = ccsynth(&[
        "simulate",
        "--model",
        &fixture("deadlock.json"),
        "--strategies",
        &fixture("deadlock_strategies.json"),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("DEADLOCK (1 waits for 2 on h)"), "{text}");
    assert!(text.ends_with("runs: 1, deadlocks: 1, consistent: 1/1\n"), "{text}");
}

#[test]
fn simulate_rejects_invalid_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(&path, r#"{"agents":[{"id":"1","prefix":["y"],"period":[]}]}"#).unwrap();
    let out = ccsynth(&["simulate", "--model", &fixture("tiny.json"), "--strategies", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

const BPHI_DOT: &str = "digraph automaton {
  rankdir=LR;
  node [shape=circle];
  q0 [shape=circle];
  q1 [shape=doublecircle];
  init0 [shape=point];
  init0 -> q0;
  q0 -> q0 [label=\"b\"];
  q0 -> q1 [label=\"a\"];
  q1 -> q0 [label=\"b\"];
  q1 -> q1 [label=\"a\"];
}
";

const EI_DOT: &str = "digraph automaton {
  rankdir=LR;
  node [shape=circle];
  q0 [shape=circle];
  q1 [shape=doublecircle];
  init0 [shape=point];
  init0 -> q0;
  q0 -> q1 [label=\"a\"];
  q1 -> q0 [label=\"b\"];
}
";

const PRODUCT_DOT: &str = "digraph product {
  rankdir=LR;
  node [shape=box];
  p0 [label=\"(0)\"];
  p1 [label=\"(1)\"];
  init0 [shape=point];
  init0 -> p0;
  p0 -> p1 [label=\"a\"];
  p1 -> p0 [label=\"b\"];
}
";

#[test]
fn dot_snapshots() {
    for (which, expected) in [("bphi", BPHI_DOT), ("ei:1", EI_DOT), ("product", PRODUCT_DOT)] {
        let out = ccsynth(&["export-dot", "--model", &fixture("tiny.json"), "--which", which]);
        assert_eq!(code(&out), 0);
        assert_eq!(stdout(&out), expected, "--which {which}");
    }
}

#[test]
fn dot_export_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.dot");
    let out = ccsynth(&[
        "export-dot",
        "--model",
        &fixture("rule.json"),
        "--which",
        "bi:3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("digraph automaton {"));
    assert!(text.trim_end().ends_with('}'));
}
