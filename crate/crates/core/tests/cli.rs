//! End-to-end runs of the `qvp` binary: exit codes, files and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn qvp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvp")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixture_then_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let ex = dir.path().join("ex");
    assert_eq!(code(&qvp(&["--out", path(&ex), "fixture", "example1", "--n", "2"])), 0);
    assert!(ex.join("circuit.json").exists());
    let o = qvp(&["spectrum", path(&ex.join("circuit.json"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_object() || v.is_array());
}

#[test]
fn verify_passes_and_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let ex = dir.path().join("ex");
    assert_eq!(code(&qvp(&["--out", path(&ex), "fixture", "example1", "--n", "1"])), 0);
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for out in [&a, &b] {
        let o = qvp(&["verify", "block-structure", "--instance", path(&ex), "--seed", "7", "--out", path(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!ta.is_empty());
    assert_eq!(ta, tb);
    for line in String::from_utf8(ta).unwrap().lines() {
        let r: qvp::report::VerificationReport = serde_json::from_str(line).unwrap();
        assert!(r.pass);
        assert_eq!(r.runtime_ms, 0);
    }
}

#[test]
fn planted_fault_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let pf = dir.path().join("pf");
    assert_eq!(code(&qvp(&["--out", path(&pf), "fixture", "planted-fault", "--seed", "1"])), 0);
    let o = qvp(&["verify", "robustness", "--instance", path(&pf)]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"pass\":false"));
}

#[test]
fn robust_pair_passes_qco() {
    let dir = tempfile::tempdir().unwrap();
    let rp = dir.path().join("rp");
    assert_eq!(code(&qvp(&["--out", path(&rp), "fixture", "robust-pair", "--seed", "2"])), 0);
    let o = qvp(&["verify", "qco", "--instance", path(&rp)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn builtin_checks_need_no_instance() {
    for id in ["pg-identity", "pg-beta", "emap-synthesis"] {
        let o = qvp(&["verify", id]);
        assert_eq!(code(&o), 0, "{id}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(code(&qvp(&["verify", "no-such-check"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&qvp(&["spectrum", path(&bad)])), 2);
    let big = dir.path().join("big.json");
    std::fs::write(&big, r#"{"witness_qubits": 20, "ancilla_qubits": 20, "outcomes": 2, "gates": []}"#).unwrap();
    assert_eq!(code(&qvp(&["spectrum", path(&big)])), 2);
    assert_eq!(code(&qvp(&["spectrum", path(&dir.path().join("missing.json"))])), 2);
}

#[test]
fn iterate_and_construct() {
    let dir = tempfile::tempdir().unwrap();
    let ex = dir.path().join("ex");
    assert_eq!(code(&qvp(&["--out", path(&ex), "fixture", "example1", "--n", "1"])), 0);
    let plan = dir.path().join("plan.json");
    std::fs::write(&plan, r#"{"N": 2, "alphabet": ["0", "1"], "g": [[1, 0], [0.5, 0.5], [0, 1]]}"#).unwrap();
    let circuit = ex.join("circuit.json");
    let o = qvp(&["iterate", path(&circuit), "--plan", path(&plan)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let qt = dir.path().join("qt.json");
    let o = qvp(&["--out", path(&qt), "construct", "qt", path(&circuit)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // A constructed procedure is itself a valid procedure file.
    assert_eq!(code(&qvp(&["spectrum", path(&qt)])), 0);
}
