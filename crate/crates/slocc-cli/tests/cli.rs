//! End-to-end command-line behavior: payloads, exit codes, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use slocc_core::enumerate::family_form;
use slocc_core::exactmath::Matrix;
use slocc_core::state::{serialize_state, MatrixPair};
use slocc_core::verify::random_ilo;
use slocc_core::{enumerate_families, Seed};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slocc"))
}

fn fixtures() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("slocc-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_state(dir: &Path, name: &str, s: &MatrixPair) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serialize_state(s)).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn classify_payload_and_exit() {
    let dir = fixtures();
    let ghz = write_state(&dir, "ghz.json", &MatrixPair::ghz());
    let out = run(&["classify", ghz.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["genuine"], serde_json::json!(true));
    assert_eq!(doc["sig"], serde_json::json!([2, 1]));
    assert!(doc["encoding"].as_str().unwrap().starts_with("cf1|"));
}

#[test]
fn classify_rejects_truncated_input() {
    let dir = fixtures();
    let path = dir.join("truncated.json");
    std::fs::write(&path, b"{\"m\":2").unwrap();
    let out = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn classify_refuses_eigenvalues_outside_field() {
    // second slice is the companion matrix of t^2 - 2
    let dir = fixtures();
    let pair =
        MatrixPair::new(Matrix::identity(2), Matrix::from_ints(&[&[0, 2], &[1, 0]])).unwrap();
    let path = write_state(&dir, "sqrt2.json", &pair);
    let out = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn equiv_exit_codes() {
    let dir = fixtures();
    let ghz = write_state(&dir, "e-ghz.json", &MatrixPair::ghz());
    let w = write_state(&dir, "e-w.json", &MatrixPair::w());
    let moved = write_state(
        &dir,
        "e-ghz-moved.json",
        &random_ilo(2, 2, Seed(11)).apply(&MatrixPair::ghz()),
    );

    let out = run(&["equiv", ghz.to_str().unwrap(), w.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("INEQUIVALENT"));

    let out = run(&["equiv", ghz.to_str().unwrap(), moved.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("EQUIVALENT"));

    let bad = dir.join("nonsense.json");
    std::fs::write(&bad, b"[]").unwrap();
    let out = run(&["equiv", ghz.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn enumerate_counts_and_range() {
    let out = run(&["enumerate", "4", "6"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().last().unwrap(), "count: 6");

    let out = run(&["enumerate", "2", "5"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn enumerate_json_document() {
    let out = run(&["enumerate", "3", "3", "--json"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc[0]["m"], serde_json::json!(3));
    assert_eq!(doc[0]["count"], serde_json::json!(5));
    assert_eq!(doc[0]["families"].as_array().unwrap().len(), 5);
}

#[test]
fn random_round_trips_to_its_class_and_is_deterministic() {
    let dir = fixtures();
    let out1 = run(&["random", "2", "2", "--class", "1", "--seed", "7"]);
    assert_eq!(code(&out1), 0);
    let out2 = run(&["random", "2", "2", "--class", "1", "--seed", "7"]);
    assert_eq!(out1.stdout, out2.stdout);

    let path = dir.join("random.json");
    std::fs::write(&path, &out1.stdout).unwrap();
    let out = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let families = enumerate_families(2, 2, true).unwrap();
    let expected = family_form(&families[1]).unwrap();
    assert_eq!(doc["encoding"].as_str().unwrap(), expected.encoding);

    let out = run(&["random", "2", "2", "--class", "99"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn verify_zero_trials_is_empty_success() {
    let out = run(&["verify", "--trials", "0"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn stab_dim_prints_dimension() {
    let dir = fixtures();
    let ghz = write_state(&dir, "s-ghz.json", &MatrixPair::ghz());
    let w = write_state(&dir, "s-w.json", &MatrixPair::w());
    let out_g = run(&["stab-dim", ghz.to_str().unwrap()]);
    let out_w = run(&["stab-dim", w.to_str().unwrap()]);
    assert_eq!(code(&out_g), 0);
    let dg: usize = String::from_utf8(out_g.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let dw: usize = String::from_utf8(out_w.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert_ne!(dg, dw);
}
