use std::path::PathBuf;
use std::process::Command;

use rtorsion_cli::run_with;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("rtorsion").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    let v = serde_json::from_slice(&out).unwrap_or(Value::Null);
    (code, v, String::from_utf8(err).unwrap())
}

fn close(v: &Value, re: f64, im: f64, tol: f64) -> bool {
    (v[0].as_f64().unwrap() - re).abs() <= tol && (v[1].as_f64().unwrap() - im).abs() <= tol
}

#[test]
fn circle_quarter() {
    let (code, v, err) = run(&["circle", "--a", "0.25"]);
    assert_eq!(code, 0, "{err}");
    assert!(close(&v["rho_an"], 1.0, -1.0, 1e-10));
    assert!((v["rs_norm_value"].as_f64().unwrap() - 1.0).abs() <= 1e-10);
    assert_eq!(v["consistent"], Value::Bool(true));
}

#[test]
fn circle_complex_parameter() {
    let (code, v, _) = run(&["circle", "--a", "0.4,-0.25", "--scale", "3"]);
    assert_eq!(code, 0);
    let target = v["rs_norm_target"].as_f64().unwrap();
    assert!((v["rs_norm_value"].as_f64().unwrap() - target).abs() <= 1e-8 * target);
}

#[test]
fn circle_rejects_integer_holonomy() {
    assert_eq!(run(&["circle", "--a", "1"]).0, 2);
    assert_eq!(run(&["circle", "--a", "x"]).0, 2);
}

#[test]
fn torsion_of_running_example() {
    let (code, v, _) = run(&["torsion", &fixture("elementary.json")]);
    assert_eq!(code, 0);
    assert!(close(&v["torsion"], 2.0, 0.0, 1e-12));
    assert!(close(&v["graded_det"], 2.0, 0.0, 1e-12));
    assert_eq!(v["betti"], serde_json::json!([0, 0]));
}

#[test]
fn malformed_documents_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    for text in [
        "{\"d\": 1",
        "{\"d\": 2, \"dims\": [1,1,1], \"differential\": [], \"chirality\": []}",
        "{\"d\": 1, \"dims\": [1,1], \"differential\": [[[[2,0]]]]}",
        "{\"d\": 1, \"dims\": [1,1], \"differential\": [[[[2,0]]]], \"chirality\": [[[[2,0]]], [[[1,0]]]]}",
    ] {
        std::fs::write(&bad, text).unwrap();
        assert_eq!(run(&["torsion", bad.to_str().unwrap()]).0, 2, "{text}");
    }
    assert_eq!(run(&["torsion", "/nonexistent/file.json"]).0, 2);
}

#[test]
fn split_on_boundary_exits_3() {
    let (code, v, _) = run(&["split", &fixture("elementary.json"), "--lambda", "4"]);
    assert_eq!(code, 3);
    assert!(v["error"].is_string());
}

#[test]
fn split_is_consistent_off_boundary() {
    for lam in ["0", "1", "5"] {
        let (code, v, _) = run(&["split", &fixture("elementary.json"), "--lambda", lam]);
        assert_eq!(code, 0);
        assert_eq!(v["consistent"], Value::Bool(true));
        assert!(close(&v["torsion_via_split"], 2.0, 0.0, 1e-12));
    }
}

#[test]
fn selftest_small_run() {
    let (code, v, _) = run(&["selftest", "--cases", "5", "--seed", "9"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for anchor in ["Lemma 4.2", "Prop 5.10", "Theorem 6.9", "Lemma 2.7"] {
        assert!(names.contains(&anchor), "{anchor}");
    }
}

#[test]
fn binary_writes_json_to_stdout() {
    let out = Command::new(env!("CARGO_BIN_EXE_rtorsion"))
        .args(["circle", "--a", "0.25"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(close(&v["rho_an"], 1.0, -1.0, 1e-10));
    assert!(!out.stderr.is_empty());
    let bad = Command::new(env!("CARGO_BIN_EXE_rtorsion"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
