use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cubicfour"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

/// One default `enumerate` run shared by the theorem tests.
fn classification() -> &'static Value {
    static DOC: OnceLock<Value> = OnceLock::new();
    DOC.get_or_init(|| {
        let path = tmp("cli-classification.json");
        let o = run(&["enumerate", "-o", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
    })
}

fn theorem_on(doc: &Value, name: &str) -> Output {
    let path = tmp(name);
    std::fs::write(&path, serde_json::to_string(doc).unwrap()).unwrap();
    run(&["theorem", path.to_str().unwrap()])
}

fn factors(g: &Value) -> Vec<u64> {
    g["invariant_factors"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn group_reports_fermat_and_cycle() {
    let o = run(&["--json", "group", "x0^3, x1^3, x2^3, x3^3, x4^3, x5^3"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(factors(&v), vec![3, 3, 3, 3, 3]);
    assert_eq!(v["order"], 243);

    let o = run(&["--json", "group", "x0^2*x1, x1^2*x2, x2^2*x3, x3^2*x4, x4^2*x5, x5^2*x0"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(factors(&v), vec![21]);
}

#[test]
fn parse_errors_exit_with_two() {
    let o = run(&["group", "x6^3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(run(&["pauli", "E"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn closure_adds_the_missing_cubes() {
    let o = run(&["closure", "x0^3, x1^3, x2^3, x3^3, x4^2*x5, x5^2*x4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("x4^3") && text.contains("x5^3"), "{text}");
}

#[test]
fn smooth_flags_the_form_missing_a_variable() {
    let path = tmp("cli-missing-x5.txt");
    std::fs::write(&path, "# x5 never occurs\nx0^3+x1^3+x2^3+x3^3+x4^3\nx0^3+x1^3+x2^3+x3^3+x4^3+x5^3\n").unwrap();
    let o = run(&["--json", "smooth", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total_singular"], 1);
    let first = &v["forms"][0];
    assert_eq!(first["line"], 2);
    assert_eq!(first["witness"], serde_json::json!([0, 0, 0, 0, 0, 1]));
}

#[test]
fn smooth_on_an_empty_file_warns() {
    let path = tmp("cli-empty.txt");
    std::fs::write(&path, "# nothing here\n").unwrap();
    let o = run(&["smooth", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("TotalSing = 0"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn enumerate_is_deterministic_and_round_trips() {
    let a = run(&["--json", "--seed", "7", "enumerate", "--max-added", "0"]);
    let b = run(&["--json", "--seed", "7", "--sequential", "enumerate", "--max-added", "0"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let again = serde_json::to_vec_pretty(&v).unwrap();
    let w: Value = serde_json::from_slice(&again).unwrap();
    assert_eq!(v, w);
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn shallow_enumeration_is_contained_in_the_default_run() {
    let o = run(&["--json", "enumerate", "--max-added", "0"]);
    let shallow: Value = serde_json::from_slice(&o.stdout).unwrap();
    let keys = |doc: &Value| -> Vec<String> {
        doc["entries"].as_array().unwrap().iter().map(|e| e["key"].to_string()).collect()
    };
    let full = keys(classification());
    let part = keys(&shallow);
    assert!(!part.is_empty());
    for k in &part {
        assert!(full.contains(k), "{k}");
    }
    // the Fermat family needs no added monomials
    assert!(shallow["maximal_groups"].as_array().unwrap().iter().any(|g| factors(g) == vec![3, 3, 3, 3, 3]));
}

#[test]
fn theorem_passes_on_the_default_run() {
    let o = theorem_on(classification(), "cli-full.json");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
}

#[test]
fn theorem_names_a_missing_group() {
    let mut doc = classification().clone();
    let fermat = |g: &Value| factors(g) == vec![3, 3, 3, 3, 3];
    doc["entries"].as_array_mut().unwrap().retain(|e| !fermat(&e["group"]));
    doc["maximal_groups"].as_array_mut().unwrap().retain(|g| !fermat(g));
    let o = theorem_on(&doc, "cli-missing.json");
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("not realized") && text.contains("Z/3 ⊕ Z/3 ⊕ Z/3 ⊕ Z/3 ⊕ Z/3"), "{text}");
    assert!(text.trim_end().ends_with("FAIL"));
}

#[test]
fn theorem_names_a_group_that_does_not_embed() {
    let mut doc = classification().clone();
    doc["maximal_groups"]
        .as_array_mut()
        .unwrap()
        .push(serde_json::json!({ "invariant_factors": [64], "free_rank": 0 }));
    let o = theorem_on(&doc, "cli-extra.json");
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("not embedding") && text.contains("Z/64"), "{text}");
}

#[test]
fn theorem_rejects_garbage() {
    let path = tmp("cli-garbage.json");
    std::fs::write(&path, "{\"hello\": 1}").unwrap();
    assert_eq!(run(&["theorem", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn pauli_case_c_reports_z6_plus_z3() {
    let o = run(&["--json", "pauli", "C"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cases = v["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 2);
    for c in cases {
        assert_eq!(factors(&c["computed"]), vec![3, 6]);
        assert_eq!(c["passed"], true);
    }
}

#[test]
fn pauli_custom_generators() {
    let o = run(&["--json", "pauli", "--gens", "P6, W6"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(factors(&v["group"]), vec![6, 6]);
    assert_eq!(v["families"].as_array().unwrap().len(), 0);
}
