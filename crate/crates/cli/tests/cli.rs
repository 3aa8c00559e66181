use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn birwalk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_birwalk"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn sample_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(birwalk(a.path(), &["sample", "--seed", "7"]).status.code(), Some(0));
    assert_eq!(birwalk(b.path(), &["sample", "--seed", "7"]).status.code(), Some(0));
    let (ja, jb) = (json(&a.path().join("generators.json")), json(&b.path().join("generators.json")));
    assert_eq!(ja, jb);
    assert_eq!(ja["generators"].as_array().unwrap().len(), 2);
    assert_eq!(ja["spec"]["seed"], 7);
}

#[test]
fn zero_height_sampling_is_a_degeneracy() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), r#"{"generators": {"kind": "sample", "r": 2, "height": 0, "seed": 1}, "sampling_retries": 3}"#);
    let out = birwalk(d.path(), &["sample", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exact_walk_writes_artifacts() {
    let d = TempDir::new().unwrap();
    let out = birwalk(d.path(), &["walk", "--mode", "exact", "--steps", "10", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let w = json(&d.path().join("walk.json"));
    let trials = w["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 2);
    for t in trials {
        assert!(t["report"]["abort"].is_null());
        assert!(t["degree_check"]["failures"].as_array().unwrap().is_empty());
    }
    for f in ["trial_0.csv", "trial_1.csv", "drift.csv", "cauchy.csv"] {
        assert!(d.path().join(f).exists(), "{f}");
    }
    let drift = fs::read_to_string(d.path().join("drift.csv")).unwrap();
    assert_eq!(drift.lines().count(), 3);
}

#[test]
fn float_walk_runs() {
    let d = TempDir::new().unwrap();
    let out = birwalk(d.path(), &["walk", "--mode", "float", "--steps", "100"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&d.path().join("walk.json"))["trials"][0]["degree_check"].is_null());
}

#[test]
fn zero_trials_is_empty() {
    let d = TempDir::new().unwrap();
    let out = birwalk(d.path(), &["walk", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&d.path().join("walk.json"))["trials"].as_array().unwrap().is_empty());
}

#[test]
fn crosscheck_passes_on_a_sampled_tuple() {
    let d = TempDir::new().unwrap();
    let out = birwalk(d.path(), &["crosscheck", "--max-len", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&d.path().join("crosscheck.json"))["report"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn repeated_standard_involution_fails_crosscheck() {
    let d = TempDir::new().unwrap();
    let id = "[[1,0,0],[0,1,0],[0,0,1]]";
    let cfg = write_config(
        d.path(),
        &format!(r#"{{"generators": {{"kind": "explicit", "generators": [{{"a": {id}, "b": {id}}}, {{"a": {id}, "b": {id}}}]}}}}"#),
    );
    let out = birwalk(d.path(), &["crosscheck", "--config", &cfg, "--max-len", "2"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn equidist_small_run() {
    let d = TempDir::new().unwrap();
    let out = birwalk(d.path(), &["equidist", "--max-len", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(d.path().join("equidist_trial_0.csv")).unwrap();
    assert!(csv.starts_with("len,degree,distance,distance_to_limit"));
    assert_eq!(csv.lines().count(), 5);
    let out = birwalk(d.path(), &["equidist", "--mode", "float"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compare_against_itself() {
    let d = TempDir::new().unwrap();
    assert_eq!(birwalk(d.path(), &["walk", "--steps", "12"]).status.code(), Some(0));
    let w = d.path().join("walk.json");
    let ws = w.to_string_lossy().into_owned();
    let out = birwalk(d.path(), &["compare", &ws, &ws]);
    assert_eq!(out.status.code(), Some(0));
    let c = json(&d.path().join("compare.json"));
    let len = json(&w)["trials"][0]["report"]["summary"]["final_reduced_len"].as_u64().unwrap();
    let pairing = c["pairs"][0]["comparison"]["pairing"].as_f64().unwrap();
    assert_eq!(pairing, 0.25f64.powi(len as i32));
}

#[test]
fn compare_rejects_different_tuples() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(birwalk(a.path(), &["walk", "--steps", "4"]).status.code(), Some(0));
    let cfg = write_config(b.path(), r#"{"generators": {"kind": "sample", "r": 2, "height": 5, "seed": 9}}"#);
    assert_eq!(birwalk(b.path(), &["walk", "--steps", "4", "--config", &cfg]).status.code(), Some(0));
    let (wa, wb) = (a.path().join("walk.json"), b.path().join("walk.json"));
    let out = birwalk(a.path(), &["compare", &wa.to_string_lossy(), &wb.to_string_lossy()]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_three() {
    let d = TempDir::new().unwrap();
    assert_eq!(birwalk(d.path(), &["walk", "--bogus"]).status.code(), Some(3));
    let cfg = write_config(d.path(), r#"{"nonsense": 1}"#);
    assert_eq!(birwalk(d.path(), &["walk", "--config", &cfg]).status.code(), Some(3));
    assert_eq!(birwalk(d.path(), &["walk", "--config", "/nonexistent.json"]).status.code(), Some(3));
}
