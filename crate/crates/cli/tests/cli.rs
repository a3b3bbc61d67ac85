use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn ccdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccdim")).args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = ccdim(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bounds_for_zero_one() {
    let v = json_of(&["bounds", "--loss", "0-1", "--n", "3"]);
    assert_eq!(v["upper_bound"], 2);
    assert_eq!(v["lower_bound"], 2);
    assert_eq!(v["lower_witness"]["p"], json!(["1/3", "1/3", "1/3"]));
}

#[test]
fn check_verdicts_exit_zero() {
    let v = json_of(&["check", "--loss", "abstain", "--n", "3", "--surrogate", "cs"]);
    assert_eq!(v["status"], "calibrated");
    let v = json_of(&["check", "--loss", "zero-one", "--n", "3", "--surrogate", "cs"]);
    assert_eq!(v["status"], "not-calibrated");
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn eps_surrogate_with_points_file() {
    let dir = tempfile::tempdir().unwrap();
    let pts = write(dir.path(), "pts.json", r#"[["5/4"], ["7/4"], ["9/4"], [2.75]]"#);
    let v = json_of(&["check", "--loss", "ord", "--n", "3", "--surrogate", "eps", "--eps", "1/4", "--points", &pts]);
    assert_eq!(v["status"], "calibrated");
    let v = json_of(&["normals", "--n", "3", "--surrogate", "eps", "--eps", "1/4", "--points", &pts]);
    let sets = v["normal_sets"].as_array().unwrap();
    assert_eq!(sets.len(), 4);
    assert_eq!(sets[3]["point_u"], json!(["11/4"]));
    assert_eq!(sets[0]["point_z"], json!(["0", "1/2", "3/2"]));
}

#[test]
fn surrogate_from_file() {
    let dir = tempfile::tempdir().unwrap();
    // Absolute loss on two classes, |u - 1| and |u - 2|.
    let s = json!({
        "n": 2, "d": 1,
        "components": [
            [{"w": ["1"], "c": "-1"}, {"w": ["-1"], "c": "1"}],
            [{"w": ["1"], "c": "-2"}, {"w": ["-1"], "c": "2"}]
        ],
        "domain": "free"
    });
    let path = write(dir.path(), "abs.json", &s.to_string());
    let pts = write(dir.path(), "pts.json", r#"[["1"], ["3/2"]]"#);
    let v = json_of(&["normals", "--surrogate", &path, "--points", &pts]);
    let sets = v["normal_sets"].as_array().unwrap();
    assert_eq!(sets[0]["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(sets[1]["vertices"], json!([["1/2", "1/2"]]));
    // Without u = 2 the normal sets miss the region p2 > 1/2.
    let v = json_of(&["check", "--loss", "0-1", "--n", "2", "--surrogate", &path, "--points", &pts]);
    assert_eq!(v["status"], "undetermined");
    let all = write(dir.path(), "all.json", r#"[["1"], ["3/2"], ["2"]]"#);
    let v = json_of(&["check", "--loss", "0-1", "--n", "2", "--surrogate", &path, "--points", &all]);
    assert_eq!(v["status"], "calibrated");
}

#[test]
fn exit_codes_for_errors() {
    let out = ccdim(&["triggers", "--loss", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ccdim(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ccdim(&["bounds", "--loss", "0-1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ccdim(&["lossgen", "--loss", "pd", "--r", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ccdim(&["normals", "--n", "3", "--surrogate", "eps", "--eps", "one"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ccdim(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_loss_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"n": 2, "k": 2, "entries": [["1", "x"], ["0", "1"]]}"#);
    assert_eq!(ccdim(&["bounds", "--loss", &bad]).status.code(), Some(1));
    let neg = write(dir.path(), "neg.json", r#"{"n": 2, "k": 1, "entries": [["-1"], ["0"]]}"#);
    assert_eq!(ccdim(&["bounds", "--loss", &neg]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic_and_round_trips() {
    let args = ["triggers", "--loss", "ordinal", "--n", "3"];
    let a = ccdim(&args).stdout;
    let b = ccdim(&args).stdout;
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(again.as_bytes(), &a[..]);
}

#[test]
fn lossgen_file_feeds_other_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ham.json");
    let gen = ccdim(&["lossgen", "--loss", "hamming", "--r", "2", "--out", out.to_str().unwrap()]);
    assert!(gen.status.success());
    let path = out.to_str().unwrap();
    let v = json_of(&["bounds", "--loss", path]);
    assert_eq!(v["affdim"], 2);
    assert_eq!(v["rank"], 3);
    let e = json_of(&["construct", "--loss", path]);
    assert_eq!(e["d"], 2);
    let v = json_of(&["check", "--loss", path, "--surrogate", "embed"]);
    assert_eq!(v["status"], "calibrated");
}

#[test]
fn csv_losses_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "l.csv", "0,1,0.5\n1,0,0.5\n");
    let v = json_of(&["triggers", "--loss", &path]);
    assert_eq!(v["trigger_sets"].as_array().unwrap().len(), 3);
    assert_eq!(v["columns"].as_array().unwrap().len(), 3);
}

#[test]
fn table_rendering_with_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let res = ccdim(&["bounds", "--loss", "hamming", "--r", "2", "--out", out.to_str().unwrap()]);
    let table = String::from_utf8(res.stdout).unwrap();
    assert!(table.lines().any(|l| l == "affdim=2"), "{table}");
    let saved: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved["affdim"], 2);

    let res = ccdim(&["check", "--loss", "0-1", "--n", "3", "--surrogate", "abs", "--out", out.to_str().unwrap(), "--decimal"]);
    let table = String::from_utf8(res.stdout).unwrap();
    assert!(table.starts_with("field=value"));
    assert!(table.contains("decimal (approximate)"));
    let saved: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved["status"], "not-calibrated");
    assert!(saved["approximate_decimal"].is_object());
}

#[test]
fn ranking_reports() {
    let v = json_of(&["ranking", "--loss", "pd", "--r", "3"]);
    assert_eq!(v["kind"], "pd");
    assert_eq!(v["centered_rank"], 3);
    assert!(v["report"]["lower_bound"].as_u64().unwrap() >= 1);
    let v = json_of(&["ranking", "--loss", "ndcg", "--r", "3", "--s", "2"]);
    assert_eq!(v["approximate"], true);
    assert_eq!(ccdim(&["ranking", "--loss", "ordinal", "--r", "3"]).status.code(), Some(1));
}
