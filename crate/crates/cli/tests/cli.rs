use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn meanlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meanlab"))
        .args(args)
        .env_remove("MEANLAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SUPP_NOT_PSUPP: &str = r#"{
  "X": ["1", "2"],
  "Y": ["1", "2", "3"],
  "family": {"f1": [1.0, 0.5], "f2": [0.5, 1.0], "f3": [1.0, 1.0]},
  "T": {"f1": [1.0, 0.5, 1.0], "f2": [0.5, 1.0, 0.3333333333333333], "f3": [1.0, 1.0, 1.0]},
  "strict": true
}"#;

#[test]
fn gallery_example_passes() {
    let out = meanlab(&["gallery", "--id", "2notn"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["summary"]["fail"], 0);
}

#[test]
fn unknown_gallery_id_is_an_input_error() {
    let out = meanlab(&["gallery", "--id", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_reports_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "inst.json", SUPP_NOT_PSUPP);
    for mean in ["arithmetic", "geometric", "harmonic"] {
        let out = meanlab(&["check", "--instance-path", &path, "--mean", mean, "--max-multiset", "3"]);
        assert_eq!(out.status.code(), Some(0), "{mean}: {}", String::from_utf8_lossy(&out.stdout));
        let r = json(&out);
        let rep = &r["records"][0]["metrics"]["report"];
        assert_eq!(rep["violation_count"], 0);
        assert_eq!(rep["reconstruction"]["Y0"], serde_json::json!(["1", "2"]));
    }
}

#[test]
fn check_flags_a_violation() {
    let dir = tempfile::tempdir().unwrap();
    let text = SUPP_NOT_PSUPP.replace("\"f3\": [1.0, 1.0, 1.0]}", "\"f3\": [1.0, 1.5, 1.0]}");
    let path = write(dir.path(), "bad.json", &text);
    let out = meanlab(&["check", "--instance", &path, "--max-multiset", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["records"][0]["metrics"]["report"]["violation_count"].as_u64().unwrap() > 0);
}

#[test]
fn harmonic_check_needs_a_strict_declaration() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "loose.json", &SUPP_NOT_PSUPP.replace("\"strict\": true", "\"strict\": false"));
    let out = meanlab(&["check", "--instance-path", &path, "--mean", "harmonic"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["records"][0]["detail"].as_str().unwrap().contains("not declared strict"));
}

#[test]
fn malformed_instance_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = SUPP_NOT_PSUPP.replace("\"f1\": [1.0, 0.5, 1.0]", "\"f1\": [1.0, 0.5]");
    let path = write(dir.path(), "short.json", &text);
    let out = meanlab(&["check", "--instance-path", &path]);
    assert_eq!(out.status.code(), Some(2));
    let all = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    assert!(all.contains("T.f1"), "{all}");
}

#[test]
fn missing_instance_is_an_input_error() {
    let out = meanlab(&["reconstruct"]);
    assert_eq!(out.status.code(), Some(2));
    let out = meanlab(&["check", "--instance-path", "/nonexistent/inst.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reconstruct_prints_y0_and_tau() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "inst.json", SUPP_NOT_PSUPP);
    let out = meanlab(&["reconstruct", "--instance-path", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = json(&out);
    let rec = &r.as_object().unwrap()["records"][0]["metrics"]["reconstruction"];
    assert_eq!(rec["tau"], serde_json::json!({"1": "1", "2": "2"}));
    assert_eq!(rec["residual"], 0.0);
}

#[test]
fn lemmas_pass_and_are_deterministic() {
    let args = ["lemmas", "--seed", "0", "--trials", "10", "--dims", "2..4"];
    let a = meanlab(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    let b = meanlab(&args);
    let (mut ja, mut jb) = (json(&a), json(&b));
    ja.as_object_mut().unwrap().remove("wall_time_ms");
    jb.as_object_mut().unwrap().remove("wall_time_ms");
    assert_eq!(ja, jb);
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_meanlab"))
        .args(["lemmas", "--trials", "2", "--dims", "2"])
        .env("MEANLAB_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["seed"], 17);
}

#[test]
fn output_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let out = meanlab(&["gallery", "--output", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(r["command"], "gallery");
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn text_format_has_a_summary_line() {
    let out = meanlab(&["gallery", "--id", "not_full", "--format", "text", "--grid-size", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.lines().any(|l| l.starts_with("PASS ")));
    assert!(s.lines().last().unwrap().starts_with("gallery: "));
}

#[test]
fn bad_flag_exits_with_input_code() {
    assert_eq!(meanlab(&["lemmas", "--dims", "x"]).status.code(), Some(2));
    assert_eq!(meanlab(&["frobnicate"]).status.code(), Some(2));
}
