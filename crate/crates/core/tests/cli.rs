use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn achcr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_achcr")).args(args).output().expect("spawn achcr")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("achcr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SL2_LIKE: &str = r#"{"n":1,"brackets":[
  {"x":"Z1","y":"Zb1","z":"T","c":{"re":"0","im":"1"}},
  {"x":"T","y":"Z1","z":"Z1","c":{"re":"0","im":"2"}}
],"options":{"autocomplete":AUTO}}"#;

#[test]
fn validate_builtins() {
    let ok = achcr(&["validate", "builtin:su2"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["validation"]["passed"], Value::Bool(true));
    let bad = achcr(&["validate", "builtin:twisted_heisenberg2"]);
    assert_eq!(code(&bad), 2);
    assert_eq!(json(&bad)["validation"]["passed"], Value::Bool(false));
}

#[test]
fn autocomplete_fills_conjugates_and_notes_it() {
    let on = scratch("on.json", &SL2_LIKE.replace("AUTO", "true"));
    let o = achcr(&["validate", "--input", on.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let notes = json(&o)["validation"]["notes"].clone();
    assert_eq!(notes.as_array().unwrap().len(), 1, "{notes}");
    assert!(notes[0].as_str().unwrap().contains("[T,Zb1]^Zb1"));

    let off = scratch("off.json", &SL2_LIKE.replace("AUTO", "false"));
    let o = achcr(&["validate", off.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn parse_errors_exit_4() {
    let p = scratch("unknown.json", r#"{"n":1,"brackets":[],"extra":0}"#);
    assert_eq!(code(&achcr(&["validate", p.to_str().unwrap()])), 4);
    let p = scratch("label.json", r#"{"n":1,"brackets":[{"x":"Z2","y":"Zb1","z":"T","c":{"re":"1"}}]}"#);
    assert_eq!(code(&achcr(&["validate", p.to_str().unwrap()])), 4);
    assert_eq!(code(&achcr(&["validate", "/nonexistent/achcr.json"])), 4);
    assert_eq!(code(&achcr(&["frobnicate"])), 4);
    assert_eq!(code(&achcr(&["solve", "builtin:su2", "--truncation", "many"])), 4);
}

#[test]
fn bad_parameters_exit_5() {
    assert_eq!(code(&achcr(&["sphere-coeff", "--n", "0"])), 5);
    assert_eq!(code(&achcr(&["sphere-coeff", "--n", "9"])), 5);
    assert_eq!(code(&achcr(&["verify", "builtin:su2", "--checks", "nope"])), 5);
    assert_eq!(code(&achcr(&["verify", "builtin:su2", "--lambda=-1"])), 5);
    assert_eq!(code(&achcr(&["verify", "builtin:su2", "--lambda", "0"])), 5);
    assert_eq!(code(&achcr(&["solve", "builtin:su2", "--truncation", "2"])), 5);
    assert_eq!(code(&achcr(&["validate"])), 5);
}

#[test]
fn sphere_coefficients_print() {
    let o = achcr(&["sphere-coeff", "--n", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, "c_1 = 1\nc_2 = -1/2\na_3 = 1/4  OK\n");
}

#[test]
fn solve_su2_has_zero_obstruction() {
    let o = achcr(&["solve", "builtin:su2"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["obstruction"], serde_json::json!({}));
    assert_eq!(r["checks"]["bianchi"], Value::Bool(true));
    assert!(r.get("timing_ms").is_none());
    let timed = json(&achcr(&["solve", "builtin:su2", "--timing"]));
    assert!(timed.get("timing_ms").is_some());
}

#[test]
fn output_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("achcr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = achcr(&["solve", "builtin:heisenberg1", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["n"], serde_json::json!(1));
}

#[test]
fn verify_selected_checks() {
    let o = achcr(&["verify", "builtin:su2", "--checks", "seed,bianchi,table1,scaling", "--lambda", "9/4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(code(&achcr(&["verify", "builtin:twisted_heisenberg2"])), 2);
}
