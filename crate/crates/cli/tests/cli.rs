use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn cuspforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuspforge")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn json(args: &[&str]) -> Value {
    let o = cuspforge(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

#[test]
fn rigidity_of_five_two() {
    let v = json(&["rigidity", "--json", "bundled:5_2"]);
    let rig = &v["rigidity"];
    assert_eq!(rig["fox_rank_v"], 8);
    assert_eq!(rig["verdict"]["rigid"], true);
    let dims = rig["verdict"]["dims"].as_array().unwrap();
    let vdims = dims.iter().find(|d| d["module"] == "v").expect("v dims")["dims"].clone();
    assert_eq!(vdims, serde_json::json!({ "z1": 10, "b1": 9, "h1": 1 }));
}

#[test]
fn classify_verdicts() {
    let v = json(&["classify", "--json", "bundled:5_2"]);
    assert_eq!(v["cusps"][0]["verdict"], "type-2-achievable");
    let v = json(&["classify", "--json", "bundled:6_3"]);
    assert_eq!(v["symmetry"]["type1_achievable"], true);
    assert_eq!(v["cusps"][0]["c_a"]["exact"], "0");
    let text = stdout(&cuspforge(&["classify", "bundled:4_1"]));
    assert!(text.contains("type-1 achievable (symmetry criterion): true"), "{text}");
}

#[test]
fn every_number_carries_its_mode() {
    let v = json(&["slice-coords", "--json", "--float", "bundled:4_1"]);
    assert_eq!(v["mode"], "float");
    assert_eq!(v["cusps"][0]["shape"]["v"]["mode"], "float");
    assert!(v["mode_agreement"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn report_is_deterministic() {
    let a = cuspforge(&["report", "bundled:4_1"]);
    let b = cuspforge(&["report", "bundled:4_1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("slice span 4, so31 image 2, intersection 0, total 6"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(cuspforge(&["check", "bundled:6_3"]).status.code(), Some(0));
    assert_eq!(cuspforge(&["rigidity"]).status.code(), Some(2));
    assert_eq!(cuspforge(&["frobnicate", "x"]).status.code(), Some(2));
    assert_eq!(cuspforge(&["rigidity", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(cuspforge(&["rigidity", "--rank-tol", "3", "bundled:4_1"]).status.code(), Some(2));

    // A relator violation is a mathematical failure.
    let text = include_str!("../../core/data/figure_eight.json");
    let mut v: Value = serde_json::from_str(text).unwrap();
    v["presentation"]["relators"][0] = "x y x^-1 y^-1".into();
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(v.to_string().as_bytes()).unwrap();
    let path = f.path().to_str().unwrap();
    let check = cuspforge(&["check", path]);
    assert_eq!(check.status.code(), Some(1));
    assert!(stdout(&check).contains("FAIL relator 1"));
    assert_eq!(cuspforge(&["rigidity", path]).status.code(), Some(1));
}

#[test]
fn lift_round_trips() {
    let lifted = cuspforge(&["lift", "bundled:6_3"]);
    assert!(lifted.status.success());
    let v: Value = serde_json::from_slice(&lifted.stdout).unwrap();
    assert_eq!(v["holonomy"]["form"], "SO31");
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(&lifted.stdout).unwrap();
    let a = json(&["rigidity", "--json", f.path().to_str().unwrap()]);
    let b = json(&["rigidity", "--json", "bundled:6_3"]);
    assert_eq!(a["rigidity"], b["rigidity"]);
}

#[test]
fn cusp_gen_table_and_csv() {
    let o = cuspforge(&["cusp-gen", "type1", "--lambda1", "1.5", "--samples", "5", "--csv-only"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a,b,c,s"));
    assert_eq!(lines.count(), 5);
    let v = json(&["cusp-gen", "--json", "type2", "--lambda1", "0.5", "--lambda2", "2"]);
    assert_eq!(v["generators"].as_array().unwrap().len(), 5);
    assert_eq!(cuspforge(&["cusp-gen", "type5"]).status.code(), Some(2));
}
