use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const APEX: &str = r#"{"period": ["1/35", "7/17"]}"#;
const GOLDEN: &str = r#"{"period": ["1/15", "11/21"]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantorval")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cantorval-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_verdicts() {
    let v = json(&["classify", "--seq", APEX]);
    assert_eq!(v["kind"], "Cantorval");
    assert_eq!(v["provenance"], "main-star");
    assert_eq!(v["witness"]["holds"], true);

    let v = json(&["classify", "--seq", GOLDEN]);
    assert_eq!(v["provenance"], "fn-equality");

    let v = json(&["classify", "--seq", r#"{"period": ["1/4"]}"#]);
    assert_eq!(v, serde_json::json!({"kind": "FullInterval", "provenance": "tw1-1"}));
}

#[test]
fn seq_from_file() {
    let path = scratch("golden.json");
    std::fs::write(&path, GOLDEN).unwrap();
    let v = json(&["classify", "--seq", path.to_str().unwrap()]);
    assert_eq!(v["kind"], "Cantorval");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["classify", "--seq", r#"{"period": ["bad"]}"#]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--seq", "/nonexistent/seq.json"]).status.code(), Some(2));
    // every term above 1/3: no measure formula applies
    assert_eq!(run(&["measure", "--seq", r#"{"period": ["1/2"]}"#]).status.code(), Some(3));
    assert_eq!(run(&["oracle", "--seq", GOLDEN, "--depth", "14"]).status.code(), Some(3));
    let out = run(&["convert", "--mg", r#"{"block": ["3", "2"], "q": "1/6"}"#]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
}

#[test]
fn convert_multigeometric() {
    let v = json(&["convert", "--mg", r#"{"block": ["3", "2"], "q": "1/9"}"#]);
    assert_eq!(v["r0"], "45/8");
    assert_eq!(v["period"], serde_json::json!(["1/15", "11/21"]));

    let v = json(&["convert", "--seq", r#"{"period": ["1/3"]}"#, "--terms", "3"]);
    assert_eq!(v["terms"], serde_json::json!(["2/3", "2/9", "2/27"]));
}

#[test]
fn measure_golden() {
    let v = json(&["measure", "--seq", GOLDEN, "--rank", "3"]);
    assert_eq!(v["exact"], "8/5");
    assert!(v["decimal"].as_str().unwrap().starts_with("1.6"));
    assert_eq!(v["partial"]["agrees"], true);
}

#[test]
fn oracle_outputs() {
    let out = run(&["oracle", "--seq", GOLDEN, "--depth", "2", "--emit", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,l,r"));
    assert_eq!(lines.next(), Some("part,-1,-7/9"));
    assert_eq!(lines.next(), Some("gap,-7/9,-29/45"));

    let v = json(&["oracle", "--seq", APEX, "--depth", "6", "--emit", "measure"]);
    assert_eq!(v["gaps"], 26);

    let single = run(&["oracle", "--seq", APEX, "--depth", "6", "--single-worker"]);
    let parallel = run(&["oracle", "--seq", APEX, "--depth", "6"]);
    assert_eq!(single.stdout, parallel.stdout);
}

#[test]
fn construct_interval_and_family() {
    let v = json(&["construct", "--seq", GOLDEN, "--code", "1"]);
    assert_eq!(v["gaps"][1], serde_json::json!({"l": "1/9", "r": "11/45", "kind": "open"}));

    let v = json(&["construct", "--seq", APEX, "--code", "0", "--family-rank", "3", "--side", "0"]);
    let counts: Vec<usize> =
        v["ranks"].as_array().unwrap().iter().map(|r| r["gaps"].as_array().unwrap().len()).collect();
    assert_eq!(counts, vec![1, 3, 9]);
}

#[test]
fn region_scan_files_and_determinism() {
    let (csv, svg) = (scratch("region.csv"), scratch("region.svg"));
    let args = ["region-scan", "--a1", "0:0.06:30", "--a2", "0.33:0.45:30"];
    let mut with_files = args.to_vec();
    with_files.extend(["--csv", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    let summary = json(&with_files);
    assert_eq!(summary["nodes"], 961);

    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("a1,a2,in_region\n"));
    assert_eq!(table.lines().count(), 962);
    let inside = table.lines().filter(|l| l.ends_with(",true")).count();
    assert_eq!(summary["inside"], inside);
    assert!(inside > 0);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));

    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(String::from_utf8(first.stdout).unwrap(), table);
}

#[test]
fn verify_apex() {
    let v = json(&["verify", "--seq", APEX, "--depth", "4", "--extra-ranks", "2"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["catalog"]["matches"], true);
}
