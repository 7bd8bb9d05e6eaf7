use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn biharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biharm")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = biharm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn schema() -> jsonschema::JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/table.schema.json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&doc).expect("schema compiles")
}

fn density_file() -> PathBuf {
    let path = std::env::temp_dir().join(format!("biharm-density-{}.csv", std::process::id()));
    std::fs::write(&path, "radius,value\n0,1\n0.5,0.8\n1,0\n").unwrap();
    path
}

#[test]
fn bessel_zeros_table() {
    let out = stdout(&["bessel", "--mu", "0", "--zeros", "5"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "k,j_zero");
    assert_eq!(lines.len(), 6);
    let z1: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((z1 - 2.404825557695773).abs() < 1e-12);
}

#[test]
fn profile_table_is_positive() {
    let out = stdout(&["profile", "--dim", "3", "--beta", "2", "--eta", "0.01:100:200:log"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("eta,F_value,abs_err"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r[1] > 0.0 && r[2] < 1e-8));
}

#[test]
fn scan_brackets_threshold() {
    let out = stdout(&["scan", "--dim", "1", "--beta-lo", "0.3", "--beta-hi", "0.99", "--resolution", "0.01", "--format", "json"]);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let lo = doc["meta"]["largest_positive"].as_f64().unwrap();
    let hi = doc["meta"]["smallest_negative"].as_f64().unwrap();
    assert!(lo < hi && hi - lo <= 0.01);
    assert!(lo > 0.7 && hi < 0.9);
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    for args in [
        vec!["profile", "--dim", "3", "--beta", "2", "--eta", "5:1:10"],
        vec!["profile", "--dim", "3", "--beta", "2", "--eta", "1:5:10:cubic"],
        vec!["kernel", "--dim", "2"],
        vec!["semilinear", "--dim", "1", "--p", "6", "--epsilon", "1e-3", "--tol", "0.5"],
        vec!["bessel", "--mu", "0", "--zeros", "3", "--format", "xml"],
        vec!["frobnicate"],
    ] {
        let out = biharm(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        let err = String::from_utf8_lossy(&out.stderr);
        if let Some(flag) = args.iter().rev().find(|a| a.starts_with("--")) {
            if args.len() > 3 {
                assert!(err.contains(flag.trim_start_matches('-')), "{err}");
            }
        }
    }
}

#[test]
fn computation_errors_exit_one() {
    let out = biharm(&["profile", "--dim", "3", "--beta", "5", "--eta", "1:2:3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain error"));
    let out = biharm(&["semilinear", "--dim", "1", "--p", "2", "--epsilon", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn every_subcommand_validates_against_schema() {
    let schema = schema();
    let density = density_file();
    let d = density.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["bessel", "--mu", "0.5", "--eval", "0.1:10:7"],
        vec!["kernel", "--dim", "2", "--sign-changes", "12"],
        vec!["kernel", "--dim", "1", "--identity-check"],
        vec!["profile", "--dim", "1", "--beta", "0.4375", "--eta", "0.1:10:5:log", "--certify"],
        vec!["solution", "--dim", "3", "--beta", "1", "--x", "0:2:3", "--t", "0.5:2:2"],
        vec!["riesz", "--dim", "3", "--beta", "1", "--q", "1.2", "--density", d, "--x", "0:2:2", "--t", "1:1:1"],
        vec!["hbound", "--dim", "1", "--p", "6", "--x", "0:2:2", "--t", "1:2:2"],
    ];
    for mut args in cases {
        args.extend(["--format", "json"]);
        let doc: Value = serde_json::from_str(&stdout(&args)).unwrap();
        if let Err(errors) = schema.validate(&doc) {
            let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
            panic!("{args:?}: {msgs:?}");
        }
        let columns = doc["meta"]["columns"].as_array().unwrap();
        assert!(!doc["rows"].as_array().unwrap().is_empty());
        for row in doc["rows"].as_array().unwrap() {
            assert_eq!(row.as_object().unwrap().len(), columns.len());
        }
    }
    std::fs::remove_file(density).ok();
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("biharm-out-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    assert!(stdout(&["bessel", "--mu", "1", "--zeros", "3", "--output", p]).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, stdout(&["bessel", "--mu", "1", "--zeros", "3", "--threads", "1"]));
    std::fs::remove_file(path).ok();
}
