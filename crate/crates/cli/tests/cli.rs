use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn posort(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posort"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn analyze_two_chain_plus_point() {
    let out = posort(&["analyze", "--expr", "(. * .) + ."]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n"], 3);
    assert_eq!(v["num_extensions"], 3);
    assert!((v["itlb"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-12);
    assert!((v["qlb"].as_f64().unwrap() - 1.5).abs() < 1e-15);
    assert!((v["qh"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-15);
    assert!((v["entropy"].as_f64().unwrap() - 0.462098).abs() < 1e-6);
    assert_eq!(v["lemma1_ok"], true);
    assert_eq!(v["sandwich_ok"], true);
}

#[test]
fn analyze_chain_has_zero_bounds() {
    let out = posort(&["analyze", "--expr", "chain(6)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["num_extensions"], 1);
    for key in ["itlb", "qlb", "gamma_norm"] {
        assert_eq!(v[key].as_f64(), Some(0.0), "{key}");
    }
    assert!(v["lb"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn field_order_is_fixed() {
    let out = posort(&["analyze", "--expr", ". + ."]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = [
        "n", "num_extensions", "itlb", "entropy", "lb", "qlb", "qh", "gamma_norm",
        "max_gamma_ij_norm", "lemma1_ok", "lemma2_ok", "lemma3_ok", "sandwich_ok",
    ];
    let positions: Vec<usize> = keys
        .iter()
        .map(|k| text.find(&format!("\"{k}\":")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn cyclic_file_exits_1() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# a 3-cycle\n3\n1 2\n2 3\n3 1").unwrap();
    let out = posort(&["analyze", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cycle"), "{err}");
}

#[test]
fn file_input_matches_expression() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "3\n2 1").unwrap();
    let from_file = json(&posort(&["analyze", file.path().to_str().unwrap()]));
    let from_expr = json(&posort(&["analyze", "--expr", "(. * .) + ."]));
    for key in ["num_extensions", "itlb", "qlb", "qh"] {
        assert_eq!(from_file[key], from_expr[key], "{key}");
    }
}

#[test]
fn malformed_input_exits_1() {
    let out = posort(&["analyze", "--expr", ". + * ."]);
    assert_eq!(out.status.code(), Some(1));
    let out = posort(&["analyze", "--expr", "chain(0)"]);
    assert_eq!(out.status.code(), Some(1));
    let out = posort(&["analyze", "--expr", "chain(25)"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn adversary_fields_null_above_cap() {
    let out = posort(&["analyze", "--expr", "antichain(4)", "--matrix-cap", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["gamma_norm"].is_null() && v["lemma3_ok"].is_null());
    assert!(v["qlb"].is_number());
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
}

#[test]
fn csv_and_text_formats() {
    let out = posort(&["analyze", "--expr", "N(1)", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("n,num_extensions,itlb"));
    assert!(lines[1].starts_with("4,5,"));
    let out = posort(&["analyze", "--expr", "N(1)", "--format", "text"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("qlb"));
}

#[test]
fn output_is_deterministic() {
    let args = ["analyze", "--expr", "N(1) + (. * .)", "--seed", "9"];
    assert_eq!(posort(&args).stdout, posort(&args).stdout);
    let args = ["tech-constant", "--max-n", "30"];
    assert_eq!(posort(&args).stdout, posort(&args).stdout);
}

#[test]
fn tech_constant_small_scan() {
    let out = posort(&["tech-constant", "--max-n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("1,1,")).unwrap();
    let ratio: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((ratio - 1.0 / 2f64.ln()).abs() < 1e-14);
    assert!(text.starts_with("c_min = "));
}

#[test]
fn tech_constant_full_scan_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ratios.csv");
    let out = posort(&["tech-constant", "--max-n", "500", "--csv", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let head = String::from_utf8(out.stdout).unwrap();
    let c_min: f64 = head.lines().next().unwrap()["c_min = ".len()..].parse().unwrap();
    assert!(c_min > 0.0);
    let table = std::fs::read_to_string(path).unwrap();
    assert_eq!(table.lines().count(), 1 + 500 * 501 / 2);
}

#[test]
fn tech_constant_rejects_max_n_1() {
    let out = posort(&["tech-constant", "--max-n", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_sp_passes() {
    let out = posort(&["verify", "sp", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 6);
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_adversary_passes() {
    let out = posort(&["verify", "adversary"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn verify_orderstats_passes() {
    let out = posort(&["verify", "orderstats", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn unknown_suite_is_an_error() {
    assert_eq!(posort(&["verify", "nonsense"]).status.code(), Some(1));
}
