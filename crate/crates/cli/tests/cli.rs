//! CLI contract tests: exit codes, envelope shape, format handling.

use std::process::{Command, Output};

fn ergolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn empty_argv_is_usage_error() {
    let out = ergolab(&[]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("Usage") || msg.contains("usage"), "{msg}");
}

#[test]
fn unknown_flag_is_rejected() {
    let out = ergolab(&["weyl", "--seq", "pow:3/2", "--lambda", "1", "--N", "10", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_spec_is_usage_error() {
    let out = ergolab(&["weyl", "--seq", "pow:0/0", "--lambda", "1", "--N", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn help_exits_zero() {
    let out = ergolab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in ["--theta", "--cap", "--seed", "--precision-bits", "--output"] {
        assert!(text.contains(flag), "help must document {flag}");
    }
}

#[test]
fn envelope_carries_version_and_config() {
    let out = ergolab(&["example-3-13", "--horizon", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["tool"], "ergolab");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["command"], "example-3-13");
    assert_eq!(v["config"]["horizon"], 100);
    assert_eq!(v["config"]["seed"], 0);
    assert_eq!(v["report"]["violations"], 0);
}

#[test]
fn exhausted_search_exits_two_with_reason() {
    let out = ergolab(&["example-3-14", "--run-length", "40", "--bound", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_eq!(v["status"], "indeterminate");
    assert!(v["report"]["reason"].as_str().unwrap().contains("no run"));
}

#[test]
fn precision_exhaustion_exits_two() {
    // logpow with an inexact exponent keeps every floor ambiguous.
    let out = ergolab(&[
        "weyl",
        "--seq",
        "pow:2.000000~",
        "--lambda",
        "1",
        "--N",
        "4",
        "--precision-bits",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_eq!(v["status"], "indeterminate");
}

#[test]
fn cover_failure_exits_two() {
    let out = ergolab(&[
        "cover", "--set", "mult:10", "--horizon", "100", "--target", "50", "--l-max", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_available_only_for_tabular_reports() {
    let ok = ergolab(&[
        "residues", "--seq", "pow:3/2", "--m", "4", "--N", "100", "--output", "csv",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(text.starts_with("modulus,residue,count"));

    let bad = ergolab(&[
        "weyl", "--seq", "pow:3/2", "--lambda", "1", "--N", "100", "--output", "csv",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn invalid_global_values_are_rejected() {
    let out = ergolab(&["example-3-13", "--horizon", "10", "--theta", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let out2 = ergolab(&["example-3-13", "--horizon", "0"]);
    assert_eq!(out2.status.code(), Some(1));
}

#[test]
fn progress_goes_to_stderr_not_stdout() {
    let out = ergolab(&["example-3-13", "--horizon", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scanned"));
    // stdout parses as one clean JSON document.
    json_of(&out);
}

#[test]
fn delta_set_file_roundtrip() {
    let dir = std::env::temp_dir().join(format!("ergolab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("set.txt");
    std::fs::write(&path, "1\n2\n4\n").unwrap();
    let out = ergolab(&[
        "delta",
        "--kind",
        "1",
        "--set",
        &format!("file:{}", path.display()),
        "--horizon",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["report"]["delta1"]["runs"], serde_json::json!([[-3, 3]]));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn probe_reports_consistent_for_three_halves() {
    let out = ergolab(&["probe", "--seq", "pow:3/2", "--N", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["report"]["verdict"], "consistent");
    assert_eq!(v["report"]["irrational_probes"].as_array().unwrap().len(), 3);
    assert_eq!(v["report"]["residue_probes"].as_array().unwrap().len(), 4);
}

#[test]
fn tempered_semigroup_mode_with_translates() {
    let out = ergolab(&[
        "tempered",
        "--family",
        "multbox:f=n",
        "--n-max",
        "4",
        "--mode",
        "semigroup",
        "--g",
        "natmul:6;natmul:2^5*3^5*5^5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["report"]["mode"], "semigroup");
    assert!(v["report"]["sup"].as_f64().unwrap() >= 1.0);
}

#[test]
fn density_rejects_non_integer_family() {
    let out = ergolab(&[
        "density", "--set", "mult:4", "--horizon", "100", "--n-max", "2", "--family",
        "multbox:paper",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn env_var_sets_precision_cap() {
    let out = Command::new(env!("CARGO_BIN_EXE_ergolab"))
        .env("ERGOLAB_PRECISION_BITS", "128")
        .args(["example-3-13", "--horizon", "10"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["precision_bits"], 128);
}
