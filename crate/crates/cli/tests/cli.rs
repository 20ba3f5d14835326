use std::process::{Command, Output};

use serde_json::Value;

fn permix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permix"))
        .args(args)
        .env_remove("PERMIX_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = permix(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn classify_reports_coset_witness() {
    let v = json(&["classify", "--m", "2", "--N", "4", "--sigma", "[0,2,1,3]"]);
    assert_eq!(v["status"], "NonMixing");
    assert_eq!(v["witness"], serde_json::json!([[0, 2], [1, 3]]));
    assert_eq!(v["subset_check_agrees"], true);

    let v = json(&["classify", "--m", "2", "--sigma", "(0 1)", "--N", "4"]);
    assert_eq!(v["status"], "Mixing");
}

#[test]
fn classify_subshift_family() {
    let v = json(&["classify", "--ell", "2", "--sigma", "[0,1,2,3]"]);
    assert_eq!(v["status"], "Mixing");
    assert_eq!(v["family"]["kind"]["kind"], "SubshiftExample");
    let v = json(&["classify", "--ell", "2", "--sigma", "[0,2,1,3]"]);
    assert_eq!(v["status"], "NonMixing");
}

#[test]
fn worst_permutation_and_bound() {
    let v = json(&["worst", "--m", "2", "--N", "5"]);
    assert_eq!(v["tau"], serde_json::json!([0, 3, 1, 4, 2]));
    let bound = v["bound"].as_f64().unwrap();
    assert!((bound - 0.809_016_994_374_947_4).abs() < 1e-12);
    assert!((v["lambda_tau"].as_f64().unwrap() - bound).abs() < 1e-10);
}

#[test]
fn rate_flags_agree() {
    let v = json(&["rate", "--m", "2", "--sigma", "[0,3,1,4,2]", "--exact", "--evolve", "200"]);
    assert_eq!(v["decelerates"], true);
    assert_eq!(v["decelerates_exact"], true);
    let rate = v["lambda_sigma"].as_f64().unwrap();
    assert!((v["density_rate"].as_f64().unwrap() - rate).abs() < 1e-3);
    assert!(v.get("runtime_ms").is_none());
}

#[test]
fn timing_adds_runtime() {
    let v = json(&["worst", "--m", "3", "--N", "7", "--timing"]);
    assert!(v["runtime_ms"].is_u64());
}

#[test]
fn bad_arguments_exit_with_usage() {
    for args in [
        vec!["classify", "--m", "2", "--sigma", "[0,0,1]"],
        vec!["classify", "--m", "2"],
        vec!["worst", "--m", "2", "--N", "4"],
        vec!["enumerate", "--m", "2", "--N", "9"],
        vec!["tables", "--which", "3"],
        vec!["sample", "--m", "2", "--N", "8", "--samples", "10"],
        vec!["frobnicate"],
    ] {
        let out = permix(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn sampling_is_reproducible() {
    let args = ["sample", "--m", "2", "--N", "8", "--samples", "500", "--seed", "42"];
    let a = permix(&args);
    let b = permix(&[&args[..], &["--threads", "1"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["samples"], 500);
    assert_eq!(v["seed"], 42);
    let other = permix(&["sample", "--m", "2", "--N", "8", "--samples", "500", "--seed", "43"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn table_one_csv() {
    let out = permix(&["tables", "--which", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,m,slow_count");
    assert_eq!(lines.len(), 13);
    for row in ["6,4,144", "8,2,16896", "8,3,35152", "8,4,18432", "4,2,0"] {
        assert!(lines.contains(&row), "missing {row}");
    }
}

#[test]
fn enumerate_counts_and_p_summary() {
    let v = json(&["enumerate", "--m", "4", "--N", "6"]);
    assert_eq!(v["slow_count"], "144");
    assert_eq!(v["total"], "720");

    let v = json(&["enumerate", "--m", "2", "--ell", "3"]);
    assert_eq!(v["p_exhaustive"], "1/5");
    assert_eq!(v["p_closed_form"], "1/5");
}

#[test]
fn subshift_census_and_operator() {
    let v = json(&["subshift", "--ell", "2"]);
    assert_eq!(v["witness_proportion"], "5/12");
    assert_eq!(v["density"], serde_json::json!(["4/3", "2/3"]));
    let entropy = v["entropy"].as_f64().unwrap();
    assert!((entropy - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-9);
}

#[test]
fn spectrum_csv_and_export() {
    let out = permix(&["spectrum", "--m", "2", "--sigma", "[1,0,2]", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("re,im,modulus,mult\n"));
    let out = permix(&["spectrum", "--matrix", "a", "--m", "2", "--N", "3", "--export"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1,1,0\n1,0,1\n0,1,1\n");
}

#[test]
fn verify_prints_one_line_per_criterion() {
    let out = permix(&["verify", "--criterion", "3,10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("PASS [3]"));
    assert!(lines[1].starts_with("PASS [10]"));
}
