use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn dosefind(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dosefind")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn records(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn classify_reports_both_verdicts() {
    let text = stdout(&dosefind(&["classify", "--f", "0.05,0.1,0.3,0.5,0.7", "--p", "0.3", "--dp1", "0.1"]));
    assert!(text.contains("CCD: Yes"), "{text}");
    assert!(text.contains("CRM: "), "{text}");
    assert!(text.contains("nominee"), "{text}");

    let rec = records(&stdout(&dosefind(&["classify", "--f", "0.1,0.25,0.35,0.6", "--p", "0.3", "--format", "records"])));
    assert_eq!(rec[0]["ccd"]["class"], "no2plus");
    assert!(rec[0]["crm"].is_null());
}

#[test]
fn classify_endpoints_are_exact() {
    // 0.2 sits exactly on p - dp1 and is outside the open interval
    let rec = records(&stdout(&dosefind(&["classify", "--f", "0.1,0.2,0.45", "--p", "0.3", "--format", "records"])));
    assert_eq!(rec[0]["ccd"]["class"], "no0");
    assert_eq!(rec[0]["ccd"]["endpoint_only"], true);
}

#[test]
fn usage_and_validation_errors() {
    let out = dosefind(&["classify", "--f", "0.05,0.1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = dosefind(&["classify", "--f", "0.05,0.3,0.2", "--p", "0.3"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--f") && err.contains("f[2]") && err.contains("f[3]"), "{err}");

    let out = dosefind(&["classify", "--f", "0.05,0.1,0.3", "--p", "0.3", "--skeleton", "0.1,0.2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--skeleton"));

    let out = dosefind(&["simulate", "--f", "0.1,0.3", "--p", "0.3", "--start", "3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--start"));
}

#[test]
fn scenario_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("scenarios.jsonl");
    let out = dosefind(&["gen-scenarios", "--m", "5", "--count", "4", "--seed", "3", "--format", "records", "--out"]
        .into_iter()
        .chain([file.to_str().unwrap()])
        .collect::<Vec<_>>());
    stdout(&out);
    let gen = records(&std::fs::read_to_string(&file).unwrap());
    assert_eq!(gen.len(), 4);
    assert_eq!(gen[2]["seed_info"]["master_seed"], 3);

    let cls = records(&stdout(&dosefind(&[
        "classify",
        "--scenario",
        file.to_str().unwrap(),
        "--p",
        "0.3",
        "--format",
        "records",
    ])));
    assert_eq!(cls.len(), 4);
    assert_eq!(cls[1]["id"], "1");
    assert_eq!(cls[1]["f"], gen[1]["f"]);

    let sim = records(&stdout(&dosefind(&[
        "simulate",
        "--scenario",
        file.to_str().unwrap(),
        "--p",
        "0.3",
        "--design",
        "point",
        "--cohort",
        "3",
        "--n",
        "60",
        "--reps",
        "10",
        "--format",
        "records",
    ])));
    assert_eq!(sim.len(), 4);
    let shares: f64 = sim[0]["recommended"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
    assert!((shares - 1.0).abs() < 1e-9);

    std::fs::write(&file, "{\"f\": [0.1, 0.2]}\nnot json\n").unwrap();
    let out = dosefind(&["classify", "--scenario", file.to_str().unwrap(), "--p", "0.3"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("scenarios.jsonl:2"));
}

#[test]
fn table1_smoke_run() {
    let start = Instant::now();
    let text = stdout(&dosefind(&["table1", "--count", "10", "--m", "5"]));
    assert!(start.elapsed() < Duration::from_secs(1), "{:?}", start.elapsed());
    assert!(text.contains("±0.1") && text.contains("±0.05"), "{text}");
    for row in ["No: 0", "No: 2+", "Funneling", "Yes", "No Funneling", "CCD margin"] {
        assert!(text.contains(row), "{row}");
    }
}

#[test]
fn table1_writes_text_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("t1");
    stdout(&dosefind(&["table1", "--count", "20", "--seed", "4", "--out", out_dir.to_str().unwrap()]));
    let text = std::fs::read_to_string(out_dir.join("table1.txt")).unwrap();
    assert!(text.contains("m = 5") && text.contains("m = 10"));
    let recs = records(&std::fs::read_to_string(out_dir.join("table1.jsonl")).unwrap());
    let scenarios: Vec<&Value> = recs.iter().filter(|r| r["record"] == "scenario").collect();
    assert_eq!(scenarios.len(), 40);
    assert_eq!(scenarios[0]["seed_info"]["master_seed"], 4);
    assert_eq!(scenarios[0]["ccd"].as_array().unwrap().len(), 2);
    assert!(scenarios[0]["crm"]["class"].is_string());
    let tabs: Vec<&Value> = recs.iter().filter(|r| r["record"] == "crosstab").collect();
    assert_eq!(tabs.len(), 4);
    let total: u64 = tabs[0]["counts"].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 20);
}

#[test]
fn write_failures_name_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("sub");
    let out = dosefind(&["table1", "--count", "5", "--out", target.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(target.to_str().unwrap()), "{err}");

    let out = dosefind(&["gen-scenarios", "--count", "2", "--out", target.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains(target.to_str().unwrap()));
}

/// Default ensemble, m = 5: the interval design's "Yes" margin for ±0.1.
#[test]
fn ccd_yes_margin_near_the_published_value() {
    let recs = records(&stdout(&dosefind(&["table1", "--m", "5", "--count", "2500", "--format", "records"])));
    let tab = recs.iter().find(|r| r["record"] == "crosstab" && r["dp1"] == 0.1).unwrap();
    let counts = tab["counts"].as_array().unwrap();
    let yes: u64 = counts.iter().map(|r| r[2].as_u64().unwrap()).sum();
    let pct = 100.0 * yes as f64 / 2500.0;
    assert!((pct - 36.2).abs() <= 15.0, "{pct}");
}

#[test]
fn counterexample_report() {
    let recs = records(&stdout(&dosefind(&["counterexample", "--reps", "3000", "--n", "200", "--format", "records"])));
    let r = &recs[0];
    assert_eq!(r["trap_level"], 2);
    assert!((r["lower_bound"].as_f64().unwrap() - 0.27).abs() < 1e-12);
    assert_eq!(r["clears_bound"], true);
}
