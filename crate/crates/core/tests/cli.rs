use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const FIGURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../figures");

fn qpst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpst")).args(args).output().unwrap()
}

fn figure(name: &str) -> PathBuf {
    Path::new(FIGURES).join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: &str = r#"
schema = 1
name = "small"

[chain]
kind = "pst"
n = 4
omega = 3.0
Gamma = 0.0

[initial]
alpha = 1.5

[scan]
tau_min = 0.0
tau_max = 3.0
samples = 301

[expect]
peak_p_ex_min = 0.999
"#;

#[test]
fn run_writes_csv_and_summary() {
    let out = tempfile::tempdir().unwrap();
    let o = qpst(&["run", s(&figure("fig1a.toml")), "--out", s(out.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.path().join("fig1a.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "tau,p_ex,p_rec,precision_flag"));
    assert!(csv.contains("# units = scaled"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 2001);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.path().join("fig1a.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    let tau = summary["tau_ex"]["numeric"]["tau_ex"].as_f64().unwrap();
    assert!((tau / 31_415.93 - 1.0).abs() < 0.01);
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    fs::write(&cfg, SMALL).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(qpst(&["run", s(&cfg), "--out", s(&a)]).status.success());
    assert!(qpst(&["--threads", "1", "run", s(&cfg), "--out", s(&b)]).status.success());
    assert_eq!(fs::read(a.join("small.csv")).unwrap(), fs::read(b.join("small.csv")).unwrap());
}

#[test]
fn missing_field_is_reported_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    let text = fs::read_to_string(figure("fig1a.toml")).unwrap().replace("epsilon = 5000.0\n", "");
    fs::write(&cfg, text).unwrap();
    let o = qpst(&["run", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 5") && err.contains("epsilon"), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.toml");
    fs::write(&cfg, SMALL.replace("alpha = 1.5", "alpah = 1.5")).unwrap();
    let o = qpst(&["run", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpah"));
}

#[test]
fn empty_suite_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpst(&["suite", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no scenarios"));
}

#[test]
fn failing_scenario_does_not_hide_others() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a_good.toml"), SMALL).unwrap();
    let failing = SMALL.replace("name = \"small\"", "name = \"strict\"").replace("0.999", "1.5");
    fs::write(dir.path().join("b_fail.toml"), failing).unwrap();
    let broken = SMALL.replace("name = \"small\"", "name = \"broken\"").replace("n = 4", "n = 1");
    fs::write(dir.path().join("c_broken.toml"), broken).unwrap();
    let out = dir.path().join("out");
    let o = qpst(&["suite", s(dir.path()), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("suite_report.json")).unwrap()).unwrap();
    let entries = report["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    assert_eq!(entries[0]["passed"], true);
    assert_eq!(entries[1]["passed"], false);
    assert!(entries[1]["error"].is_null());
    assert_eq!(entries[2]["passed"], false);
    assert!(entries[2]["error"].is_string());
    assert!(out.join("small.csv").exists());
    assert!(out.join("suite_summary.txt").exists());
}

#[test]
fn plot_requires_an_existing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = qpst(&["plot", s(&dir.path().join("nope.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no such CSV"));
}

#[test]
fn recurrence_panel_reaches_the_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("rec.toml");
    fs::write(&cfg, SMALL.replace("[expect]", "[outputs]\nrecurrence_panel = true\n\n[expect]")).unwrap();
    assert!(qpst(&["run", s(&cfg)]).status.success());
    let o = qpst(&["plot", s(&dir.path().join("small.csv"))]);
    assert!(o.status.success());
    let script = fs::read_to_string(dir.path().join("small_plot.py")).unwrap();
    assert!(script.contains("small.png"));
    assert!(fs::read_to_string(dir.path().join("small.csv")).unwrap().contains("# recurrence_panel = true"));
}

#[test]
fn imprecise_samples_need_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("long.toml");
    let text = SMALL.replace("tau_max = 3.0", "tau_max = 1e14").replace("peak_p_ex_min = 0.999", "");
    fs::write(&cfg, text).unwrap();
    let o = qpst(&["run", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--allow-imprecise"));
    let o = qpst(&["--allow-imprecise", "run", s(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("small.csv")).unwrap();
    assert!(csv.lines().last().unwrap().ends_with(",1"));
}
