use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::config::ScenarioConfig;
use super::scenario::{run_config, Check, RunOptions};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteEntry {
    pub id: String,
    pub config: String,
    pub passed: bool,
    pub error: Option<String>,
    pub checks: Vec<Check>,
    pub metrics: Value,
    pub csv: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub version: String,
    pub entries: Vec<SuiteEntry>,
    pub passed: bool,
}

fn scenario_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

fn failed(id: String, config: &Path, error: String) -> SuiteEntry {
    SuiteEntry {
        id,
        config: config.display().to_string(),
        passed: false,
        error: Some(error),
        checks: Vec::new(),
        metrics: Value::Null,
        csv: None,
    }
}

fn metrics(summary: &Value) -> Value {
    let mut m = serde_json::Map::new();
    for key in ["tau_ex", "peak_p_ex", "peak_p_rec", "windows", "imprecise_samples", "runtime_s"] {
        m.insert(key.into(), summary[key].clone());
    }
    Value::Object(m)
}

/// Runs every `*.toml` in `dir` concurrently and writes
/// `suite_report.json` and `suite_summary.txt` next to the artifacts.
pub fn run_suite(dir: &Path, opts: &RunOptions) -> anyhow::Result<SuiteReport> {
    let files = scenario_files(dir)?;
    if files.is_empty() {
        bail!("no scenarios in {}", dir.display());
    }
    let out = opts.out_dir.clone().unwrap_or_else(|| dir.to_path_buf());
    let parsed: Vec<_> = files.iter().map(|f| (f, ScenarioConfig::from_path(f))).collect();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (_, c) in &parsed {
        if let Ok(c) = c {
            *seen.entry(c.name.clone()).or_default() += 1;
        }
    }
    let entries: Vec<SuiteEntry> = parsed
        .par_iter()
        .map(|(path, cfg)| {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let cfg = match cfg {
                Ok(c) => c,
                Err(e) => return failed(stem, path, e.to_string()),
            };
            if seen[&cfg.name] > 1 {
                return failed(cfg.name.clone(), path, format!("scenario name {:?} is not unique in the suite", cfg.name));
            }
            match run_config(cfg, &out, opts.allow_imprecise) {
                Ok(o) => SuiteEntry {
                    id: o.name.clone(),
                    config: path.display().to_string(),
                    passed: o.passed(),
                    error: None,
                    metrics: metrics(&o.summary),
                    csv: Some(o.csv_path.display().to_string()),
                    checks: o.checks,
                },
                Err(e) => failed(cfg.name.clone(), path, format!("{e:#}")),
            }
        })
        .collect();
    let report = SuiteReport {
        version: env!("CARGO_PKG_VERSION").into(),
        passed: entries.iter().all(|e| e.passed),
        entries,
    };
    fs::create_dir_all(&out)?;
    fs::write(out.join("suite_report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    fs::write(out.join("suite_summary.txt"), summary_text(&report))?;
    Ok(report)
}

pub fn summary_text(report: &SuiteReport) -> String {
    let mut s = String::new();
    let pass = report.entries.iter().filter(|e| e.passed).count();
    let _ = writeln!(s, "qpst suite: {pass}/{} scenarios passed", report.entries.len());
    for e in &report.entries {
        let _ = writeln!(s, "{} {}", if e.passed { "PASS" } else { "FAIL" }, e.id);
        if let Some(err) = &e.error {
            let _ = writeln!(s, "    error: {err}");
        }
        for c in &e.checks {
            let _ = writeln!(s, "    {} {}: {}", if c.passed { "ok  " } else { "fail" }, c.name, c.detail);
        }
    }
    s
}
