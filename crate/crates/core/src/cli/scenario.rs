use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use ndarray::Array2;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ChainKind, Quantity, ScanMode, ScenarioConfig, Spacing, Units};
use crate::coherent::make_cat;
use crate::topology::{build_chain, build_general, build_pst_chain, scaled_params, ChainSpec, NetworkTopology};
use crate::transfer::{
    analytic_tau_ex, exchange_time_numeric, exchange_time_spectral, raw_peak_near, transfer_curve, ExchangeReport,
    SampleMode, TransferCurve, TransferScenario,
};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub allow_imprecise: bool,
    /// Where artifacts go; the config's directory when `None`.
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub name: String,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub curve: TransferCurve,
    pub summary: Value,
    pub checks: Vec<Check>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Network in scaled units (`λ = 1`).
pub fn build_network(cfg: &ScenarioConfig) -> anyhow::Result<NetworkTopology> {
    let c = &cfg.chain;
    let k = match c.units {
        Units::Scaled => 1.0,
        Units::Physical => c.lambda,
    };
    match c.kind {
        ChainKind::Tunneling => {
            let spec = ChainSpec {
                n: c.n,
                omega_end: c.omega,
                omega_mid: c.omega_mid.context("tunneling chain needs Omega")?,
                lambda_end: c.lambda,
                epsilon: c.epsilon.context("tunneling chain needs epsilon")?,
                gamma_mid: c.gamma,
            };
            Ok(build_chain(&spec.scaled()?)?)
        }
        ChainKind::Pst => {
            let ideal = build_pst_chain(c.n, 1.0, c.omega / k)?;
            let mut gamma = Array2::zeros((c.n, c.n));
            for m in 1..c.n - 1 {
                gamma[[m, m]] = c.gamma / k;
            }
            Ok(ideal.with_gamma(gamma)?)
        }
    }
}

fn scaled_spec(cfg: &ScenarioConfig) -> Option<ChainSpec> {
    let c = &cfg.chain;
    let spec = ChainSpec {
        n: c.n,
        omega_end: c.omega,
        omega_mid: c.omega_mid?,
        lambda_end: c.lambda,
        epsilon: c.epsilon?,
        gamma_mid: c.gamma,
    };
    spec.scaled().ok()
}

fn report_json(r: &ExchangeReport) -> Value {
    json!({
        "tau_ex": r.tau_ex,
        "peak_p": r.peak_p,
        "theta_corner": [r.theta_corner.re, r.theta_corner.im],
        "method": r.method.as_str(),
        "precise": r.precise,
    })
}

fn fmt_complex(z: num_complex::Complex64) -> String {
    format!("({}, {})", z.re, z.im)
}

fn header(cfg: &ScenarioConfig) -> String {
    let c = &cfg.chain;
    let s = &cfg.scan;
    let mut h = String::new();
    let _ = writeln!(h, "# qpst {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(h, "# scenario = {}", cfg.name);
    let _ = writeln!(h, "# schema = {}", cfg.schema);
    match c.units {
        Units::Scaled => {
            let _ = writeln!(h, "# units = scaled (tau = lambda t, frequencies in lambda)");
        }
        Units::Physical => {
            let _ = writeln!(
                h,
                "# units = physical, converted with lambda = {} (tau = lambda t, frequencies and Gamma divided by lambda)",
                c.lambda
            );
        }
    }
    let kind = match c.kind {
        ChainKind::Tunneling => "tunneling",
        ChainKind::Pst => "pst",
    };
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| x.to_string());
    let _ = writeln!(
        h,
        "# chain = {kind} n={} omega={} Omega={} lambda={} epsilon={} Gamma={}",
        c.n,
        c.omega,
        opt(c.omega_mid),
        c.lambda,
        opt(c.epsilon),
        c.gamma
    );
    let _ = writeln!(
        h,
        "# initial = mode={} alpha={} transmitter_beta={}",
        cfg.initial.mode,
        fmt_complex(cfg.initial.alpha.value()),
        fmt_complex(cfg.initial.transmitter_beta.value())
    );
    let mode = match s.mode {
        ScanMode::Raw => "raw",
        ScanMode::Envelope => "envelope",
    };
    let spacing = match s.spacing {
        Spacing::Linear => "linear",
        Spacing::Log => "log",
    };
    let _ = writeln!(h, "# scan = tau_min={} tau_max={} samples={}", s.tau_min, s.tau_max, s.samples);
    let _ = writeln!(h, "# mode = {mode}");
    let _ = writeln!(h, "# spacing = {spacing}");
    let _ = writeln!(h, "# recurrence_panel = {}", cfg.outputs.recurrence_panel);
    let _ = writeln!(h, "# precision_flag = 1 where the accumulated phase exceeds the double-precision budget");
    h
}

fn write_csv(path: &Path, cfg: &ScenarioConfig, curve: &TransferCurve) -> anyhow::Result<()> {
    let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    w.write_all(header(cfg).as_bytes())?;
    writeln!(w, "tau,p_ex,p_rec,precision_flag")?;
    for p in curve.points() {
        writeln!(w, "{:.16e},{:.16e},{:.16e},{}", p.tau, p.p_ex, p.p_rec, u8::from(!p.precise))?;
    }
    w.flush()?;
    Ok(())
}

fn bound_check(name: &str, value: Option<f64>, min: Option<f64>, max: Option<f64>, checks: &mut Vec<Check>) {
    if min.is_none() && max.is_none() {
        return;
    }
    let Some(v) = value else {
        checks.push(Check {
            name: name.into(),
            passed: false,
            detail: "not available".into(),
        });
        return;
    };
    let ok = min.is_none_or(|m| v >= m) && max.is_none_or(|m| v <= m);
    let range = format!(
        "[{}, {}]",
        min.map_or("-inf".into(), |m| m.to_string()),
        max.map_or("inf".into(), |m| m.to_string())
    );
    checks.push(Check {
        name: name.into(),
        passed: ok,
        detail: format!("{v} in {range}"),
    });
}

/// Loads `path` and runs it.
pub fn run_scenario(path: &Path, opts: &RunOptions) -> anyhow::Result<ScenarioOutcome> {
    let cfg = ScenarioConfig::from_path(path)?;
    let dir = match &opts.out_dir {
        Some(d) => d.clone(),
        None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    run_config(&cfg, &dir, opts.allow_imprecise)
}

/// Runs a parsed scenario, writing its CSV and summary into `out_dir`.
pub fn run_config(cfg: &ScenarioConfig, out_dir: &Path, allow_imprecise: bool) -> anyhow::Result<ScenarioOutcome> {
    let start = Instant::now();
    let allow_imprecise = allow_imprecise || cfg.scan.allow_imprecise;
    let topo = build_network(cfg)?;
    let gen = build_general(&topo);
    let n = cfg.chain.n;
    let sender = cfg.initial.mode;
    let receiver = n + 1 - sender;
    let initial = make_cat(n, sender, cfg.initial.alpha.value(), cfg.initial.transmitter_beta.value())?;
    let scenario = TransferScenario::new(&gen, initial, sender, receiver)?;
    let mode = match cfg.scan.mode {
        ScanMode::Raw => SampleMode::Raw,
        ScanMode::Envelope => SampleMode::Envelope,
    };
    let curve = transfer_curve(&scenario, &cfg.taus(), mode)?;

    let window = cfg.exchange_window();
    let numeric = exchange_time_numeric(&gen, window, 1e-12);
    let spectral = gen.is_ideal().then(|| exchange_time_spectral(&gen, window));
    let (analytic, flags) = match cfg.chain.kind {
        ChainKind::Tunneling => {
            let spec = scaled_spec(cfg).context("tunneling chain spec")?;
            let params = scaled_params(&spec)?;
            let est = analytic_tau_ex(n, &params, spec.epsilon)?;
            (
                json!({ "tau_ex": est.tau_ex, "warnings": est.warnings }),
                json!({
                    "mu": params.mu,
                    "eta": params.eta,
                    "varpi": params.varpi,
                    "mu_small": params.flags.mu_small,
                    "eta_small": params.flags.eta_small,
                    "eps_mu_sq_small": params.flags.eps_mu_sq_small,
                }),
            )
        }
        ChainKind::Pst => (
            json!({ "tau_ex": std::f64::consts::FRAC_PI_2, "warnings": [] }),
            Value::Null,
        ),
    };

    let imprecise_points = curve.precise.iter().filter(|p| !**p).count();
    let numeric_imprecise = matches!(&numeric, Ok(r) if !r.precise);
    if !allow_imprecise && (imprecise_points > 0 || numeric_imprecise) {
        bail!(
            "scenario {}: {} samples exceed the phase budget{}; rerun with --allow-imprecise to keep them",
            cfg.name,
            imprecise_points,
            if numeric_imprecise { " (exchange time too)" } else { "" }
        );
    }

    let mut checks = Vec::new();
    let e = &cfg.expect;
    let peak = curve.peak_ex();
    bound_check("peak_p_ex", peak.map(|p| p.p_ex), e.peak_p_ex_min, e.peak_p_ex_max, &mut checks);
    bound_check(
        "tau_ex",
        numeric.as_ref().ok().map(|r| r.tau_ex),
        e.tau_ex_min.map(|t| t * cfg.time_scale()),
        e.tau_ex_max.map(|t| t * cfg.time_scale()),
        &mut checks,
    );
    let mut windows = Vec::new();
    for w in &e.window {
        let k = cfg.time_scale();
        let (a, b) = (w.tau_min * k, w.tau_max * k);
        let rec = w.quantity == Quantity::PRec;
        let label = format!("{}_peak[{}, {}]", if rec { "p_rec" } else { "p_ex" }, a, b);
        match raw_peak_near(&scenario, 0.5 * (a + b), 0.5 * (b - a), w.samples, rec) {
            Ok(p) => {
                let v = if rec { p.p_rec } else { p.p_ex };
                windows.push(json!({ "label": label, "tau": p.tau, "peak": v, "precise": p.precise }));
                bound_check(&label, Some(v), w.peak_min, w.peak_max, &mut checks);
            }
            Err(err) => checks.push(Check {
                name: label,
                passed: false,
                detail: err.to_string(),
            }),
        }
    }

    fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let csv_path = out_dir.join(cfg.outputs.csv.clone().unwrap_or_else(|| format!("{}.csv", cfg.name)));
    let summary_path = out_dir.join(
        cfg.outputs
            .summary
            .clone()
            .unwrap_or_else(|| format!("{}.summary.json", cfg.name)),
    );
    write_csv(&csv_path, cfg, &curve)?;

    let peak_rec = curve.points().fold(None::<crate::transfer::TransferPoint>, |b, p| match b {
        Some(q) if q.p_rec >= p.p_rec => Some(q),
        _ => Some(p),
    });
    let passed = checks.iter().all(|c| c.passed);
    let summary = json!({
        "name": cfg.name,
        "schema": cfg.schema,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "time_scale": cfg.time_scale(),
        "tau_ex": {
            "numeric": numeric.as_ref().map(report_json).unwrap_or_else(|e| json!({ "error": e.to_string() })),
            "spectral": match &spectral {
                None => Value::Null,
                Some(Ok(r)) => report_json(r),
                Some(Err(e)) => json!({ "error": e.to_string() }),
            },
            "analytic": analytic,
        },
        "regime": flags,
        "peak_p_ex": peak.map(|p| json!({ "tau": p.tau, "p_ex": p.p_ex })),
        "peak_p_rec": peak_rec.map(|p| json!({ "tau": p.tau, "p_rec": p.p_rec })),
        "windows": windows,
        "samples": curve.len(),
        "imprecise_samples": imprecise_points,
        "checks": checks,
        "passed": passed,
        "runtime_s": start.elapsed().as_secs_f64(),
        "csv": csv_path.file_name().map(|f| f.to_string_lossy().into_owned()),
    });
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)? + "\n")
        .with_context(|| format!("cannot write {}", summary_path.display()))?;

    Ok(ScenarioOutcome {
        name: cfg.name.clone(),
        csv_path,
        summary_path,
        curve,
        summary,
        checks,
    })
}
