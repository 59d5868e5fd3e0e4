//! Scenario files, schema version 1.
//!
//! ```toml
//! schema = 1
//! name = "fig1a"
//!
//! [chain]
//! kind = "tunneling"      # or "pst"
//! n = 5
//! omega = 10.0            # sender/receiver frequency
//! Omega = 10010.0         # transmitter frequency (tunneling only)
//! lambda = 1.0            # end coupling; must be 1 when units = "scaled"
//! epsilon = 5000.0        # transmitter coupling ratio (tunneling only)
//! Gamma = 1e-3            # transmitter damping
//! units = "scaled"        # or "physical": rescaled by lambda on ingestion
//!
//! [initial]
//! mode = 1
//! alpha = 5.0             # number or [re, im]
//! transmitter_beta = 0.0
//!
//! [scan]
//! tau_min = 0.0
//! tau_max = 70000.0
//! samples = 2000
//! mode = "envelope"       # or "raw"
//! spacing = "linear"      # or "log"
//! exchange_window = [1.0, 70000.0]
//! allow_imprecise = false
//!
//! [outputs]
//! csv = "fig1a.csv"
//! summary = "fig1a.summary.json"
//! recurrence_panel = false
//!
//! [expect]
//! peak_p_ex_min = 0.95
//! tau_ex_min = 15707.96
//! tau_ex_max = 62831.85
//!
//! [[expect.window]]
//! quantity = "p_ex"
//! tau_min = 1990.0
//! tau_max = 2010.0
//! peak_max = 0.1
//! ```
//!
//! With `units = "physical"` the frequencies and `Gamma` are divided by
//! `lambda` and every time (scan window, expectation windows) is multiplied
//! by it, so all outputs are in scaled units `τ = λ t`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Tunneling,
    Pst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Scaled,
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Raw,
    #[default]
    Envelope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    PEx,
    PRec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(&self) -> Complex64 {
        match *self {
            ComplexValue::Real(x) => Complex64::new(x, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl Default for ComplexValue {
    fn default() -> Self {
        ComplexValue::Real(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub kind: ChainKind,
    pub n: usize,
    pub omega: f64,
    #[serde(rename = "Omega", default)]
    pub omega_mid: Option<f64>,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(rename = "Gamma", default)]
    pub gamma: f64,
    #[serde(default)]
    pub units: Units,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default = "first_mode")]
    pub mode: usize,
    pub alpha: ComplexValue,
    #[serde(default)]
    pub transmitter_beta: ComplexValue,
}

fn first_mode() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub tau_min: f64,
    pub tau_max: f64,
    pub samples: usize,
    #[serde(default)]
    pub mode: ScanMode,
    #[serde(default)]
    pub spacing: Spacing,
    #[serde(default)]
    pub exchange_window: Option<[f64; 2]>,
    #[serde(default)]
    pub allow_imprecise: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    pub csv: Option<String>,
    pub summary: Option<String>,
    #[serde(default)]
    pub recurrence_panel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowExpectation {
    pub quantity: Quantity,
    pub tau_min: f64,
    pub tau_max: f64,
    #[serde(default = "window_samples")]
    pub samples: usize,
    pub peak_min: Option<f64>,
    pub peak_max: Option<f64>,
}

fn window_samples() -> usize {
    2001
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub peak_p_ex_min: Option<f64>,
    pub peak_p_ex_max: Option<f64>,
    pub tau_ex_min: Option<f64>,
    pub tau_ex_max: Option<f64>,
    #[serde(default)]
    pub window: Vec<WindowExpectation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: u32,
    pub name: String,
    pub chain: ChainConfig,
    pub initial: InitialConfig,
    pub scan: ScanConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    #[serde(default)]
    pub expect: Expectations,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

/// Line of the `[table]` header, for diagnostics that serde cannot place.
fn table_line(text: &str, table: &str) -> Option<usize> {
    let header = format!("[{table}]");
    text.lines().position(|l| l.trim() == header).map(|i| i + 1)
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses and validates; `origin` labels diagnostics.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let schema = |message: String| ConfigError::Schema {
            path: origin.to_string(),
            message,
        };
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| schema(e.to_string().trim_end().to_string()))?;
        cfg.validate(text).map_err(schema)?;
        Ok(cfg)
    }

    fn validate(&self, text: &str) -> Result<(), String> {
        let at = |table: &str, msg: String| match table_line(text, table) {
            Some(l) => format!("line {l}: [{table}] {msg}"),
            None => format!("[{table}] {msg}"),
        };
        if self.schema != SCHEMA_VERSION {
            return Err(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema));
        }
        let c = &self.chain;
        if c.kind == ChainKind::Tunneling {
            if c.epsilon.is_none() {
                return Err(at("chain", "missing field `epsilon` (required for kind = \"tunneling\")".into()));
            }
            if c.omega_mid.is_none() {
                return Err(at("chain", "missing field `Omega` (required for kind = \"tunneling\")".into()));
            }
        } else {
            for (field, v) in [("epsilon", c.epsilon.is_some()), ("Omega", c.omega_mid.is_some())] {
                if v {
                    return Err(at("chain", format!("field `{field}` does not apply to kind = \"pst\"")));
                }
            }
        }
        if c.n < 2 {
            return Err(at("chain", format!("`n` must be >= 2, got {}", c.n)));
        }
        if !(c.lambda > 0.0) {
            return Err(at("chain", format!("`lambda` must be positive, got {}", c.lambda)));
        }
        if c.units == Units::Scaled && c.lambda != 1.0 {
            return Err(at("chain", format!("`lambda` must be 1 with units = \"scaled\", got {}", c.lambda)));
        }
        if c.gamma < 0.0 {
            return Err(at("chain", format!("`Gamma` must be >= 0, got {}", c.gamma)));
        }
        let m = self.initial.mode;
        if m == 0 || m > c.n {
            return Err(at("initial", format!("`mode` must lie in 1..={}, got {m}", c.n)));
        }
        let s = &self.scan;
        if !(s.tau_min >= 0.0 && s.tau_max > s.tau_min && s.tau_max.is_finite()) {
            return Err(at("scan", format!("need 0 <= tau_min < tau_max, got [{}, {}]", s.tau_min, s.tau_max)));
        }
        if s.samples < 2 {
            return Err(at("scan", format!("`samples` must be >= 2, got {}", s.samples)));
        }
        if s.spacing == Spacing::Log && s.tau_min <= 0.0 {
            return Err(at("scan", "log spacing needs tau_min > 0".into()));
        }
        if let Some([a, b]) = s.exchange_window {
            if !(a >= 0.0 && b > a) {
                return Err(at("scan", format!("`exchange_window` must satisfy 0 <= a < b, got [{a}, {b}]")));
            }
        }
        for w in &self.expect.window {
            if !(w.tau_max > w.tau_min && w.tau_min >= 0.0) || w.samples < 3 {
                return Err(at("expect", format!("bad window [{}, {}] with {} samples", w.tau_min, w.tau_max, w.samples)));
            }
        }
        Ok(())
    }

    /// Factor taking configured times to scaled `τ`.
    pub fn time_scale(&self) -> f64 {
        match self.chain.units {
            Units::Scaled => 1.0,
            Units::Physical => self.chain.lambda,
        }
    }

    /// Sample times in scaled units.
    pub fn taus(&self) -> Vec<f64> {
        let s = &self.scan;
        let k = self.time_scale();
        let (a, b) = (s.tau_min * k, s.tau_max * k);
        let last = (s.samples - 1) as f64;
        (0..s.samples)
            .map(|j| match s.spacing {
                Spacing::Linear => a + (b - a) * j as f64 / last,
                Spacing::Log => a * (b / a).powf(j as f64 / last),
            })
            .collect()
    }

    /// Exchange-time search window in scaled units.
    pub fn exchange_window(&self) -> (f64, f64) {
        let k = self.time_scale();
        let [a, b] = self.scan.exchange_window.unwrap_or([self.scan.tau_min, self.scan.tau_max]);
        (a * k, b * k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema = 1
name = "t"

[chain]
kind = "tunneling"
n = 3
omega = 1.0
Omega = 11.0
epsilon = 1.0

[initial]
alpha = 1.0

[scan]
tau_min = 0.0
tau_max = 10.0
samples = 11
"#;

    #[test]
    fn minimal_parses() {
        let c = ScenarioConfig::parse(MINIMAL, "t.toml").unwrap();
        assert_eq!(c.chain.gamma, 0.0);
        assert_eq!(c.scan.mode, ScanMode::Envelope);
        assert_eq!(c.taus()[10], 10.0);
        assert_eq!(c.initial.transmitter_beta.value(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn missing_epsilon_is_named() {
        let text = MINIMAL.replace("epsilon = 1.0\n", "");
        let err = ScenarioConfig::parse(&text, "t.toml").unwrap_err().to_string();
        assert!(err.contains("epsilon"), "{err}");
        assert!(err.contains("line 5"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let text = MINIMAL.replace("omega = 1.0", "omega = 1.0\nomgea = 2.0");
        let err = ScenarioConfig::parse(&text, "t.toml").unwrap_err().to_string();
        assert!(err.contains("omgea") && err.contains("line"), "{err}");
    }

    #[test]
    fn physical_units_rescale_time() {
        let text = MINIMAL
            .replace("epsilon = 1.0", "epsilon = 1.0\nlambda = 2.0\nunits = \"physical\"");
        let c = ScenarioConfig::parse(&text, "t.toml").unwrap();
        assert_eq!(c.taus()[10], 20.0);
        assert!(ScenarioConfig::parse(&MINIMAL.replace("epsilon = 1.0", "epsilon = 1.0\nlambda = 2.0"), "t").is_err());
    }

    #[test]
    fn log_spacing() {
        let text = MINIMAL.replace("tau_min = 0.0", "tau_min = 1.0").replace("samples = 11", "samples = 3\nspacing = \"log\"");
        let c = ScenarioConfig::parse(&text, "t.toml").unwrap();
        let t = c.taus();
        assert!((t[1] - 10f64.sqrt()).abs() < 1e-12);
    }
}
