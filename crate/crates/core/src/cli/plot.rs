use std::fs;
use std::path::{Component, Path, PathBuf};

use anyhow::{bail, Context};

/// `# key = value` lines of the CSV header block.
fn header_value(text: &str, key: &str) -> Option<String> {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l.trim_start_matches('#').split_once('='))
        .find(|(k, _)| k.trim() == key)
        .map(|(_, v)| v.trim().to_string())
}

fn relative(from_dir: &Path, target: &Path) -> PathBuf {
    let from: Vec<Component> = from_dir.components().collect();
    let to: Vec<Component> = target.components().collect();
    let common = from.iter().zip(&to).take_while(|(a, b)| a == b).count();
    let mut out = PathBuf::new();
    for _ in common..from.len() {
        out.push("..");
    }
    for c in &to[common..] {
        out.push(c.as_os_str());
    }
    out
}

/// Writes `<stem>_plot.py` (into `out_dir`, or next to the CSV) and
/// returns its path. Log spacing in the header switches the τ axis to log
/// scale; `recurrence_panel = true` adds a `p_rec` panel.
pub fn emit_plot_script(csv: &Path, out_dir: Option<&Path>) -> anyhow::Result<PathBuf> {
    if !csv.is_file() {
        bail!("no such CSV: {}", csv.display());
    }
    let text = fs::read_to_string(csv).with_context(|| format!("cannot read {}", csv.display()))?;
    if !text.lines().any(|l| l.trim() == "tau,p_ex,p_rec,precision_flag") {
        bail!("{} is not a transfer curve (missing column header)", csv.display());
    }
    let logx = header_value(&text, "spacing").is_some_and(|v| v == "log");
    let dual = header_value(&text, "recurrence_panel").is_some_and(|v| v == "true");
    let name = header_value(&text, "scenario").unwrap_or_else(|| "scenario".into());
    let csv_abs = fs::canonicalize(csv)?;
    let dir = match out_dir {
        Some(d) => {
            fs::create_dir_all(d)?;
            fs::canonicalize(d)?
        }
        None => csv_abs.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let rel = relative(&dir, &csv_abs);
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "curve".into());
    let script = format!(
        r##"#!/usr/bin/env python3
"""Plot for scenario {name}."""
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

HERE = Path(__file__).resolve().parent
CSV = HERE / {rel:?}
LOGX = {logx}
DUAL = {dual}

lines = CSV.read_text().splitlines()
start = next(i for i, line in enumerate(lines) if not line.startswith("#"))
data = np.genfromtxt(lines[start:], delimiter=",", names=True)
panels = 2 if DUAL else 1
fig, axes = plt.subplots(panels, 1, figsize=(7, 3.2 * panels), sharex=True, squeeze=False)
series = [("p_ex", r"$\mathcal{{P}}_{{ex}}(\tau)$"), ("p_rec", r"$\mathcal{{P}}_{{rec}}(\tau)$")]
for ax, (col, label) in zip(axes[:, 0], series[:panels]):
    ax.plot(data["tau"], data[col], lw=0.8)
    bad = data["precision_flag"] > 0
    if bad.any():
        ax.plot(data["tau"][bad], data[col][bad], "r.", ms=2, label="imprecise")
        ax.legend()
    ax.set_ylabel(label)
    ax.set_ylim(-0.02, 1.02)
    if LOGX:
        ax.set_xscale("log")
axes[-1, 0].set_xlabel(r"$\tau$")
axes[0, 0].set_title({name:?})
fig.tight_layout()
fig.savefig(HERE / "{stem}.png", dpi=150)
"##,
        rel = rel.to_string_lossy(),
        logx = if logx { "True" } else { "False" },
        dual = if dual { "True" } else { "False" },
    );
    let path = dir.join(format!("{stem}_plot.py"));
    fs::write(&path, script).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths() {
        assert_eq!(relative(Path::new("/a/b"), Path::new("/a/b/c.csv")), PathBuf::from("c.csv"));
        assert_eq!(relative(Path::new("/a/x"), Path::new("/a/b/c.csv")), PathBuf::from("../b/c.csv"));
    }

    #[test]
    fn header_lookup() {
        let t = "# spacing = log\n# recurrence_panel = true\ntau,p_ex,p_rec,precision_flag\n";
        assert_eq!(header_value(t, "spacing").as_deref(), Some("log"));
        assert_eq!(header_value(t, "missing"), None);
    }
}
