use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// One point of a swept curve. Missing values are written as empty fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub x: f64,
    pub analytic: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub trials: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThroughputRow {
    pub x: f64,
    pub cellular: f64,
    pub d2d: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub mode: String,
    pub analytic: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub trials: Option<u64>,
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn coverage_plot_script(csvs: &[(String, PathBuf)]) -> String {
    let files: Vec<String> = csvs
        .iter()
        .map(|(mode, p)| format!("    ({mode:?}, {:?}),", p.file_name().unwrap_or_default().to_string_lossy()))
        .collect();
    format!(
        r#"#!/usr/bin/env python3
# Coverage probability against SINR threshold; run next to the CSV files.
import csv
import os
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CURVES = [
{}
]

def column(rows, key):
    return [float(r[key]) if r[key] else float("nan") for r in rows]

fig, ax = plt.subplots(figsize=(6, 4))
for mode, name in CURVES:
    with open(os.path.join(HERE, name)) as f:
        rows = list(csv.DictReader(f))
    x = column(rows, "x")
    line, = ax.plot(x, column(rows, "analytic"), label=f"{{mode}} analytic")
    ax.errorbar(x, column(rows, "mc_mean"), yerr=column(rows, "mc_stderr"), fmt="o",
                color=line.get_color(), label=f"{{mode}} simulation")
ax.set_xlabel("SINR threshold (dB)")
ax.set_ylabel("coverage probability")
ax.set_ylim(0, 1)
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, "coverage.pdf"))
"#,
        files.join("\n")
    )
}

pub fn throughput_plot_script(csv_name: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
# Sum throughput and its cellular and D2D parts against the bias factor.
import csv
import os
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(HERE, {csv_name:?})) as f:
    rows = list(csv.DictReader(f))
k = [float(r["x"]) for r in rows]

fig, ax = plt.subplots(figsize=(6, 4))
for key, style in (("total", "-o"), ("cellular", "--s"), ("d2d", ":^")):
    ax.plot(k, [float(r[key]) for r in rows], style, label=key)
ax.set_xlabel("bias factor k")
ax.set_ylabel("throughput (nats/s/Hz/m²)")
ax.set_yscale("log")
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, "throughput.pdf"))
"#
    )
}
