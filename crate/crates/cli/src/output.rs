//! CSV rows and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use heatlid::estimator::BetaCurve;
use serde::Serialize;

/// Shortest round-trip decimal in scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn coords(z: &[f64]) -> String {
    z.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";")
}

/// `t,sqrt_t,x_coords,log_rho,beta,bias,diverged,w_0..w_{k-1}`, points in
/// the given order, times ascending within each point.
pub fn beta_curves_csv(curves: &[BetaCurve]) -> String {
    let k = curves
        .first()
        .and_then(|c| c.rows.first())
        .map_or(0, |r| r.responsibilities.len());
    let mut out = String::from("t,sqrt_t,x_coords,log_rho,beta,bias,diverged");
    for i in 0..k {
        let _ = write!(out, ",w_{i}");
    }
    out.push('\n');
    for curve in curves {
        let x = coords(&curve.point);
        for row in &curve.rows {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{}",
                num(row.t),
                num(row.t.sqrt()),
                x,
                num(row.log_rho),
                num(row.beta),
                num(row.bias),
                row.diverged
            );
            for w in &row.responsibilities {
                let _ = write!(out, ",{}", num(*w));
            }
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub config: serde_json::Value,
    pub grid: serde_json::Value,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub version: &'static str,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, grid: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            arguments: std::env::args().skip(1).collect(),
            config,
            grid,
            seed: None,
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION"),
            duration_seconds: 0.0,
        }
    }
}

/// `<dir>/<stem>.manifest.json` next to `path`.
pub fn manifest_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    path.with_file_name(format!("{stem}.manifest.json"))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Writes the CSV and its sibling manifest.
pub fn write_csv_with_manifest(
    path: &Path,
    csv: &str,
    mut manifest: RunManifest,
    extra_outputs: &[&Path],
    elapsed: Duration,
) -> Result<()> {
    write_file(path, csv)?;
    manifest.outputs = std::iter::once(path)
        .chain(extra_outputs.iter().copied())
        .map(|p| p.display().to_string())
        .collect();
    manifest.duration_seconds = elapsed.as_secs_f64();
    let json = serde_json::to_string_pretty(&manifest)?;
    write_file(&manifest_path(path), &(json + "\n"))
}
