//! CSV tables, run manifests and the plot script.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use airs_core::sim::{SampleRecord, SweepRow};
use airs_core::trajectory::Trajectory;
use airs_core::ScenarioConfig;
use anyhow::{Context, Result};
use toml::{Table, Value};

use crate::config_file::config_table;

fn num(x: f64) -> String {
    // Rust float formatting ignores the locale and round-trips
    format!("{x:?}")
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rates(path: &Path, samples: &[SampleRecord]) -> Result<()> {
    write_rows(
        path,
        &["n", "gammaB", "gammaE", "rate_raw", "rate_clamped", "gammaB_ub", "gammaE_ub"],
        samples.iter().enumerate().map(|(i, s)| {
            vec![
                (i + 1).to_string(),
                num(s.gamma_b),
                num(s.gamma_e),
                num(s.rate_raw),
                num(s.rate_clamped),
                num(s.gamma_b_ub),
                num(s.gamma_e_ub),
            ]
        }),
    )
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_rows(
        path,
        &["param_value", "mean", "ci_low", "ci_high", "trials"],
        rows.iter().map(|r| {
            vec![
                num(r.value),
                num(r.result.mean),
                num(r.result.ci_low),
                num(r.result.ci_high),
                r.result.trials.to_string(),
            ]
        }),
    )
}

pub fn write_trajectory(path: &Path, t: &Trajectory) -> Result<()> {
    write_rows(
        path,
        &["n", "x", "y", "z", "displacement", "epsilon_used", "ring_radius"],
        t.waypoints.iter().enumerate().map(|(i, w)| {
            vec![
                (i + 1).to_string(),
                num(w.position.x),
                num(w.position.y),
                num(w.position.z),
                num(w.displacement),
                w.ring.map_or(String::new(), |r| num(r.epsilon)),
                w.ring.map_or(String::new(), |r| num(r.radius)),
            ]
        }),
    )
}

/// Resolved configuration plus a `[run]` table describing the invocation.
pub fn write_manifest(dir: &Path, cfg: &ScenarioConfig, command: &str, extra: &[(&str, Value)]) -> Result<()> {
    let mut table = config_table(cfg);
    let mut run = Table::new();
    run.insert("command".into(), Value::String(command.into()));
    run.insert("seed".into(), Value::String(cfg.seed.to_string()));
    run.insert("out".into(), Value::String(dir.display().to_string()));
    run.insert("version".into(), Value::String(env!("CARGO_PKG_VERSION").into()));
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    run.insert("timestamp_unix".into(), Value::Integer(secs as i64));
    for (k, v) in extra {
        run.insert((*k).into(), v.clone());
    }
    table.insert("run".into(), Value::Table(run));
    let path = dir.join("manifest.toml");
    fs::write(&path, toml::to_string(&table)?).with_context(|| format!("writing {}", path.display()))
}

const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
"""Static figures from the CSV files in this directory."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))


def load(name):
    path = os.path.join(here, name)
    if not os.path.exists(path):
        return None
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return {k: [float(r[k]) if r[k] else float("nan") for r in rows] for k in rows[0]} if rows else None


made = []
rates = load("rates.csv")
if rates:
    fig, ax = plt.subplots()
    ax.plot(rates["n"], rates["rate_clamped"], label="clamped")
    ax.plot(rates["n"], rates["rate_raw"], label="raw", alpha=0.6)
    ax.set_xlabel("sample n")
    ax.set_ylabel("secrecy rate (bit/s/Hz)")
    ax.legend()
    fig.savefig(os.path.join(here, "rates.png"), dpi=150)
    made.append("rates.png")

sweep = load("sweep.csv")
if sweep:
    fig, ax = plt.subplots()
    lo = [m - l for m, l in zip(sweep["mean"], sweep["ci_low"])]
    hi = [h - m for m, h in zip(sweep["mean"], sweep["ci_high"])]
    ax.errorbar(sweep["param_value"], sweep["mean"], yerr=[lo, hi], marker="o", capsize=3)
    ax.set_xlabel(sys.argv[1] if len(sys.argv) > 1 else "parameter")
    ax.set_ylabel("average secrecy rate (bit/s/Hz)")
    fig.savefig(os.path.join(here, "sweep.png"), dpi=150)
    made.append("sweep.png")

traj = load("trajectory.csv")
if traj:
    fig, ax = plt.subplots()
    ax.plot(traj["x"], traj["y"])
    ax.plot(traj["x"][:1], traj["y"][:1], "go", label="start")
    ax.plot(traj["x"][-1:], traj["y"][-1:], "rs", label="end")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend()
    fig.savefig(os.path.join(here, "trajectory.png"), dpi=150)
    made.append("trajectory.png")

print("wrote", ", ".join(made) if made else "nothing")
"#;

pub fn write_plot_script(dir: &Path) -> Result<()> {
    let path = dir.join("plot.py");
    fs::write(&path, PLOT_SCRIPT).with_context(|| format!("writing {}", path.display()))
}
