use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use airs_core::sim::{monte_carlo, sweep, Scenario, SweepParam};
use airs_core::validate::run_suite;
use airs_core::{ScenarioConfig, Scheme};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use toml::Value;

mod config_file;
mod output;

/// Secure sensor data collection through a UAV-carried reflecting surface.
#[derive(Parser, Debug)]
#[command(name = "airs-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte-Carlo run of one scenario; writes rates.csv.
    Run(Common),
    /// Average secrecy over a list of parameter values; writes sweep.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of T, P (dBm), distance, K, r.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
    },
    /// Planned UAV path; writes trajectory.csv.
    Trajectory(Common),
    /// Runs the invariant suite; exits nonzero on any failure.
    Validate(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file with flat `key = value` entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// 1, 2 or fixed.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write plot.py next to the CSV files.
    #[arg(long)]
    emit_plot: bool,
}

impl Common {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                config_file::parse_config(&body).with_context(|| format!("in {}", path.display()))?
            }
            None => ScenarioConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = self.scheme {
            cfg.scheme = s;
        }
        cfg.validate()?;
        for w in cfg.warnings() {
            eprintln!("warning: {w}");
        }
        Ok(cfg)
    }

    fn out_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(&self.out)
    }

    fn finish(&self, dir: &Path) -> Result<()> {
        if self.emit_plot {
            output::write_plot_script(dir)?;
        }
        Ok(())
    }
}

fn run(common: &Common) -> Result<()> {
    let cfg = common.resolve()?;
    let dir = common.out_dir()?;
    let scenario = Scenario::new(cfg.clone())?;
    let agg = monte_carlo(&scenario, cfg.seed, cfg.trials)?;
    output::write_rates(&dir.join("rates.csv"), &agg.per_sample)?;
    output::write_manifest(dir, &cfg, "run", &[])?;
    common.finish(dir)?;
    println!(
        "scheme {}: mean secrecy {:.6} bit/s/Hz, 95% CI [{:.6}, {:.6}] over {} trials",
        cfg.scheme, agg.mean, agg.ci_low, agg.ci_high, agg.trials
    );
    Ok(())
}

fn run_sweep(common: &Common, param: &str, values: &[f64]) -> Result<()> {
    let cfg = common.resolve()?;
    let param: SweepParam = param.parse()?;
    let dir = common.out_dir()?;
    let rows = sweep(&cfg, param, values, cfg.trials, cfg.seed)?;
    output::write_sweep(&dir.join("sweep.csv"), &rows)?;
    output::write_manifest(
        dir,
        &cfg,
        "sweep",
        &[
            ("param", Value::String(param.name().into())),
            ("values", Value::Array(values.iter().map(|&v| Value::Float(v)).collect())),
        ],
    )?;
    common.finish(dir)?;
    for r in &rows {
        println!(
            "{} = {}: {:.6} [{:.6}, {:.6}]",
            param, r.value, r.result.mean, r.result.ci_low, r.result.ci_high
        );
    }
    Ok(())
}

fn trajectory(common: &Common) -> Result<()> {
    let cfg = common.resolve()?;
    let dir = common.out_dir()?;
    let scenario = Scenario::new(cfg.clone())?;
    output::write_trajectory(&dir.join("trajectory.csv"), &scenario.trajectory)?;
    output::write_manifest(dir, &cfg, "trajectory", &[])?;
    common.finish(dir)?;
    println!("{} samples, final position {}", scenario.trajectory.len(), scenario.trajectory.last());
    Ok(())
}

fn validate(common: &Common) -> Result<bool> {
    let cfg = common.resolve()?;
    let checks = run_suite(&cfg, cfg.trials)?;
    let mut ok = true;
    for c in &checks {
        println!("[{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(c) => run(c).map(|_| true),
        Command::Sweep { common, param, values } => run_sweep(common, param, values).map(|_| true),
        Command::Trajectory(c) => trajectory(c).map(|_| true),
        Command::Validate(c) => validate(c),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
