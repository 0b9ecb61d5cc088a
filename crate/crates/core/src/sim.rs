//! Per-sample pipeline, Monte-Carlo averaging and parameter sweeps.
//!
//! Each sample moves the UAV along the planned path, draws fresh fading,
//! builds the channels, co-phases the surface toward Bob, picks the sensor
//! weights and evaluates both the achieved rates and their closed-form
//! ceilings. The path depends only on the scenario, so it is planned once
//! and shared by every trial.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::beamform::{
    effective_row, mrt_weights, quadratic_form, rank1_phase_vector, reflection_phases, secrecy_rate, snr_from_row,
    weights_scheme2,
};
use crate::bounds::evaluate_bounds;
use crate::channel::{cis, ChannelSet, FadingDraw};
use crate::config::{db_to_linear, ScenarioConfig, Scheme};
use crate::error::{Error, Result};
use crate::geometry::{place_sensors_with, unit_vector, IrsGrid, Vec3};
use crate::trajectory::{plan_trajectory, Trajectory};

/// Environment variable capping the Monte-Carlo worker count.
pub const THREADS_ENV: &str = "AIRS_SIM_THREADS";

/// Secrecy of a candidate UAV position with every sensor at Alice's center,
/// mean fading and the co-phased surface.
///
/// Collapsing the field makes the per-sensor channels identical, so Bob sees
/// the full array gain `K` and Eve the coherence sum of the surface steered
/// at Bob but observed from her direction.
#[derive(Debug, Clone)]
pub struct PlannerObjective {
    omega_a: Vec3,
    omega_b: Vec3,
    omega_e: Vec3,
    grid: IrsGrid,
    sensors: f64,
    scale_b: f64,
    scale_e: f64,
}

impl PlannerObjective {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        let grid = cfg.grid()?;
        let rho2 = cfg.rho0 * cfg.rho0;
        Ok(PlannerObjective {
            omega_a: cfg.omega_a,
            omega_b: cfg.omega_b,
            omega_e: cfg.omega_e,
            grid,
            sensors: cfg.sensors as f64,
            scale_b: cfg.power / cfg.sigma_b2 * rho2,
            scale_e: cfg.power / cfg.sigma_e2 * rho2,
        })
    }

    fn axis_sum(n: usize, step: f64) -> Complex64 {
        (0..n).map(|i| cis(i as f64 * step)).sum()
    }

    /// Coherence of the surface toward Eve.
    pub fn zeta(&self, q: Vec3) -> Option<Complex64> {
        let to_b = unit_vector(q, self.omega_b).ok()?;
        let to_e = unit_vector(q, self.omega_e).ok()?;
        let sx = self.grid.dbar_x() * (to_b.x - to_e.x);
        let sy = self.grid.dbar_y() * (to_b.y - to_e.y);
        Some(Self::axis_sum(self.grid.kx, sx) * Self::axis_sum(self.grid.ky, sy))
    }

    /// Mean-fading SNRs `(γ_B, γ_E)` at `q`.
    pub fn snrs(&self, q: Vec3) -> Option<(f64, f64)> {
        let zeta = self.zeta(q)?;
        let d_ar2 = q.distance(self.omega_a).powi(2);
        let d_rb2 = q.distance(self.omega_b).powi(2);
        let d_re2 = q.distance(self.omega_e).powi(2);
        let k = self.grid.len() as f64;
        let gb = self.scale_b * self.sensors * k * k / (d_rb2 * d_ar2);
        let ge = self.scale_e * self.sensors * zeta.norm_sqr() / (d_re2 * d_ar2);
        Some((gb, ge))
    }

    /// Raw secrecy rate at `q`; `-∞` where a link is singular.
    pub fn eval(&self, q: Vec3) -> f64 {
        match self.snrs(q) {
            Some((gb, ge)) => secrecy_rate(gb, ge).raw,
            None => f64::NEG_INFINITY,
        }
    }
}

/// Rates and ceilings of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleRecord {
    pub gamma_b: f64,
    pub gamma_e: f64,
    pub rate_raw: f64,
    pub rate_clamped: f64,
    pub gamma_b_ub: f64,
    pub gamma_e_ub: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub seed: u64,
    pub samples: Vec<SampleRecord>,
}

impl TrialResult {
    /// Time average of the clamped secrecy rate.
    pub fn mean_clamped(&self) -> f64 {
        mean(self.samples.iter().map(|s| s.rate_clamped))
    }

    pub fn mean_raw(&self) -> f64 {
        mean(self.samples.iter().map(|s| s.rate_raw))
    }
}

fn mean(it: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = it.len();
    if n == 0 {
        return 0.0;
    }
    it.sum::<f64>() / n as f64
}

/// Everything needed to run trials of one configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub grid: IrsGrid,
    pub trajectory: Trajectory,
}

impl Scenario {
    /// Validates `config` and plans the flight, or parks the surface for the
    /// fixed scheme.
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        let plan = config.flight_plan()?;
        let trajectory = match config.scheme {
            Scheme::Fixed => Trajectory::stationary(config.fixed_location(), plan.samples),
            Scheme::One | Scheme::Two => {
                let objective = PlannerObjective::new(&config)?;
                plan_trajectory(&plan, config.omega_a, config.omega_b, |q| objective.eval(q))?
            }
        };
        Ok(Scenario {
            config,
            grid,
            trajectory,
        })
    }

    /// Same configuration flown along a given path.
    pub fn with_trajectory(config: ScenarioConfig, trajectory: Trajectory) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        Ok(Scenario {
            config,
            grid,
            trajectory,
        })
    }

    /// One Monte-Carlo trial: a sensor field, then one fading draw per
    /// sample, all from `seed`.
    pub fn run_trial(&self, seed: u64) -> Result<TrialResult> {
        let cfg = &self.config;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = place_sensors_with(cfg.omega_a, cfg.radius, cfg.sensors, &mut rng)?;
        let mut samples = Vec::with_capacity(self.trajectory.len());
        for uav in self.trajectory.positions() {
            let fading = FadingDraw::sample(cfg.rho0, cfg.shared_fading, &mut rng);
            let ch = ChannelSet::build(&field, uav, cfg.omega_b, cfg.omega_e, &self.grid, fading)?;
            samples.push(self.evaluate(&ch)?);
        }
        Ok(TrialResult { seed, samples })
    }

    /// Reflection design, weights, rates and ceilings for one channel draw.
    pub fn evaluate(&self, ch: &ChannelSet) -> Result<SampleRecord> {
        let cfg = &self.config;
        let u_g = rank1_phase_vector(&ch.sensors.phi_g);
        let refl = reflection_phases(&ch.bob.u, &u_g, 0.0)?;
        let row_b = effective_row(&ch.bob.h, &refl.theta, &ch.sensors.g)?;
        let row_e = effective_row(&ch.eve.h, &refl.theta, &ch.sensors.g)?;
        let bf = match cfg.scheme {
            Scheme::One => mrt_weights(&row_b, cfg.power)?,
            Scheme::Two | Scheme::Fixed => weights_scheme2(
                &quadratic_form(&row_b, cfg.sigma_b2),
                &quadratic_form(&row_e, cfg.sigma_e2),
                cfg.power,
            )?,
        };
        let gamma_b = snr_from_row(&row_b, &bf.weights, cfg.sigma_b2)?;
        let gamma_e = snr_from_row(&row_e, &bf.weights, cfg.sigma_e2)?;
        let rate = secrecy_rate(gamma_b, gamma_e);
        let bounds = evaluate_bounds(ch, &self.grid, &refl, cfg.power, cfg.sigma_b2, cfg.sigma_e2);
        Ok(SampleRecord {
            gamma_b,
            gamma_e,
            rate_raw: rate.raw,
            rate_clamped: rate.clamped,
            gamma_b_ub: bounds.gamma_b_ub,
            gamma_e_ub: bounds.gamma_e_ub,
        })
    }
}

/// Plans and runs one trial of `config`.
pub fn run_scenario(config: &ScenarioConfig, seed: u64) -> Result<TrialResult> {
    Scenario::new(config.clone())?.run_trial(seed)
}

/// Stationary surface at the fixed location, scheme-2 weights.
pub fn fixed_irs_baseline(config: &ScenarioConfig, seed: u64) -> Result<TrialResult> {
    let cfg = ScenarioConfig {
        scheme: Scheme::Fixed,
        ..config.clone()
    };
    run_scenario(&cfg, seed)
}

/// Seed of trial `index` under `master`: the first word of ChaCha stream
/// `index`, so trials never share randomness.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Trial averages and their spread.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub trials: usize,
    /// Clamped time average of every trial, in trial order.
    pub trial_means: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_raw: f64,
    /// Per-sample averages across trials.
    pub per_sample: Vec<SampleRecord>,
}

impl AggregateResult {
    pub fn from_trials(results: &[TrialResult]) -> Self {
        let trials = results.len();
        let trial_means: Vec<f64> = results.iter().map(TrialResult::mean_clamped).collect();
        let m = mean(trial_means.iter().copied());
        let std_dev = if trials > 1 {
            (trial_means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt()
        } else {
            0.0
        };
        let half = 1.96 * std_dev / (trials.max(1) as f64).sqrt();
        let n = results.first().map_or(0, |r| r.samples.len());
        let per_sample = (0..n)
            .map(|i| {
                let mut acc = SampleRecord::default();
                for r in results {
                    let s = &r.samples[i];
                    acc.gamma_b += s.gamma_b;
                    acc.gamma_e += s.gamma_e;
                    acc.rate_raw += s.rate_raw;
                    acc.rate_clamped += s.rate_clamped;
                    acc.gamma_b_ub += s.gamma_b_ub;
                    acc.gamma_e_ub += s.gamma_e_ub;
                }
                let t = trials as f64;
                SampleRecord {
                    gamma_b: acc.gamma_b / t,
                    gamma_e: acc.gamma_e / t,
                    rate_raw: acc.rate_raw / t,
                    rate_clamped: acc.rate_clamped / t,
                    gamma_b_ub: acc.gamma_b_ub / t,
                    gamma_e_ub: acc.gamma_e_ub / t,
                }
            })
            .collect();
        AggregateResult {
            trials,
            mean: m,
            std_dev,
            ci_low: m - half,
            ci_high: m + half,
            mean_raw: mean(results.iter().map(TrialResult::mean_raw)),
            trial_means,
            per_sample,
        }
    }

    /// Width of the 95 % interval.
    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

fn worker_limit() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Runs `trials` independent trials on the rayon pool; the result does not
/// depend on scheduling.
pub fn run_trials(scenario: &Scenario, master_seed: u64, trials: usize) -> Result<Vec<TrialResult>> {
    if trials == 0 {
        return Err(Error::config("trials", "at least one trial is required"));
    }
    let work = || {
        (0..trials)
            .into_par_iter()
            .map(|i| scenario.run_trial(trial_seed(master_seed, i)))
            .collect::<Result<Vec<_>>>()
    };
    match worker_limit() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(THREADS_ENV, e.to_string()))?
            .install(work),
        None => work(),
    }
}

pub fn monte_carlo(scenario: &Scenario, master_seed: u64, trials: usize) -> Result<AggregateResult> {
    Ok(AggregateResult::from_trials(&run_trials(scenario, master_seed, trials)?))
}

/// Quantity varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Flight time `T` in seconds.
    FlightTime,
    /// Transmit power in dBm.
    Power,
    /// Bob-to-Eve distance in meters.
    Distance,
    /// Element count `K`, a perfect square.
    Elements,
    /// Sensor disk radius in meters.
    Radius,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::FlightTime => "T",
            SweepParam::Power => "P",
            SweepParam::Distance => "distance",
            SweepParam::Elements => "K",
            SweepParam::Radius => "r",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        match self {
            SweepParam::FlightTime => cfg.total_time = value,
            SweepParam::Power => cfg.power = db_to_linear(value),
            SweepParam::Distance => cfg.set_eve_distance(value),
            SweepParam::Elements => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::config("K", format!("{value} is not a positive integer")));
                }
                cfg.set_elements(value as usize)?;
            }
            SweepParam::Radius => cfg.radius = value,
        }
        Ok(cfg)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T" | "time" => Ok(SweepParam::FlightTime),
            "P" | "power" => Ok(SweepParam::Power),
            "distance" | "d_BE" | "dist" => Ok(SweepParam::Distance),
            "K" => Ok(SweepParam::Elements),
            "r" | "radius" => Ok(SweepParam::Radius),
            other => Err(Error::config(
                "param",
                format!("unknown sweep parameter `{other}` (expected T, P, distance, K or r)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub result: AggregateResult,
}

/// One aggregate per value. Every value reuses the same trial seeds.
pub fn sweep(
    base: &ScenarioConfig,
    param: SweepParam,
    values: &[f64],
    trials: usize,
    master_seed: u64,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::config("values", "at least one value is required"));
    }
    values
        .iter()
        .map(|&value| {
            let scenario = Scenario::new(param.apply(base, value)?)?;
            Ok(SweepRow {
                value,
                result: monte_carlo(&scenario, master_seed, trials)?,
            })
        })
        .collect()
}
