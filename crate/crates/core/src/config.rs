//! Scenario parameters with the reference defaults.
//!
//! Quantities quoted in dB or dBm are converted once with `10^(x/10)` and
//! stored linear.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{lemma1_limits, FlightPlan, IrsGrid, Vec3};

/// Eve position when her channel is weakly tied to Bob's.
pub const EVE_UNCORRELATED: Vec3 = Vec3::new(-100.0, 50.0, 0.0);
/// Eve position a few meters from Bob.
pub const EVE_CORRELATED: Vec3 = Vec3::new(75.0, 100.0, 0.0);
/// Reference gain at 1 m for the strong channel, in dB.
pub const RHO0_STRONG_DB: f64 = 120.0;
/// Reference gain at 1 m for the weak channel, in dB.
pub const RHO0_WEAK_DB: f64 = 60.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

/// How the sensors' transmit weights are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Maximum-ratio transmission toward Bob.
    One,
    /// Generalized-eigenvector secrecy maximizer.
    Two,
    /// Scheme 2 with the surface parked at the fixed location.
    Fixed,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::One => "1",
            Scheme::Two => "2",
            Scheme::Fixed => "fixed",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "scheme1" | "one" => Ok(Scheme::One),
            "2" | "scheme2" | "two" => Ok(Scheme::Two),
            "fixed" | "fix" | "fixed_irs" => Ok(Scheme::Fixed),
            other => Err(Error::config("scheme", format!("expected 1, 2 or fixed, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Number of sensors `M`.
    pub sensors: usize,
    pub omega_a: Vec3,
    pub omega_b: Vec3,
    pub omega_e: Vec3,
    pub omega_fixed: Vec3,
    /// Initial UAV position; its altitude is replaced by `altitude`.
    pub q_o: Vec3,
    pub altitude: f64,
    pub total_time: f64,
    pub speed: f64,
    pub alpha: f64,
    pub frequency: f64,
    pub kx: usize,
    pub ky: usize,
    /// Element spacing in wavelengths.
    pub spacing: f64,
    pub sigma_b2: f64,
    pub sigma_e2: f64,
    pub rho0: f64,
    pub power: f64,
    /// Radius of the sensor disk around `omega_a`.
    pub radius: f64,
    pub scheme: Scheme,
    pub seed: u64,
    pub trials: usize,
    /// Eve reuses Bob's fading draw.
    pub shared_fading: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            sensors: 4,
            omega_a: Vec3::new(0.0, -100.0, 0.0),
            omega_b: Vec3::new(80.0, 100.0, 0.0),
            omega_e: EVE_UNCORRELATED,
            omega_fixed: Vec3::new(80.0, 100.0, 0.0),
            q_o: Vec3::new(-100.0, 100.0, 100.0),
            altitude: 100.0,
            total_time: 300.0,
            speed: 3.0,
            alpha: 0.5,
            frequency: 900e6,
            kx: 4,
            ky: 4,
            spacing: 0.25,
            sigma_b2: db_to_linear(30.0),
            sigma_e2: db_to_linear(30.0),
            rho0: db_to_linear(RHO0_STRONG_DB),
            power: db_to_linear(1.0),
            radius: 1.0,
            scheme: Scheme::Two,
            seed: 1,
            trials: 200,
            shared_fading: false,
        }
    }
}

impl ScenarioConfig {
    /// Reference defaults with the weak channel.
    pub fn weak() -> Self {
        ScenarioConfig {
            rho0: db_to_linear(RHO0_WEAK_DB),
            ..Self::default()
        }
    }

    pub fn elements(&self) -> usize {
        self.kx * self.ky
    }

    /// Square surface with `k` elements; `k` must be a perfect square.
    pub fn set_elements(&mut self, k: usize) -> Result<()> {
        let side = (k as f64).sqrt().round() as usize;
        if k == 0 || side * side != k {
            return Err(Error::config("K", format!("{k} is not a positive perfect square; set Kx and Ky instead")));
        }
        self.kx = side;
        self.ky = side;
        Ok(())
    }

    /// Places Eve `distance` meters from Bob along the negative x axis.
    pub fn set_eve_distance(&mut self, distance: f64) {
        self.omega_e = self.omega_b + Vec3::new(-distance, 0.0, 0.0);
    }

    pub fn grid(&self) -> Result<IrsGrid> {
        IrsGrid::from_carrier(self.kx, self.ky, self.spacing, self.frequency)
    }

    pub fn start(&self) -> Vec3 {
        self.q_o.with_z(self.altitude)
    }

    pub fn flight_plan(&self) -> Result<FlightPlan> {
        FlightPlan::new(self.total_time, self.alpha, self.speed, self.altitude, self.start())
    }

    /// Surface location for the fixed baseline, lifted to the flight
    /// altitude so it never coincides with a ground node.
    pub fn fixed_location(&self) -> Vec3 {
        self.omega_fixed.with_z(self.altitude)
    }

    pub fn samples(&self) -> Result<usize> {
        Ok(self.flight_plan()?.samples)
    }

    /// Checks every field; the first violation names its field.
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(field, format!("must be positive, got {v}")))
            }
        };
        if self.sensors == 0 {
            return Err(Error::config("M", "at least one sensor is required"));
        }
        for (field, v) in [
            ("omega_A", self.omega_a),
            ("omega_B", self.omega_b),
            ("omega_E", self.omega_e),
            ("omega_fixIRS", self.omega_fixed),
            ("q_o", self.q_o),
        ] {
            if !v.is_finite() {
                return Err(Error::config(field, "coordinates must be finite"));
            }
        }
        if self.omega_a.norm() == 0.0 {
            return Err(Error::config("omega_A", "Alice's center must not be the origin"));
        }
        positive("H", self.altitude)?;
        positive("alpha", self.alpha)?;
        positive("f", self.frequency)?;
        positive("d", self.spacing)?;
        positive("sigma2_B", self.sigma_b2)?;
        positive("sigma2_E", self.sigma_e2)?;
        positive("rho0", self.rho0)?;
        positive("P", self.power)?;
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return Err(Error::config("Z", format!("must be non-negative, got {}", self.speed)));
        }
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::config("r", format!("must be non-negative, got {}", self.radius)));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "at least one trial is required"));
        }
        if self.kx == 0 || self.ky == 0 {
            return Err(Error::config("K", "surface needs at least one element"));
        }
        self.grid().map_err(|e| Error::config("d", e.to_string()))?;
        self.flight_plan()?;
        Ok(())
    }

    /// Non-fatal findings, currently the element-count limit that keeps the
    /// plate within one wavelength.
    pub fn warnings(&self) -> Vec<String> {
        let Ok(grid) = self.grid() else {
            return Vec::new();
        };
        let lim = lemma1_limits(&grid);
        if lim.feasible {
            Vec::new()
        } else {
            vec![format!(
                "K={} ({}x{}) exceeds Lemma-1 limit {} at spacing {} wavelengths",
                self.elements(),
                self.kx,
                self.ky,
                lim.k_max(),
                self.spacing
            )]
        }
    }
}
