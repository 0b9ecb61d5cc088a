//! Node placement, the reflecting-surface element lattice and flight-plan
//! bookkeeping.
//!
//! Positions are in meters in a fixed ground frame with `z` pointing up.
//! Ground nodes live at `z = 0`; the UAV flies at a constant altitude `H`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Speed of light used to derive the carrier wavelength.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// A point or direction in 3-D space, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (other - self).norm()
    }

    /// Horizontal (x, y) distance to `other`.
    pub fn planar_distance(self, other: Vec3) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Same horizontal position at altitude `z`.
    pub fn with_z(self, z: f64) -> Vec3 {
        Vec3::new(self.x, self.y, z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.x, self.y, self.z)
    }
}

/// Unit vector pointing from `a` toward `b`.
pub fn unit_vector(a: Vec3, b: Vec3) -> Result<Vec3> {
    let d = b - a;
    let n = d.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    Ok(d * (1.0 / n))
}

/// Ground sensors scattered around a cluster center.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorField {
    pub center: Vec3,
    pub radius: f64,
    pub positions: Vec<Vec3>,
}

impl SensorField {
    pub fn count(&self) -> usize {
        self.positions.len()
    }
}

/// Places `m` sensors uniformly over the ground disk of radius `r` around
/// `center`. The same seed always yields the same field.
pub fn place_sensors(center: Vec3, r: f64, m: usize, seed: u64) -> Result<SensorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    place_sensors_with(center, r, m, &mut rng)
}

pub(crate) fn place_sensors_with<R: Rng + ?Sized>(
    center: Vec3,
    r: f64,
    m: usize,
    rng: &mut R,
) -> Result<SensorField> {
    if m == 0 {
        return Err(Error::EmptyField);
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::config("r", "sensor radius must be finite and non-negative"));
    }
    let ground = center.with_z(0.0);
    let positions = (0..m)
        .map(|_| {
            // Inverse-CDF radius keeps the density uniform over the area.
            let u: f64 = rng.random();
            let phi: f64 = rng.random::<f64>() * 2.0 * PI;
            let rho = r * u.sqrt();
            ground + Vec3::new(rho * phi.cos(), rho * phi.sin(), 0.0)
        })
        .collect();
    Ok(SensorField {
        center,
        radius: r,
        positions,
    })
}

/// Rectangular lattice of reflecting elements carried by the UAV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrsGrid {
    pub kx: usize,
    pub ky: usize,
    pub dx: f64,
    pub dy: f64,
    pub wavelength: f64,
}

impl IrsGrid {
    /// Builds a grid, rejecting spacings of half a wavelength or more.
    pub fn new(kx: usize, ky: usize, dx: f64, dy: f64, wavelength: f64) -> Result<Self> {
        if kx == 0 || ky == 0 {
            return Err(Error::Grid("element counts must be positive".into()));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::Grid("wavelength must be positive".into()));
        }
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::Grid("element spacing must be positive".into()));
        }
        if dx >= wavelength / 2.0 || dy >= wavelength / 2.0 {
            return Err(Error::Grid(format!(
                "spacing ({dx}, {dy}) must stay below half a wavelength ({})",
                wavelength / 2.0
            )));
        }
        Ok(IrsGrid {
            kx,
            ky,
            dx,
            dy,
            wavelength,
        })
    }

    /// Grid with spacing given as a fraction of the wavelength of carrier `freq_hz`.
    pub fn from_carrier(kx: usize, ky: usize, spacing_wavelengths: f64, freq_hz: f64) -> Result<Self> {
        let wavelength = SPEED_OF_LIGHT / freq_hz;
        let d = spacing_wavelengths * wavelength;
        Self::new(kx, ky, d, d, wavelength)
    }

    pub fn len(&self) -> usize {
        self.kx * self.ky
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn carrier(&self) -> f64 {
        SPEED_OF_LIGHT / self.wavelength
    }

    /// Electrical spacing `2π·dx/λ`.
    pub fn dbar_x(&self) -> f64 {
        2.0 * PI * self.dx / self.wavelength
    }

    pub fn dbar_y(&self) -> f64 {
        2.0 * PI * self.dy / self.wavelength
    }

    pub fn zx(&self) -> f64 {
        self.wavelength / self.dx
    }

    pub fn zy(&self) -> f64 {
        self.wavelength / self.dy
    }

    /// Flat element index for 1-based lattice coordinates; `kx` is the
    /// slow index.
    pub fn flat_index(&self, kx: usize, ky: usize) -> usize {
        (kx - 1) * self.ky + (ky - 1)
    }

    /// 1-based lattice coordinates of every element in flat order.
    pub fn lattice(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.kx).flat_map(move |i| (1..=self.ky).map(move |j| (i, j)))
    }
}

/// Positions of all elements; element `(1, 1)` sits at `q_ref`.
pub fn irs_element_positions(q_ref: Vec3, grid: &IrsGrid) -> Vec<Vec3> {
    grid.lattice()
        .map(|(i, j)| {
            q_ref + Vec3::new((i - 1) as f64 * grid.dx, (j - 1) as f64 * grid.dy, 0.0)
        })
        .collect()
}

/// Result of checking a grid against the one-wavelength plate limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lemma1Limits {
    pub kx_max: usize,
    pub ky_max: usize,
    pub feasible: bool,
}

impl Lemma1Limits {
    pub fn k_max(&self) -> usize {
        self.kx_max * self.ky_max
    }
}

// Spacings entered as λ/z carry rounding; z = 4 must not floor to 3.
const LATTICE_SLACK: f64 = 1e-9;

/// Maximum element counts keeping the plate within one wavelength per axis.
/// Infeasible grids are reported, not rejected.
pub fn lemma1_limits(grid: &IrsGrid) -> Lemma1Limits {
    let zx = grid.zx();
    let zy = grid.zy();
    Lemma1Limits {
        kx_max: (zx + LATTICE_SLACK).floor() as usize,
        ky_max: (zy + LATTICE_SLACK).floor() as usize,
        feasible: grid.kx as f64 <= zx + LATTICE_SLACK && grid.ky as f64 <= zy + LATTICE_SLACK,
    }
}

/// Sampling of the flight: `samples` slots of `dt = total_time / samples`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightPlan {
    pub total_time: f64,
    pub samples: usize,
    pub speed: f64,
    pub altitude: f64,
    pub start: Vec3,
}

impl FlightPlan {
    pub fn new(total_time: f64, dt: f64, speed: f64, altitude: f64, start: Vec3) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::config("alpha", "slot duration must be positive"));
        }
        if !(total_time > 0.0) {
            return Err(Error::config("T", "flight time must be positive"));
        }
        let ratio = total_time / dt;
        let samples = ratio.round();
        if (ratio - samples).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::config("T", "N must be integral (T / alpha)"));
        }
        if !(altitude > 0.0) {
            return Err(Error::config("H", "altitude must be positive"));
        }
        if !(speed >= 0.0) {
            return Err(Error::config("Z", "speed must be non-negative"));
        }
        Ok(FlightPlan {
            total_time,
            samples: samples as usize,
            speed,
            altitude,
            start: start.with_z(altitude),
        })
    }

    /// Slot duration `alpha`.
    pub fn dt(&self) -> f64 {
        self.total_time / self.samples as f64
    }

    /// Largest displacement allowed between consecutive samples.
    pub fn step_limit(&self) -> f64 {
        self.speed * self.dt()
    }
}
