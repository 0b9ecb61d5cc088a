//! Far-field channel synthesis between the sensors, the reflecting surface
//! and the ground receivers.
//!
//! Every link is split into a bulk part, which depends only on the distance
//! to the reference element (gain `c` and phase `φᵃ`), and an array-response
//! part `φᵇ` that depends on the element index and the arrival or departure
//! direction. Coefficients are stored as they multiply the signal, so the
//! sample received at ground node `i` is `hᵢᵀ Θ G w`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::geometry::{unit_vector, IrsGrid, SensorField, Vec3};
use crate::error::{Error, Result};

/// Unit-mean exponential scalings of the three hops for one time sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingDraw {
    pub varsigma_g: f64,
    pub varsigma_b: f64,
    pub varsigma_e: f64,
    pub rho0: f64,
}

impl FadingDraw {
    /// All scalings at their mean.
    pub fn mean(rho0: f64) -> Self {
        FadingDraw {
            varsigma_g: 1.0,
            varsigma_b: 1.0,
            varsigma_e: 1.0,
            rho0,
        }
    }

    /// Independent draws for the three hops. With `shared_ground` Eve
    /// reuses Bob's draw.
    pub fn sample<R: Rng + ?Sized>(rho0: f64, shared_ground: bool, rng: &mut R) -> Self {
        let varsigma_g: f64 = rng.sample(Exp1);
        let varsigma_b: f64 = rng.sample(Exp1);
        let varsigma_e: f64 = rng.sample(Exp1);
        FadingDraw {
            varsigma_g,
            varsigma_b,
            varsigma_e: if shared_ground { varsigma_b } else { varsigma_e },
            rho0,
        }
    }

    /// Multiplies every scaling by `s`.
    pub fn scaled(self, s: f64) -> Self {
        FadingDraw {
            varsigma_g: self.varsigma_g * s,
            varsigma_b: self.varsigma_b * s,
            varsigma_e: self.varsigma_e * s,
            rho0: self.rho0,
        }
    }
}

/// Linear power gain `ρ0·ς / ‖b − a‖²` (reference distance 1 m).
pub fn path_gain(rho0: f64, varsigma: f64, a: Vec3, b: Vec3) -> Result<f64> {
    let d2 = (b - a).norm_sq();
    if d2 == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(rho0 * varsigma / d2)
}

/// Propagation phase `2π‖b − a‖/λ`, not wrapped.
pub fn bulk_phase(a: Vec3, b: Vec3, wavelength: f64) -> Result<f64> {
    let d = a.distance(b);
    if d == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(2.0 * std::f64::consts::PI * d / wavelength)
}

/// Phase offset of element `(kx, ky)` (1-based) for a plane wave along
/// `direction`. The vertical component does not contribute since the lattice
/// is horizontal.
pub fn element_response_phase(kx: usize, ky: usize, grid: &IrsGrid, direction: Vec3) -> Result<f64> {
    if kx == 0 || ky == 0 || kx > grid.kx || ky > grid.ky {
        return Err(Error::Index {
            kx,
            ky,
            max_x: grid.kx,
            max_y: grid.ky,
        });
    }
    Ok(element_phase_unchecked(kx, ky, grid, direction))
}

#[inline]
fn element_phase_unchecked(kx: usize, ky: usize, grid: &IrsGrid, direction: Vec3) -> f64 {
    (kx - 1) as f64 * grid.dbar_x() * direction.x + (ky - 1) as f64 * grid.dbar_y() * direction.y
}

/// Response phases of all elements in flat order.
pub fn array_response(grid: &IrsGrid, direction: Vec3) -> DVector<f64> {
    DVector::from_iterator(
        grid.len(),
        grid.lattice().map(|(i, j)| element_phase_unchecked(i, j, grid, direction)),
    )
}

#[inline]
pub(crate) fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// Sensor-to-surface hop.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorLink {
    /// `K × M` complex channel.
    pub g: DMatrix<Complex64>,
    /// `K × M` array-response phases.
    pub phi_g: DMatrix<f64>,
    pub gains: Vec<f64>,
    pub bulk_phases: Vec<f64>,
    pub distances: Vec<f64>,
    /// Direction from each sensor toward the UAV.
    pub directions: Vec<Vec3>,
}

/// Builds the sensor-to-surface channel with the reference element at `uav`.
pub fn build_sensor_irs(
    field: &SensorField,
    uav: Vec3,
    grid: &IrsGrid,
    rho0: f64,
    varsigma_g: f64,
) -> Result<SensorLink> {
    let k = grid.len();
    let m = field.count();
    let mut g = DMatrix::zeros(k, m);
    let mut phi_g = DMatrix::zeros(k, m);
    let mut gains = Vec::with_capacity(m);
    let mut bulk_phases = Vec::with_capacity(m);
    let mut distances = Vec::with_capacity(m);
    let mut directions = Vec::with_capacity(m);
    for (col, &sensor) in field.positions.iter().enumerate() {
        let gain = path_gain(rho0, varsigma_g, sensor, uav)?;
        let bulk = bulk_phase(sensor, uav, grid.wavelength)?;
        let dir = unit_vector(sensor, uav)?;
        let amp = gain.sqrt();
        for (row, (i, j)) in grid.lattice().enumerate() {
            let phib = element_phase_unchecked(i, j, grid, dir);
            phi_g[(row, col)] = phib;
            g[(row, col)] = amp * cis(-(bulk + phib));
        }
        gains.push(gain);
        bulk_phases.push(bulk);
        distances.push(sensor.distance(uav));
        directions.push(dir);
    }
    Ok(SensorLink {
        g,
        phi_g,
        gains,
        bulk_phases,
        distances,
        directions,
    })
}

/// Surface-to-ground hop toward one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundLink {
    pub h: DVector<Complex64>,
    pub u: DVector<f64>,
    pub gain: f64,
    pub bulk_phase: f64,
    pub distance: f64,
    /// Direction from the UAV toward the receiver.
    pub direction: Vec3,
}

pub fn build_irs_ground(
    uav: Vec3,
    target: Vec3,
    grid: &IrsGrid,
    rho0: f64,
    varsigma: f64,
) -> Result<GroundLink> {
    let gain = path_gain(rho0, varsigma, uav, target)?;
    let bulk = bulk_phase(uav, target, grid.wavelength)?;
    let direction = unit_vector(uav, target)?;
    let u = array_response(grid, direction);
    let amp = gain.sqrt();
    let h = u.map(|phib| amp * cis(-(bulk + phib)));
    Ok(GroundLink {
        h,
        u,
        gain,
        bulk_phase: bulk,
        distance: uav.distance(target),
        direction,
    })
}

/// All channels of one time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub sensors: SensorLink,
    pub bob: GroundLink,
    pub eve: GroundLink,
    pub fading: FadingDraw,
}

impl ChannelSet {
    pub fn build(
        field: &SensorField,
        uav: Vec3,
        bob: Vec3,
        eve: Vec3,
        grid: &IrsGrid,
        fading: FadingDraw,
    ) -> Result<Self> {
        Ok(ChannelSet {
            sensors: build_sensor_irs(field, uav, grid, fading.rho0, fading.varsigma_g)?,
            bob: build_irs_ground(uav, bob, grid, fading.rho0, fading.varsigma_b)?,
            eve: build_irs_ground(uav, eve, grid, fading.rho0, fading.varsigma_e)?,
            fading,
        })
    }
}
