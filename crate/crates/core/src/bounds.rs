//! Closed-form effective-channel bounds and the SNR ceilings built on them.
//!
//! With the co-phasing design, Bob's per-sensor effective channel is at most
//! `K·√(c_RB·c_mR)`, reached exactly when the rank-1 phase vector matches the
//! sensor's array response. Eve's channel carries the directional
//! coherence sum `ζ_m` in place of `K`, and `|ζ_m| ≤ K`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::beamform::{CVector, ReflectionState};
use crate::channel::{cis, ChannelSet};
use crate::geometry::{IrsGrid, Vec3};

/// `χ_mB = K√(c_RB c_mR)·exp(−j(φᵃ_mR + φᵃ_RB − θ_com))` for every sensor.
pub fn chi_bob(
    k: usize,
    sensor_gains: &[f64],
    sensor_phases: &[f64],
    c_rb: f64,
    phase_rb: f64,
    theta_com: f64,
) -> CVector {
    DVector::from_iterator(
        sensor_gains.len(),
        sensor_gains.iter().zip(sensor_phases).map(|(&c_mr, &phi_mr)| {
            k as f64 * (c_rb * c_mr).sqrt() * cis(-(phi_mr + phase_rb - theta_com))
        }),
    )
}

/// Coherence sum of the surface toward Eve as seen from one sensor:
/// `Σ exp(j[(kx−1)d̄x(â_RB − â_RE − â_mR)ₓ + (ky−1)d̄y(…)_y + u_G])`.
pub fn zeta(grid: &IrsGrid, dir_rb: Vec3, dir_re: Vec3, dir_mr: Vec3, u_g: &DVector<f64>) -> Complex64 {
    let sx = grid.dbar_x() * (dir_rb.x - dir_re.x - dir_mr.x);
    let sy = grid.dbar_y() * (dir_rb.y - dir_re.y - dir_mr.y);
    grid.lattice()
        .zip(u_g.iter())
        .map(|((i, j), &ug)| cis((i - 1) as f64 * sx + (j - 1) as f64 * sy + ug))
        .sum()
}

/// Per-sensor `ζ_m` and `χ_mE = √(c_RE c_mR)·exp(−j(φᵃ_RE + φᵃ_mR − θ_com))·ζ_m`.
#[allow(clippy::too_many_arguments)]
pub fn zeta_and_chi_eve(
    grid: &IrsGrid,
    dir_rb: Vec3,
    dir_re: Vec3,
    sensor_dirs: &[Vec3],
    u_g: &DVector<f64>,
    sensor_gains: &[f64],
    sensor_phases: &[f64],
    c_re: f64,
    phase_re: f64,
    theta_com: f64,
) -> (CVector, CVector) {
    let m = sensor_dirs.len();
    let zetas = DVector::from_iterator(m, sensor_dirs.iter().map(|&d| zeta(grid, dir_rb, dir_re, d, u_g)));
    let chi = DVector::from_iterator(
        m,
        (0..m).map(|i| {
            (c_re * sensor_gains[i]).sqrt() * cis(-(phase_re + sensor_phases[i] - theta_com)) * zetas[i]
        }),
    );
    (zetas, chi)
}

/// `Σ_m P̄·ρ0²·ς_i·ς_G·coh_m² / (d_i² d_mR²)`.
///
/// `coherence[m]` is `K` for Bob and `|ζ_m|` for Eve. The squared fading term
/// is taken pathwise as the product of the two hops' draws, so the ceiling
/// holds sample by sample.
pub fn snr_upper_bound(
    pbar: f64,
    rho0: f64,
    varsigma_ground: f64,
    varsigma_sensor: f64,
    coherence: &[f64],
    d_ground: f64,
    d_sensors: &[f64],
) -> f64 {
    coherence
        .iter()
        .zip(d_sensors)
        .map(|(&coh, &d_mr)| {
            pbar * rho0 * rho0 * varsigma_ground * varsigma_sensor * coh * coh
                / (d_ground * d_ground * d_mr * d_mr)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub chi_b: CVector,
    pub chi_e: CVector,
    pub zeta: CVector,
    pub gamma_b_ub: f64,
    pub gamma_e_ub: f64,
    pub pbar_b: f64,
    pub pbar_e: f64,
}

/// Evaluates every bound for one sample, using the sample's own fading.
pub fn evaluate_bounds(
    ch: &ChannelSet,
    grid: &IrsGrid,
    refl: &ReflectionState,
    power: f64,
    sigma_b2: f64,
    sigma_e2: f64,
) -> BoundsReport {
    let s = &ch.sensors;
    let k = grid.len();
    let chi_b = chi_bob(k, &s.gains, &s.bulk_phases, ch.bob.gain, ch.bob.bulk_phase, refl.theta_com);
    let (zeta, chi_e) = zeta_and_chi_eve(
        grid,
        ch.bob.direction,
        ch.eve.direction,
        &s.directions,
        &refl.u_g,
        &s.gains,
        &s.bulk_phases,
        ch.eve.gain,
        ch.eve.bulk_phase,
        refl.theta_com,
    );
    let pbar_b = power / sigma_b2;
    let pbar_e = power / sigma_e2;
    let f = &ch.fading;
    let coh_b = vec![k as f64; s.gains.len()];
    let coh_e: Vec<f64> = zeta.iter().map(|z| z.norm()).collect();
    BoundsReport {
        gamma_b_ub: snr_upper_bound(pbar_b, f.rho0, f.varsigma_b, f.varsigma_g, &coh_b, ch.bob.distance, &s.distances),
        gamma_e_ub: snr_upper_bound(pbar_e, f.rho0, f.varsigma_e, f.varsigma_g, &coh_e, ch.eve.distance, &s.distances),
        chi_b,
        chi_e,
        zeta,
        pbar_b,
        pbar_e,
    }
}
