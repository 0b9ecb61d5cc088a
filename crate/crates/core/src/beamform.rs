//! Reflection-phase design and collaborative beamforming weights.
//!
//! The surface phases co-phase every element toward Bob using the rank-1
//! column representative of the sensor array-response matrix. Two weight
//! designs follow: scheme 1 is maximum-ratio transmission toward Bob, and
//! scheme 2 maximizes `(1 + wᴴAw) / (1 + wᴴBw)`, which accounts for Eve.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::cis;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const HERMITIAN_TOL: f64 = 1e-10;
// Relative gap under which two eigenvalues count as one.
const TIE_TOL: f64 = 1e-9;
// Projections shorter than this do not select a tie-break direction.
const PROJECTION_FLOOR: f64 = 1e-8;

/// Rank-1 column representative `σ₁·u₁·mean(v₁)` of the `K × M` phase matrix.
///
/// When all columns are equal this returns that column; in general it is the
/// closest single column to every sensor's response.
pub fn rank1_phase_vector(phi_g: &DMatrix<f64>) -> DVector<f64> {
    let k = phi_g.nrows();
    if phi_g.iter().all(|&x| x == 0.0) || phi_g.ncols() == 0 {
        return DVector::zeros(k);
    }
    let svd = phi_g.clone().svd(true, true);
    let (lead, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, s)| if s > best.1 { (i, s) } else { best });
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested Vᵀ");
    let mean_v = v_t.row(lead).mean();
    u.column(lead) * (sigma * mean_v)
}

/// Surface phases and the pieces they were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionState {
    /// Per-element phases wrapped into `[0, 2π)`.
    pub theta: DVector<f64>,
    pub theta_com: f64,
    pub u_g: DVector<f64>,
}

impl ReflectionState {
    /// Diagonal of `Θ`.
    pub fn coefficients(&self) -> CVector {
        self.theta.map(cis)
    }
}

pub(crate) fn wrap_phase(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `θ = θ_com + u_B + u_G`, wrapped into `[0, 2π)`.
pub fn reflection_phases(u_b: &DVector<f64>, u_g: &DVector<f64>, theta_com: f64) -> Result<ReflectionState> {
    if u_b.len() != u_g.len() {
        return Err(Error::Dimension(format!(
            "u_B has {} elements, u_G has {}",
            u_b.len(),
            u_g.len()
        )));
    }
    let theta = DVector::from_iterator(
        u_b.len(),
        u_b.iter().zip(u_g.iter()).map(|(b, g)| wrap_phase(theta_com + b + g)),
    );
    Ok(ReflectionState {
        theta,
        theta_com,
        u_g: u_g.clone(),
    })
}

/// Composite row `hᵀ Θ G`, one entry per sensor.
pub fn effective_row(h: &CVector, theta: &DVector<f64>, g: &CMatrix) -> Result<CVector> {
    if h.len() != theta.len() || g.nrows() != h.len() {
        return Err(Error::Dimension(format!(
            "h has {} elements, theta {}, G is {}x{}",
            h.len(),
            theta.len(),
            g.nrows(),
            g.ncols()
        )));
    }
    let weighted = h.zip_map(theta, |hk, t| hk * cis(t));
    Ok(g.tr_mul(&weighted))
}

/// Quadratic form `rᴴ r / σ²` so that `wᴴ A w = |r·w|² / σ²`.
pub fn quadratic_form(row: &CVector, sigma2: f64) -> CMatrix {
    row.conjugate() * row.transpose() / Complex64::from(sigma2)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", m.nrows(), m.ncols())));
    }
    let dev = max_abs(&(m - m.adjoint()));
    if dev > HERMITIAN_TOL * max_abs(m).max(1.0) {
        return Err(Error::Shape(dev));
    }
    Ok(())
}

/// Rayleigh quotient `vᴴMv / vᴴv`.
pub fn rayleigh_quotient(m: &CMatrix, v: &CVector) -> f64 {
    (v.adjoint() * m * v)[(0, 0)].re / v.norm_squared()
}

/// Orthonormal basis of the eigenspace of the largest eigenvalue.
fn top_eigenspace(m: &CMatrix) -> CMatrix {
    let sym = (m + m.adjoint()) * Complex64::from(0.5);
    let eig = sym.symmetric_eigen();
    let vals = &eig.eigenvalues;
    let top = vals.max();
    let scale = vals.amax().max(f64::MIN_POSITIVE);
    let idx: Vec<usize> = (0..vals.len()).filter(|&i| top - vals[i] <= TIE_TOL * scale).collect();
    CMatrix::from_fn(m.nrows(), idx.len(), |r, c| eig.eigenvectors[(r, idx[c])])
}

/// Unit vector of `space` closest to `preferred`, falling back to the
/// projection of the first canonical direction with a usable component.
fn pick_direction(space: &CMatrix, preferred: Option<&CVector>) -> CVector {
    let project = |v: &CVector| space * (space.adjoint() * v);
    if let Some(p) = preferred {
        let proj = project(p);
        let n = proj.norm();
        if n > PROJECTION_FLOOR * p.norm() {
            return proj / Complex64::from(n);
        }
    }
    let n = space.nrows();
    for i in 0..n {
        let e = CVector::from_fn(n, |r, _| if r == i { Complex64::ONE } else { Complex64::ZERO });
        let proj = project(&e);
        let len = proj.norm();
        if len > PROJECTION_FLOOR {
            return proj / Complex64::from(len);
        }
    }
    unreachable!("a non-empty eigenspace projects some canonical direction")
}

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector.
///
/// A repeated top eigenvalue is resolved by projecting the canonical
/// directions onto the eigenspace in order. The returned vector's phase is
/// fixed so that the chosen canonical component is real and positive.
pub fn max_eigvec_hermitian(m: &CMatrix) -> Result<(f64, CVector)> {
    check_hermitian(m)?;
    if m.nrows() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let v = pick_direction(&top_eigenspace(m), None);
    Ok((rayleigh_quotient(m, &v), v))
}

/// Sensor weights with their power budget.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformer {
    pub weights: CVector,
    pub power: f64,
}

impl Beamformer {
    pub fn transmit_power(&self) -> f64 {
        self.weights.norm_squared()
    }
}

/// Maximum-ratio transmission toward Bob: `w = √P · conj(r)/‖r‖` with
/// `r = h_Bᵀ Θ G`, the top eigenvector of the rank-1 form `A`.
pub fn weights_scheme1(
    h_b: &CVector,
    theta: &DVector<f64>,
    g: &CMatrix,
    power: f64,
    _sigma_b2: f64,
) -> Result<Beamformer> {
    let row = effective_row(h_b, theta, g)?;
    mrt_weights(&row, power)
}

pub(crate) fn mrt_weights(row: &CVector, power: f64) -> Result<Beamformer> {
    let n = row.norm();
    if n == 0.0 {
        return Err(Error::ZeroChannel);
    }
    Ok(Beamformer {
        weights: row.conjugate() * Complex64::from(power.sqrt() / n),
        power,
    })
}

/// Maximizer of `(1 + wᴴAw)/(1 + wᴴBw)` over `‖w‖² ≤ P`: `√P` times the
/// top eigenvector of `(B + I/P)⁻¹(A + I/P)`.
///
/// The pencil is reduced to a Hermitian problem through the eigenbasis of
/// `B`, which keeps the Eve direction accurate when `B` is huge. A repeated
/// top eigenvalue (e.g. `A = B`) resolves toward the scheme-1 direction.
pub fn weights_scheme2(a: &CMatrix, b: &CMatrix, power: f64) -> Result<Beamformer> {
    check_hermitian(a)?;
    check_hermitian(b)?;
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!("A is {:?}, B is {:?}", a.shape(), b.shape())));
    }
    if !(power > 0.0) {
        return Err(Error::config("P", "transmit power must be positive"));
    }
    let n = a.nrows();
    let ridge = 1.0 / power;
    let b_eig = ((b + b.adjoint()) * Complex64::from(0.5)).symmetric_eigen();
    let v = &b_eig.eigenvectors;
    let scaled = |f: &dyn Fn(f64) -> f64| {
        let d = CMatrix::from_diagonal(&DVector::from_iterator(
            n,
            b_eig.eigenvalues.iter().map(|&mu| Complex64::from(f(mu.max(0.0) + ridge))),
        ));
        v * d * v.adjoint()
    };
    let whiten = scaled(&|x| x.powf(-0.5));
    let unwhiten = scaled(&|x| x.sqrt());
    let shifted = a + CMatrix::identity(n, n) * Complex64::from(ridge);
    let c = &whiten * shifted * &whiten;
    let c = (&c + c.adjoint()) * Complex64::from(0.5);

    let space = top_eigenspace(&c);
    let preferred = if space.ncols() > 1 {
        let (_, u1) = max_eigvec_hermitian(a)?;
        Some(&unwhiten * u1)
    } else {
        None
    };
    let y = pick_direction(&space, preferred.as_ref());
    let w = &whiten * y;
    let norm = w.norm();
    Ok(Beamformer {
        weights: w * Complex64::from(power.sqrt() / norm),
        power,
    })
}

/// Objective `(1 + wᴴAw)/(1 + wᴴBw)`.
pub fn secrecy_ratio(a: &CMatrix, b: &CMatrix, w: &CVector) -> f64 {
    let qa = (w.adjoint() * a * w)[(0, 0)].re;
    let qb = (w.adjoint() * b * w)[(0, 0)].re;
    (1.0 + qa) / (1.0 + qb)
}

/// Received SNR `|hᵀ Θ G w|² / σ²`.
pub fn snr(h: &CVector, theta: &DVector<f64>, g: &CMatrix, w: &CVector, sigma2: f64) -> Result<f64> {
    let row = effective_row(h, theta, g)?;
    snr_from_row(&row, w, sigma2)
}

pub(crate) fn snr_from_row(row: &CVector, w: &CVector, sigma2: f64) -> Result<f64> {
    if row.len() != w.len() {
        return Err(Error::Dimension(format!(
            "effective channel has {} entries, w has {}",
            row.len(),
            w.len()
        )));
    }
    Ok(row.dot(w).norm_sqr() / sigma2)
}

/// Secrecy rate in bits, with and without the clamp at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyRate {
    pub raw: f64,
    pub clamped: f64,
}

pub fn secrecy_rate(gamma_b: f64, gamma_e: f64) -> SecrecyRate {
    // log2 of the ratio via ln_1p keeps precision at low SNR
    let raw = (gamma_b.ln_1p() - gamma_e.ln_1p()) / std::f64::consts::LN_2;
    SecrecyRate {
        raw,
        clamped: raw.max(0.0),
    }
}

/// Per-sample SNRs and secrecy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrReport {
    pub gamma_b: f64,
    pub gamma_e: f64,
    pub sigma_b2: f64,
    pub sigma_e2: f64,
    pub rate: SecrecyRate,
}

impl SnrReport {
    pub fn new(gamma_b: f64, gamma_e: f64, sigma_b2: f64, sigma_e2: f64) -> Self {
        SnrReport {
            gamma_b,
            gamma_e,
            sigma_b2,
            sigma_e2,
            rate: secrecy_rate(gamma_b, gamma_e),
        }
    }
}
