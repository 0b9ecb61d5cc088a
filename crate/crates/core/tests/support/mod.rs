//! Independent reference computations used only by tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Roots of `ε³ − bε² + cε + d` as eigenvalues of the companion matrix.
pub fn companion_roots(b: f64, c: f64, d: f64) -> Vec<Complex64> {
    // monic x³ + a2 x² + a1 x + a0 with a2 = −b, a1 = c, a0 = d
    let m = DMatrix::from_row_slice(3, 3, &[b, -c, -d, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    m.complex_eigenvalues().iter().copied().collect()
}

/// Companion roots whose imaginary part is negligible.
pub fn companion_real_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    let scale = 1.0 + b.abs().max(c.abs()).max(d.abs());
    let mut r: Vec<f64> = companion_roots(b, c, d)
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-7 * scale)
        .map(|z| z.re)
        .collect();
    r.sort_by(|a, b| a.partial_cmp(b).unwrap());
    r
}

/// Eigenvalues of a 3×3 Hermitian matrix, descending, from its
/// characteristic polynomial solved in trigonometric form.
pub fn hermitian3_eigenvalues(m: &Matrix3<Complex64>) -> [f64; 3] {
    let a = |i: usize, j: usize| m[(i, j)];
    let q = (a(0, 0).re + a(1, 1).re + a(2, 2).re) / 3.0;
    let off = a(0, 1).norm_sqr() + a(0, 2).norm_sqr() + a(1, 2).norm_sqr();
    if off == 0.0 {
        let mut d = [a(0, 0).re, a(1, 1).re, a(2, 2).re];
        d.sort_by(|x, y| y.partial_cmp(x).unwrap());
        return d;
    }
    let p2 = (a(0, 0).re - q).powi(2) + (a(1, 1).re - q).powi(2) + (a(2, 2).re - q).powi(2) + 2.0 * off;
    let p = (p2 / 6.0).sqrt();
    // B = (A − qI)/p; det(B)/2 = cos(3φ)
    let b = |i: usize, j: usize| {
        let shift = if i == j { q } else { 0.0 };
        (a(i, j) - shift) / p
    };
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (det.re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + TAU / 3.0).cos();
    [e1, 3.0 * q - e1 - e3, e3]
}

/// `(1 + wᴴAw)/(1 + wᴴBw)` written out elementwise.
pub fn ratio(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, w: &[Complex64]) -> f64 {
    let quad = |m: &DMatrix<Complex64>| {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..w.len() {
            for j in 0..w.len() {
                s += w[i].conj() * m[(i, j)] * w[j];
            }
        }
        s.re
    };
    (1.0 + quad(a)) / (1.0 + quad(b))
}
