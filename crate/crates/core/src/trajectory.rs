//! Sample-by-sample UAV placement.
//!
//! Each step solves a cubic in `ε = ‖q‖/‖Ω_A‖` whose coefficients depend on
//! the previous position, turns every positive real root into a ring of
//! candidate positions at altitude `H` centered on the origin, and searches
//! those rings under the per-slot travel limit. Only Alice, Bob and the
//! previous position shape the rings; Eve enters through the caller's
//! objective alone.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{FlightPlan, Vec3};

/// Angles sampled on every candidate ring.
pub const RING_POINTS: usize = 360;

/// Coefficients of `ε³ − bε² + cε + d = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// `(bc)² + 18bcd − 4c³ − 4b³d − 27d²`, recorded as derived for the
    /// planner; its sign is not used to count roots.
    pub delta: f64,
}

impl CubicCoeffs {
    pub fn new(b: f64, c: f64, d: f64) -> Self {
        let delta = (b * c).powi(2) + 18.0 * b * c * d - 4.0 * c.powi(3) - 4.0 * b.powi(3) * d - 27.0 * d * d;
        CubicCoeffs { b, c, d, delta }
    }

    pub fn eval(&self, e: f64) -> f64 {
        ((e - self.b) * e + self.c) * e + self.d
    }

    fn derivative(&self, e: f64) -> f64 {
        (3.0 * e - 2.0 * self.b) * e + self.c
    }

    /// Discriminant of the cubic as written; positive means three distinct
    /// real roots.
    pub fn discriminant(&self) -> f64 {
        let (b, c, d) = (self.b, self.c, self.d);
        b * b * c * c - 4.0 * c.powi(3) + 4.0 * b.powi(3) * d - 27.0 * d * d - 18.0 * b * c * d
    }
}

/// Cubic coefficients for the step leaving `q_prev` with travel budget
/// `step` (= `Z·α`).
pub fn cubic_coefficients(omega_a: Vec3, omega_b: Vec3, q_prev: Vec3, step: f64) -> Result<CubicCoeffs> {
    let na = omega_a.norm();
    if na == 0.0 {
        return Err(Error::DegenerateGeometry("Alice's center sits at the origin"));
    }
    let nb = omega_b.norm();
    let nq = q_prev.norm();
    let na2 = na * na;
    let b = nb / (2.0 * na) + 2.0 * nq / na + 0.5;
    let c = (nb * nq + nq * nq) / na2 - nq / na;
    let d = nb / (2.0 * na) * (nq * nq / na2) + nq * nq / (2.0 * na2) - step * step / (2.0 * na2);
    Ok(CubicCoeffs::new(b, c, d))
}

/// All real roots, ascending, each polished by Newton steps.
///
/// Closed form on the depressed cubic `t³ + pt + q`: Cardano's formula when
/// one root is real and the trigonometric form when all three are.
pub fn solve_epsilon(k: &CubicCoeffs) -> Vec<f64> {
    let a2 = -k.b;
    let a1 = k.c;
    let a0 = k.d;
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2.powi(3) / 27.0 - a2 * a1 / 3.0 + a0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let mut roots: Vec<f64> = if p == 0.0 && q == 0.0 {
        vec![0.0]
    } else if disc > 0.0 {
        // the sign choice avoids cancellation in u
        let u = (-q / 2.0 - q.signum() * disc.sqrt()).cbrt();
        let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        vec![t]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3).map(|i| r * (phi - TAU * i as f64 / 3.0).cos()).collect()
    };
    for t in roots.iter_mut() {
        *t = polish(k, *t - shift);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    roots
}

fn polish(k: &CubicCoeffs, mut e: f64) -> f64 {
    for _ in 0..8 {
        let f = k.eval(e);
        let df = k.derivative(e);
        if f == 0.0 || df == 0.0 {
            break;
        }
        let next = e - f / df;
        if !next.is_finite() || k.eval(next).abs() >= f.abs() {
            break;
        }
        e = next;
    }
    e
}

/// Horizontal radius of the ring `q_x² + q_y² = (ε‖Ω_A‖)² − H²`, or `None`
/// when the ring does not exist at altitude `H`.
pub fn candidate_ring(epsilon: f64, omega_a: Vec3, altitude: f64) -> Option<f64> {
    if !(epsilon > 0.0) {
        return None;
    }
    let radicand = (epsilon * omega_a.norm()).powi(2) - altitude * altitude;
    if radicand < 0.0 {
        None
    } else {
        Some(radicand.sqrt())
    }
}

/// A feasible ring and the root that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub epsilon: f64,
    pub radius: f64,
}

/// Rings of every positive real root for the step leaving `q_prev`.
pub fn rings_for_step(omega_a: Vec3, omega_b: Vec3, q_prev: Vec3, step: f64, altitude: f64) -> Result<Vec<Ring>> {
    let coeffs = cubic_coefficients(omega_a, omega_b, q_prev, step)?;
    Ok(solve_epsilon(&coeffs)
        .into_iter()
        .filter_map(|epsilon| candidate_ring(epsilon, omega_a, altitude).map(|radius| Ring { epsilon, radius }))
        .collect())
}

/// Position chosen for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub position: Vec3,
    /// Ring the move headed for; `None` when hovering.
    pub ring: Option<Ring>,
}

fn ring_point(ring: &Ring, index: usize, altitude: f64) -> Vec3 {
    let angle = TAU * index as f64 / RING_POINTS as f64;
    Vec3::new(ring.radius * angle.cos(), ring.radius * angle.sin(), altitude)
}

/// Linear search over the discretized rings.
///
/// Every ring point proposes one candidate: the point itself when it lies
/// within `speed_limit` of `q_prev`, otherwise the full-length step toward
/// it. Staying at `q_prev` is always a candidate and wins ties, as does the
/// earlier ring and the smaller angle index.
pub fn next_position<F>(q_prev: Vec3, rings: &[Ring], speed_limit: f64, objective: F) -> Step
where
    F: Fn(Vec3) -> f64,
{
    let hover = Step {
        position: q_prev,
        ring: None,
    };
    if !(speed_limit > 0.0) || rings.is_empty() {
        return hover;
    }
    let mut best = hover;
    let mut best_value = objective(q_prev);
    for ring in rings {
        for i in 0..RING_POINTS {
            let p = ring_point(ring, i, q_prev.z);
            let to = p - q_prev;
            let dist = to.norm();
            let candidate = if dist <= speed_limit {
                p
            } else {
                q_prev + to * (speed_limit / dist)
            };
            let value = objective(candidate);
            if value > best_value || (best_value.is_nan() && !value.is_nan()) {
                best_value = value;
                best = Step {
                    position: candidate,
                    ring: Some(*ring),
                };
            }
        }
    }
    best
}

/// One sample of a planned flight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub position: Vec3,
    pub displacement: f64,
    pub ring: Option<Ring>,
}

/// Planned positions `q[1..=N]`, starting from `q[0] = start`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start: Vec3,
    pub waypoints: Vec<Waypoint>,
}

impl Trajectory {
    /// UAV parked at `at` for `samples` slots.
    pub fn stationary(at: Vec3, samples: usize) -> Self {
        Trajectory {
            start: at,
            waypoints: vec![
                Waypoint {
                    position: at,
                    displacement: 0.0,
                    ring: None,
                };
                samples
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.waypoints.iter().map(|w| w.position)
    }

    pub fn last(&self) -> Vec3 {
        self.waypoints.last().map_or(self.start, |w| w.position)
    }

    /// First `samples` waypoints.
    pub fn truncated(&self, samples: usize) -> Self {
        Trajectory {
            start: self.start,
            waypoints: self.waypoints[..samples.min(self.len())].to_vec(),
        }
    }
}

/// Runs the ring search for every slot of `plan`.
pub fn plan_trajectory<F>(plan: &FlightPlan, omega_a: Vec3, omega_b: Vec3, objective: F) -> Result<Trajectory>
where
    F: Fn(Vec3) -> f64,
{
    let limit = plan.step_limit();
    let mut q = plan.start;
    let mut waypoints = Vec::with_capacity(plan.samples);
    for _ in 0..plan.samples {
        let step = if limit > 0.0 {
            let rings = rings_for_step(omega_a, omega_b, q, limit, plan.altitude)?;
            next_position(q, &rings, limit, &objective)
        } else {
            Step {
                position: q,
                ring: None,
            }
        };
        waypoints.push(Waypoint {
            position: step.position,
            displacement: q.distance(step.position),
            ring: step.ring,
        });
        q = step.position;
    }
    Ok(Trajectory {
        start: plan.start,
        waypoints,
    })
}

/// Angle of a ring point, for reporting.
pub fn ring_angle(index: usize) -> f64 {
    2.0 * PI * index as f64 / RING_POINTS as f64
}
