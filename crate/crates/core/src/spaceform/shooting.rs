//! First Dirichlet eigenvalue of a geodesic ball in a model space.
//!
//! The first eigenfunction is radial, so the problem reduces to
//!
//! ```text
//! u'' + (n-1) (s'/s) u' + λ u = 0,   u'(0) = 0,   u(r) = 0,
//! ```
//!
//! solved by shooting from the regular singular point `t = 0` and bisecting
//! on whether the solution acquires a zero inside `(0, r]`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{bessel_first_zero, ModelSpace};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BallMethod {
    Shooting,
    BesselFastPath,
    ClosedForm,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallEigenvalueResult {
    pub lambda: f64,
    pub radius: f64,
    pub iterations: usize,
    /// `u(r) / max |u|` for the final shooting solution; zero on the fast paths.
    pub residual: f64,
    pub method: BallMethod,
}

/// Tolerances of the shooting solver.
#[derive(Debug, Clone, Copy)]
pub struct BallSolverConfig {
    /// Bisection stops once the bracket is narrower than this times `λ`.
    pub bisection_rel_tol: f64,
    /// Local relative error tolerance of the Runge–Kutta integrator.
    pub ode_rel_tol: f64,
    /// Integration starts at `start_fraction · r` from the series solution.
    pub start_fraction: f64,
    pub max_doublings: usize,
    /// Skip the closed-form paths at `ξ = 0`.
    pub force_shooting: bool,
}

impl Default for BallSolverConfig {
    fn default() -> Self {
        Self {
            bisection_rel_tol: 1e-10,
            ode_rel_tol: 1e-12,
            start_fraction: 1e-6,
            max_doublings: 60,
            force_shooting: false,
        }
    }
}

/// `λ_0^D(B_ξ(r))` with default tolerances.
pub fn ball_dirichlet_eigenvalue(ms: &ModelSpace, r: f64) -> Result<BallEigenvalueResult> {
    ball_dirichlet_eigenvalue_with(ms, r, &BallSolverConfig::default())
}

pub fn ball_dirichlet_eigenvalue_with(
    ms: &ModelSpace,
    r: f64,
    config: &BallSolverConfig,
) -> Result<BallEigenvalueResult> {
    ms.check_ball_radius(r)?;
    if ms.xi == 0.0 && !config.force_shooting {
        if ms.n == 3 {
            return Ok(BallEigenvalueResult {
                lambda: PI * PI / (r * r),
                radius: r,
                iterations: 0,
                residual: 0.0,
                method: BallMethod::ClosedForm,
            });
        }
        let j = bessel_first_zero(ms.n as f64 / 2.0 - 1.0)?;
        return Ok(BallEigenvalueResult {
            lambda: j * j / (r * r),
            radius: r,
            iterations: 0,
            residual: 0.0,
            method: BallMethod::BesselFastPath,
        });
    }
    shoot(ms, r, config)
}

struct ShotOutcome {
    /// The solution changed sign somewhere in `(0, r]`.
    crossed: bool,
    end_value: f64,
    max_abs: f64,
}

fn shoot(ms: &ModelSpace, r: f64, config: &BallSolverConfig) -> Result<BallEigenvalueResult> {
    let j = bessel_first_zero(ms.n as f64 / 2.0 - 1.0)?;
    let flat = j * j / (r * r);
    let mut lo = 0.5 * flat;
    let mut hi = 2.0 * flat;
    let mut iterations = 0;

    let mut doublings = 0;
    while integrate(ms, r, lo, config).crossed {
        hi = lo;
        lo *= 0.5;
        doublings += 1;
        iterations += 1;
        if doublings > config.max_doublings {
            return Err(Error::solver(format!(
                "could not bracket the ball eigenvalue from below (n={}, xi={}, r={r})",
                ms.n, ms.xi
            )));
        }
    }
    while !integrate(ms, r, hi, config).crossed {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        iterations += 1;
        if doublings > config.max_doublings {
            return Err(Error::solver(format!(
                "could not bracket the ball eigenvalue from above (n={}, xi={}, r={r})",
                ms.n, ms.xi
            )));
        }
    }

    while hi - lo > config.bisection_rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if integrate(ms, r, mid, config).crossed {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    let lambda = 0.5 * (lo + hi);
    let last = integrate(ms, r, lambda, config);
    Ok(BallEigenvalueResult {
        lambda,
        radius: r,
        iterations,
        residual: last.end_value / last.max_abs,
        method: BallMethod::Shooting,
    })
}

/// Integrates the radial equation from the series start to `r`.
fn integrate(ms: &ModelSpace, r: f64, lambda: f64, config: &BallSolverConfig) -> ShotOutcome {
    let n = ms.n as f64;
    let t0 = config.start_fraction * r;
    // u = 1 - λt²/(2n) + O(t⁴)
    let mut y = [1.0 - lambda * t0 * t0 / (2.0 * n), -lambda * t0 / n];
    let rhs = |t: f64, y: &[f64; 2]| -> [f64; 2] {
        [y[1], -(n - 1.0) * ms.warp_log_derivative(t) * y[1] - lambda * y[0]]
    };

    let mut t = t0;
    let mut h = t0;
    let mut max_abs = y[0].abs();
    let rtol = config.ode_rel_tol;
    let atol = rtol * 1e-2;
    let mut steps = 0usize;
    while t < r {
        if t + h > r {
            h = r - t;
        }
        let (next, err) = dopri_step(&rhs, t, &y, h);
        let scale0 = atol + rtol * y[0].abs().max(next[0].abs());
        let scale1 = atol * lambda.sqrt().max(1.0) + rtol * y[1].abs().max(next[1].abs());
        let e = ((err[0] / scale0).powi(2) + (err[1] / scale1).powi(2)).sqrt() / 2f64.sqrt();
        steps += 1;
        if e <= 1.0 || h < 1e-14 * r || steps > 2_000_000 {
            t += h;
            if next[0] <= 0.0 {
                return ShotOutcome {
                    crossed: true,
                    end_value: next[0],
                    max_abs: max_abs.max(next[0].abs()),
                };
            }
            y = next;
            max_abs = max_abs.max(y[0].abs());
        }
        let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    ShotOutcome {
        crossed: false,
        end_value: y[0],
        max_abs,
    }
}

/// One Dormand–Prince 5(4) step; returns the fifth-order solution and the
/// embedded error estimate.
fn dopri_step(
    f: &dyn Fn(f64, &[f64; 2]) -> [f64; 2],
    t: f64,
    y: &[f64; 2],
    h: f64,
) -> ([f64; 2], [f64; 2]) {
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut k = [[0.0f64; 2]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; 2];
    for s in 0..7 {
        for d in 0..2 {
            y5[d] += h * B5[s] * k[s][d];
            err[d] += h * (B5[s] - B4[s]) * k[s][d];
        }
    }
    (y5, err)
}
