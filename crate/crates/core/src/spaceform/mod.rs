//! Geometry of the simply connected constant-curvature model spaces.
//!
//! A [`ModelSpace`] is the pair `(n, ξ)`: the sphere of radius `1/√ξ` for
//! `ξ > 0`, Euclidean space for `ξ = 0` and hyperbolic space of curvature `ξ`
//! for `ξ < 0`. Everything here is a pure function of its inputs.

mod bessel;
mod shooting;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

pub use bessel::bessel_first_zero;
pub use shooting::{ball_dirichlet_eigenvalue, ball_dirichlet_eigenvalue_with, BallSolverConfig};

/// Dimension and sectional curvature of a model space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpace {
    pub n: usize,
    pub xi: f64,
}

impl ModelSpace {
    pub fn new(n: usize, xi: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("model space dimension must be >= 2, got {n}")));
        }
        if !xi.is_finite() {
            return Err(Error::domain(format!("curvature must be finite, got {xi}")));
        }
        Ok(Self { n, xi })
    }

    /// Largest admissible ball radius: `π/√ξ` on the sphere, unbounded otherwise.
    pub fn radius_cap(&self) -> f64 {
        if self.xi > 0.0 {
            PI / self.xi.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Checks `0 < r < π/√ξ`.
    pub(crate) fn check_ball_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::domain(format!("ball radius must be positive and finite, got {r}")));
        }
        if r >= self.radius_cap() {
            return Err(Error::domain(format!(
                "ball radius {r} does not fit in the sphere of curvature {} (cap pi/sqrt(xi) = {})",
                self.xi,
                self.radius_cap()
            )));
        }
        Ok(())
    }

    /// Warping function `s_ξ(t)` of the model metric `dt² + s_ξ(t)² g_{S^{n-1}}`.
    pub fn warp(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("warp argument must be finite and >= 0, got {t}")));
        }
        if t > self.radius_cap() {
            return Err(Error::domain(format!(
                "warp argument {t} exceeds pi/sqrt(xi) = {}",
                self.radius_cap()
            )));
        }
        Ok(self.warp_unchecked(t))
    }

    pub(crate) fn warp_unchecked(&self, t: f64) -> f64 {
        let k = self.xi.abs().sqrt();
        if self.xi == 0.0 || k * t < 1e-8 {
            // s(t) = t - ξ t³/6 + O(t⁵)
            t * (1.0 - self.xi * t * t / 6.0)
        } else if self.xi > 0.0 {
            (k * t).sin() / k
        } else {
            (k * t).sinh() / k
        }
    }

    /// Logarithmic derivative `s'_ξ(t)/s_ξ(t)` for `t > 0`.
    pub(crate) fn warp_log_derivative(&self, t: f64) -> f64 {
        let k = self.xi.abs().sqrt();
        let x = k * t;
        if self.xi == 0.0 || x < 1e-4 {
            // cot and coth expansions: 1/t ∓ ξ t/3 - ξ² t³/45
            1.0 / t - self.xi * t / 3.0 - self.xi * self.xi * t * t * t / 45.0
        } else if self.xi > 0.0 {
            k / x.tan()
        } else {
            k / x.tanh()
        }
    }

    /// Volume of the geodesic ball of radius `r`, `α_{n-1} ∫₀^r s_ξ(t)^{n-1} dt`.
    pub fn model_ball_volume(&self, r: f64) -> Result<f64> {
        model_ball_volume(self, r)
    }
}

/// `s_ξ(t)`; see [`ModelSpace::warp`].
pub fn warp(ms: &ModelSpace, t: f64) -> Result<f64> {
    ms.warp(t)
}

/// Volume of the unit round sphere `S^n`, `α_n = 2π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_volume(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::domain("sphere dimension must be >= 1"));
    }
    Ok(sphere_volume_any(n))
}

/// `α_n` for every `n ≥ 0` (with `α_0 = 2`, the two points of `S^0`).
pub(crate) fn sphere_volume_any(n: usize) -> f64 {
    // α_n = 2π/(n-1) α_{n-2}
    let (mut a, mut k) = if n % 2 == 0 { (2.0, 0) } else { (2.0 * PI, 1) };
    while k < n {
        k += 2;
        a *= 2.0 * PI / (k as f64 - 1.0);
    }
    a
}

/// Geodesic ball volume in the model space.
///
/// Uses the closed form `α_{n-1} r^n / n` when `ξ = 0` and adaptive Simpson
/// quadrature to relative tolerance `1e-10` otherwise.
pub fn model_ball_volume(ms: &ModelSpace, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("ball radius must be positive, got {r}")));
    }
    if r > ms.radius_cap() {
        return Err(Error::domain(format!(
            "ball radius {r} exceeds pi/sqrt(xi) = {}",
            ms.radius_cap()
        )));
    }
    let n = ms.n;
    let area = sphere_volume_any(n - 1);
    if ms.xi == 0.0 {
        return Ok(area * r.powi(n as i32) / n as f64);
    }
    let f = |t: f64| ms.warp_unchecked(t).powi(n as i32 - 1);
    Ok(area * adaptive_simpson(&f, 0.0, r, 1e-10))
}

/// Adaptive Simpson quadrature to a relative tolerance.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // absolute target derived from a coarse estimate of the integral
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    simpson_step(f, a, b, fa, fm, fb, whole, rel_tol * scale, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn warp_examples() {
        let flat = ModelSpace::new(2, 0.0).unwrap();
        assert_eq!(flat.warp(2.5).unwrap(), 2.5);
        let sphere = ModelSpace::new(2, 1.0).unwrap();
        assert!((sphere.warp(PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        let hyp = ModelSpace::new(2, -1.0).unwrap();
        assert!(rel(hyp.warp(1.0).unwrap(), 1.0f64.sinh()) < 1e-15);
        assert!(rel(hyp.warp(1.0).unwrap(), 1.1752011936) < 1e-10);
    }

    #[test]
    fn warp_domain_errors() {
        let sphere = ModelSpace::new(3, 4.0).unwrap();
        assert!(sphere.warp(-1.0).is_err());
        assert!(sphere.warp(PI / 2.0 + 1e-9).is_err());
        assert!(sphere.warp(PI / 2.0).is_ok());
        assert!(ModelSpace::new(1, 0.0).is_err());
    }

    #[test]
    fn warp_is_continuous_at_zero_curvature() {
        for &t in &[0.1, 1.0, 3.0] {
            for &xi in &[1e-9, -1e-9] {
                let ms = ModelSpace::new(3, xi).unwrap();
                assert!(rel(ms.warp(t).unwrap(), t) < 1e-8);
            }
        }
    }

    #[test]
    fn sphere_volume_examples() {
        assert!(rel(sphere_volume(1).unwrap(), 2.0 * PI) < 1e-15);
        assert!(rel(sphere_volume(2).unwrap(), 4.0 * PI) < 1e-15);
        assert!(rel(sphere_volume(3).unwrap(), 2.0 * PI * PI) < 1e-15);
        assert!(sphere_volume(0).is_err());
        // α_4 = 8π²/3
        assert!(rel(sphere_volume(4).unwrap(), 8.0 * PI * PI / 3.0) < 1e-14);
    }

    #[test]
    fn ball_volume_examples() {
        let v = model_ball_volume(&ModelSpace::new(2, 0.0).unwrap(), 1.0).unwrap();
        assert!(rel(v, PI) < 1e-15);
        let v = model_ball_volume(&ModelSpace::new(3, 0.0).unwrap(), 2.0).unwrap();
        assert!(rel(v, 32.0 * PI / 3.0) < 1e-14);
        let v = model_ball_volume(&ModelSpace::new(2, -1.0).unwrap(), 1.0).unwrap();
        let exact = 2.0 * PI * (1.0f64.cosh() - 1.0);
        assert!(rel(v, exact) < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn ball_volume_on_the_sphere() {
        // spherical cap area 2π(1 - cos r), and 3-sphere ball π(2r - sin 2r)
        let s2 = ModelSpace::new(2, 1.0).unwrap();
        for &r in &[0.25, 1.0, 3.0] {
            let v = model_ball_volume(&s2, r).unwrap();
            assert!(rel(v, 2.0 * PI * (1.0 - r.cos())) < 1e-10);
        }
        let s3 = ModelSpace::new(3, 1.0).unwrap();
        let v = model_ball_volume(&s3, 1.0).unwrap();
        assert!(rel(v, PI * (2.0 - 2.0f64.sin())) < 1e-10);
        assert!(model_ball_volume(&s2, 4.0).is_err());
    }

    #[test]
    fn flat_ball_volume_matches_closed_form() {
        for n in 2..=8 {
            let ms = ModelSpace::new(n, 0.0).unwrap();
            let r: f64 = 1.3;
            let closed = sphere_volume_any(n - 1) * r.powi(n as i32) / n as f64;
            assert!(rel(model_ball_volume(&ms, r).unwrap(), closed) < 1e-12);
            // the quadrature route agrees with the closed form
            let f = |t: f64| t.powi(n as i32 - 1);
            let q = sphere_volume_any(n - 1) * adaptive_simpson(&f, 0.0, r, 1e-10);
            assert!(rel(q, closed) < 1e-10);
        }
    }

    #[test]
    fn ball_volume_increases_with_radius() {
        for &xi in &[-1.0, 0.0, 1.0] {
            let ms = ModelSpace::new(3, xi).unwrap();
            let mut prev = 0.0;
            for i in 1..30 {
                let v = model_ball_volume(&ms, 0.1 * i as f64).unwrap();
                assert!(v > prev);
                prev = v;
            }
        }
    }
}
