//! Upper bounds for Hodge Laplacian eigenvalues and related spectral quantities.
//!
//! Every operation validates the hypotheses of its bound, selects the
//! `k`-regime where one applies, and tags the result with the identifier of the
//! statement it evaluates so that reports stay auditable.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::spaceform::{ball_dirichlet_eigenvalue, sphere_volume_any, ModelSpace};
use crate::{Error, Result};

pub const SOURCE_CHENG: &str = "Thm 1.1";
pub const SOURCE_HODGE: &str = "Thm 1.2";
pub const SOURCE_NONNEG_RICCI: &str = "Cor 3.3";
pub const SOURCE_NEG_RICCI_EVEN: &str = "Cor 3.4(even)";
pub const SOURCE_NEG_RICCI_ODD: &str = "Cor 3.4(odd)";
pub const SOURCE_VOLUME: &str = "Thm 3.5";
pub const SOURCE_CONNECTION: &str = "Cor 3.7";
pub const SOURCE_SIGMA_HARMONIC_INFINITE: &str = "Cor 4.2";
pub const SOURCE_SIGMA_NONCOMPACT: &str = "Thm 4.5";

/// How the curvature parameter `ξ` enters the Ricci lower bound.
///
/// Never inferred from the sign of `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RicciConvention {
    /// `Ric ≥ (n-1) ξ`, `ξ` of any sign.
    LowerBound,
    /// `Ric ≥ -(n-1) ξ` with `ξ ≥ 0`.
    NegativeLowerBound,
}

/// Hypothesis parameters of a class of Riemannian manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldClass {
    pub n: usize,
    pub xi: f64,
    pub convention: RicciConvention,
    /// Injectivity radius lower bound.
    pub r0: Option<f64>,
    /// Harmonic radius lower bound; `f64::INFINITY` encodes the `r_H → ∞` limit.
    #[serde(rename = "rH")]
    pub rh: Option<f64>,
    /// Diameter.
    #[serde(rename = "D")]
    pub diameter: Option<f64>,
    /// Volume.
    #[serde(rename = "V")]
    pub volume: Option<f64>,
}

impl ManifoldClass {
    pub fn new(n: usize, xi: f64, convention: RicciConvention) -> Result<Self> {
        let mc = Self {
            n,
            xi,
            convention,
            r0: None,
            rh: None,
            diameter: None,
            volume: None,
        };
        mc.validate()?;
        Ok(mc)
    }

    pub fn with_rh(mut self, rh: f64) -> Result<Self> {
        self.rh = Some(rh);
        self.validate()?;
        Ok(self)
    }

    pub fn with_diameter(mut self, d: f64) -> Result<Self> {
        self.diameter = Some(d);
        self.validate()?;
        Ok(self)
    }

    pub fn with_volume(mut self, v: f64) -> Result<Self> {
        self.volume = Some(v);
        self.validate()?;
        Ok(self)
    }

    pub fn with_r0(mut self, r0: f64) -> Result<Self> {
        self.r0 = Some(r0);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain(format!("dimension n must be >= 2, got {}", self.n)));
        }
        if !self.xi.is_finite() {
            return Err(Error::domain("curvature parameter xi must be finite"));
        }
        if self.convention == RicciConvention::NegativeLowerBound && self.xi < 0.0 {
            return Err(Error::hypothesis(
                "the negative-lower-bound convention Ric >= -(n-1) xi requires xi >= 0",
            ));
        }
        if let Some(rh) = self.rh {
            if !(rh > 0.0) {
                return Err(Error::domain(format!("harmonic radius rH must be > 0, got {rh}")));
            }
        }
        if let Some(d) = self.diameter {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::domain(format!("diameter D must be positive, got {d}")));
            }
        }
        if let Some(v) = self.volume {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("volume V must be positive, got {v}")));
            }
        }
        if let Some(r0) = self.r0 {
            if !(r0 > 0.0) {
                return Err(Error::domain(format!("injectivity radius r0 must be > 0, got {r0}")));
            }
            if let Some(rh) = self.rh {
                if rh > r0 {
                    return Err(Error::hypothesis(format!(
                        "harmonic radius rH = {rh} exceeds the injectivity radius bound r0 = {r0}"
                    )));
                }
            }
        }
        if let (RicciConvention::LowerBound, Some(d)) = (self.convention, self.diameter) {
            if self.xi > 0.0 && d > PI / self.xi.sqrt() {
                return Err(Error::hypothesis(format!(
                    "Myers' theorem: Ric >= (n-1) xi with xi = {} forces D <= pi/sqrt(xi) = {}, got D = {d}",
                    self.xi,
                    PI / self.xi.sqrt()
                )));
            }
        }
        Ok(())
    }

    /// The Ricci lower bound expressed in the `Ric ≥ (n-1) κ` convention.
    pub fn ricci_lower(&self) -> f64 {
        match self.convention {
            RicciConvention::LowerBound => self.xi,
            RicciConvention::NegativeLowerBound => -self.xi,
        }
    }

    fn require_diameter(&self) -> Result<f64> {
        self.diameter
            .ok_or_else(|| Error::hypothesis("this bound needs the diameter D"))
    }

    fn require_rh(&self) -> Result<f64> {
        self.rh
            .ok_or_else(|| Error::hypothesis("this bound needs the harmonic radius rH"))
    }

    fn require_finite_rh(&self) -> Result<f64> {
        let rh = self.require_rh()?;
        if !rh.is_finite() {
            return Err(Error::hypothesis("this bound needs a finite harmonic radius rH"));
        }
        Ok(rh)
    }

    fn require_convention(&self, want: RicciConvention) -> Result<()> {
        if self.convention != want {
            return Err(Error::hypothesis(format!(
                "this bound is stated for the {want:?} Ricci convention, got {:?}",
                self.convention
            )));
        }
        Ok(())
    }

    fn check_p(&self, p: usize) -> Result<()> {
        if p > self.n {
            return Err(Error::domain(format!(
                "form degree p = {p} exceeds the dimension n = {}",
                self.n
            )));
        }
        Ok(())
    }

    fn model(&self) -> Result<ModelSpace> {
        ModelSpace::new(self.n, self.ricci_lower())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `k ≥ D / (2 r_H)`: balls of radius `D/2k` fit inside the harmonic radius.
    LargeK,
    /// `k ≤ D / (2 r_H)`: the ball radius is capped at `r_H`.
    SmallK,
    NotApplicable,
}

/// One evaluated bound. `value` is `None` exactly when `regime` is `NotApplicable`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: Option<f64>,
    pub regime: Regime,
    pub source: String,
    pub k: usize,
    pub p: usize,
    pub inputs: ManifoldClass,
}

impl BoundResult {
    fn new(value: f64, regime: Regime, source: &str, k: usize, p: usize, mc: &ManifoldClass) -> Self {
        Self {
            value: Some(value),
            regime,
            source: source.to_string(),
            k,
            p,
            inputs: *mc,
        }
    }

    /// The bound value; `+∞` when not applicable.
    pub fn value_or_inf(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }
}

/// Regime of `k` relative to the threshold `D/(2 r_H)`; `(large, small)`.
fn regimes(k: usize, diameter: f64, rh: f64) -> (bool, bool) {
    let threshold = diameter / (2.0 * rh);
    let k = k as f64;
    (k >= threshold, k <= threshold)
}

fn check_k(k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::domain("eigenvalue index k is 1-based and must be >= 1"));
    }
    Ok(())
}

fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

/// Cheng's comparison for functions, `λ_k ≤ λ_0^D(B_ξ(D/2k))`.
pub fn cheng_function_bound(mc: &ManifoldClass, k: usize) -> Result<BoundResult> {
    mc.validate()?;
    check_k(k)?;
    mc.require_convention(RicciConvention::LowerBound)?;
    let d = mc.require_diameter()?;
    let ball = ball_dirichlet_eigenvalue(&mc.model()?, d / (2.0 * k as f64))?;
    Ok(BoundResult::new(ball.lambda, Regime::LargeK, SOURCE_CHENG, k, 0, mc))
}

/// Upper bound for `λ_{k,p}` of the Hodge Laplacian under a Ricci lower bound
/// and a harmonic radius lower bound.
pub fn hodge_bound(mc: &ManifoldClass, k: usize, p: usize) -> Result<BoundResult> {
    mc.validate()?;
    check_k(k)?;
    mc.check_p(p)?;
    mc.require_convention(RicciConvention::LowerBound)?;
    let d = mc.require_diameter()?;
    let rh = mc.require_rh()?;
    let model = mc.model()?;
    let factor = pow2(2 * p as i32 + 1);
    let (large, small) = regimes(k, d, rh);
    let large_value = if large {
        Some(factor * ball_dirichlet_eigenvalue(&model, d / (2.0 * k as f64))?.lambda)
    } else {
        None
    };
    let small_value = if small {
        Some(factor * ball_dirichlet_eigenvalue(&model, rh)?.lambda)
    } else {
        None
    };
    let (value, regime) = match (large_value, small_value) {
        (Some(a), Some(b)) => (a.min(b), Regime::LargeK),
        (Some(a), None) => (a, Regime::LargeK),
        (None, Some(b)) => (b, Regime::SmallK),
        (None, None) => unreachable!("every k is on one side of the threshold"),
    };
    Ok(BoundResult::new(value, regime, SOURCE_HODGE, k, p, mc))
}

/// Closed-form bound for non-negative Ricci curvature.
pub fn nonneg_ricci_bound(mc: &ManifoldClass, k: usize, p: usize) -> Result<BoundResult> {
    mc.validate()?;
    check_k(k)?;
    mc.check_p(p)?;
    if mc.ricci_lower() < 0.0 {
        return Err(Error::hypothesis(
            "the non-negative Ricci bound needs Ric >= 0 (xi >= 0 in the lower-bound convention)",
        ));
    }
    let d = mc.require_diameter()?;
    let rh = mc.require_rh()?;
    let n2 = (mc.n * mc.n) as f64;
    let kf = k as f64;
    let pe = 2 * p as i32;
    let (large, small) = regimes(k, d, rh);
    let large_value = large.then(|| pow2(pe + 1) * n2 * PI * PI * kf * kf / (d * d));
    let small_value = small.then(|| pow2(pe - 1) * n2 * PI * PI / (rh * rh));
    let (value, regime) = pick(large_value, small_value);
    Ok(BoundResult::new(value, regime, SOURCE_NONNEG_RICCI, k, p, mc))
}

fn pick(large: Option<f64>, small: Option<f64>) -> (f64, Regime) {
    match (large, small) {
        (Some(a), Some(b)) => (a.min(b), Regime::LargeK),
        (Some(a), None) => (a, Regime::LargeK),
        (None, Some(b)) => (b, Regime::SmallK),
        (None, None) => unreachable!("every k is on one side of the threshold"),
    }
}

/// Closed-form bound for `Ric ≥ -(n-1) ξ`, split by the parity of `n`.
pub fn neg_ricci_bound(mc: &ManifoldClass, k: usize, p: usize) -> Result<BoundResult> {
    mc.validate()?;
    check_k(k)?;
    mc.check_p(p)?;
    mc.require_convention(RicciConvention::NegativeLowerBound)?;
    let d = mc.require_diameter()?;
    let rh = mc.require_rh()?;
    let n = mc.n;
    let pe = 2 * p as i32;
    let kf = k as f64;
    // (curvature coefficient, geometric coefficient, source)
    let (curv, geom, source) = if n % 2 == 0 {
        let m = (n / 2 - 1) as i32;
        let c = (2 * m + 1) as f64;
        let g = (1.0 + pow2(m)).powi(2) * PI * PI;
        (c * c, g, SOURCE_NEG_RICCI_EVEN)
    } else {
        if n < 3 {
            return Err(Error::domain("odd-dimensional branch needs n >= 3"));
        }
        let m = ((n - 3) / 2) as i32;
        let c = (2 * m + 2) as f64;
        let g = (1.0 + pow2(2 * m)).powi(2) * (1.0 + PI * PI);
        (c * c, g, SOURCE_NEG_RICCI_ODD)
    };
    let base = pow2(pe - 1) * curv * mc.xi;
    let (large, small) = regimes(k, d, rh);
    let large_value = large.then(|| base + pow2(pe + 3) * geom * kf * kf / (d * d));
    let small_value = small.then(|| base + pow2(pe + 1) * geom / (rh * rh));
    let (value, regime) = pick(large_value, small_value);
    Ok(BoundResult::new(value, regime, source, k, p, mc))
}

/// Volume bound for large `k`, under `Ric ≥ (n-1) ξ` with `ξ < 0` and `r_H ≤ 1/√|ξ|`.
///
/// Returns a `NotApplicable` result when `k ≤ 2^n V / (α_{n-1} r_H^n)`.
pub fn volume_bound(mc: &ManifoldClass, k: usize, p: usize) -> Result<BoundResult> {
    mc.validate()?;
    check_k(k)?;
    mc.check_p(p)?;
    mc.require_convention(RicciConvention::LowerBound)?;
    if !(mc.xi < 0.0) {
        return Err(Error::hypothesis(
            "the volume bound uses hyperbolic comparison and needs xi < 0 in Ric >= (n-1) xi",
        ));
    }
    let v = mc
        .volume
        .ok_or_else(|| Error::hypothesis("the volume bound needs the volume V"))?;
    let rh = mc.require_finite_rh()?;
    if rh > 1.0 / mc.xi.abs().sqrt() {
        return Err(Error::hypothesis(format!(
            "the volume bound needs rH <= 1/sqrt(|xi|) = {}, got rH = {rh}",
            1.0 / mc.xi.abs().sqrt()
        )));
    }
    let n = mc.n;
    let threshold = pow2(n as i32) * v / (sphere_volume_any(n - 1) * rh.powi(n as i32));
    if !((k as f64) > threshold) {
        return Ok(BoundResult {
            value: None,
            regime: Regime::NotApplicable,
            source: SOURCE_VOLUME.to_string(),
            k,
            p,
            inputs: *mc,
        });
    }
    let value = pow2(2 * p as i32 + n as i32 + 5)
        * (k as f64 + 1.0)
        * (sphere_volume_any(n) / v).powf(2.0 / n as f64);
    Ok(BoundResult::new(value, Regime::LargeK, SOURCE_VOLUME, k, p, mc))
}

/// Bound on the first non-zero eigenvalue of the connection Laplacian on 1-forms.
///
/// The printed constant carries a form degree; `p` is exposed and defaults to 1
/// at call sites.
pub fn connection_laplacian_bound(mc: &ManifoldClass, p: usize) -> Result<BoundResult> {
    mc.validate()?;
    mc.check_p(p)?;
    mc.require_convention(RicciConvention::LowerBound)?;
    if mc.xi < 0.0 {
        return Err(Error::hypothesis("the connection Laplacian bound needs Ric >= 0"));
    }
    let rh = mc.require_finite_rh()?;
    let n2 = (mc.n * mc.n) as f64;
    let value = pow2(2 * p as i32 + 1) * n2 * PI * PI / (rh * rh);
    Ok(BoundResult::new(value, Regime::SmallK, SOURCE_CONNECTION, 1, p, mc))
}

/// Bounds on the bottom of the `L²` spectrum of `p`-forms on a complete non-compact manifold.
///
/// With an infinite harmonic radius and the negative-lower-bound convention the
/// closed form `2^{2p-1} (n-1)² ξ` applies; with a finite harmonic radius and the
/// lower-bound convention the model-ball bound `2^{2p+1} λ_0^D(B_ξ(r_H))` applies.
pub fn sigma_p_bounds(mc: &ManifoldClass, p: usize) -> Result<Vec<BoundResult>> {
    mc.validate()?;
    mc.check_p(p)?;
    let rh = mc.require_rh()?;
    let mut out = Vec::new();
    let pe = 2 * p as i32;
    if rh.is_infinite() {
        mc.require_convention(RicciConvention::NegativeLowerBound)?;
        let nm1 = (mc.n - 1) as f64;
        let value = pow2(pe - 1) * nm1 * nm1 * mc.xi;
        out.push(BoundResult::new(value, Regime::SmallK, SOURCE_SIGMA_HARMONIC_INFINITE, 0, p, mc));
    } else {
        mc.require_convention(RicciConvention::LowerBound)?;
        let ball = ball_dirichlet_eigenvalue(&mc.model()?, rh)?;
        out.push(BoundResult::new(
            pow2(pe + 1) * ball.lambda,
            Regime::SmallK,
            SOURCE_SIGMA_NONCOMPACT,
            0,
            p,
            mc,
        ));
    }
    Ok(out)
}

/// Bottom of the `L²` spectrum of `p`-forms on hyperbolic space `ℍⁿ`.
pub fn savo_hyperbolic_sigma(n: usize, p: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("dimension must be >= 2, got {n}")));
    }
    if p > n {
        return Err(Error::domain(format!("form degree {p} exceeds dimension {n}")));
    }
    // p ≤ (n+1)/2  ⇔  2p ≤ n+1
    if 2 * p <= n + 1 {
        Ok(0.0)
    } else {
        let d = (2 * p - n - 1) as f64;
        Ok(d * d / 4.0)
    }
}
