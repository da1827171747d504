//! First positive zero of the Bessel function of the first kind.

/// Normalised power series `Γ(ν+1) (2/x)^ν J_ν(x)`.
///
/// The prefactor `(x/2)^ν / Γ(ν+1)` is positive for `x > 0`, so this series has
/// the same zeros as `J_ν` while avoiding the gamma function entirely.
pub(crate) fn normalized_series(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..400 {
        let kf = k as f64;
        term *= -q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) && kf > q.sqrt() {
            break;
        }
    }
    sum
}

/// `j_{ν,1}`, the first positive zero of `J_ν`, for `ν ≥ 0`.
///
/// Scans the normalised series for its first sign change and refines the
/// bracket by bisection down to adjacent floating point numbers.
pub fn bessel_first_zero(nu: f64) -> crate::Result<f64> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(crate::Error::domain(format!(
            "Bessel order must be finite and non-negative, got {nu}"
        )));
    }
    // j_{ν,1} > ν, and J_ν stays positive on (0, j_{ν,1}).
    let step = 0.05;
    let mut lo = nu.max(step);
    if normalized_series(nu, lo) <= 0.0 {
        lo = step;
    }
    let mut hi = lo + step;
    while normalized_series(nu, hi) > 0.0 {
        lo = hi;
        hi += step;
        if hi > nu + 10.0 * nu.cbrt() + 10.0 {
            return Err(crate::Error::solver(format!(
                "no sign change found for J_{nu} below {hi}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if normalized_series(nu, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_zero_is_pi() {
        let j = bessel_first_zero(0.5).unwrap();
        assert!((j - PI).abs() <= 1e-12 * PI, "{j}");
    }

    #[test]
    fn series_matches_sine_for_half_order() {
        // Γ(3/2)(2/x)^{1/2} J_{1/2}(x) = sin(x)/x
        for &x in &[0.3, 1.0, 2.5, 7.0] {
            let s = normalized_series(0.5, x);
            assert!((s - x.sin() / x).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn rejects_negative_order() {
        assert!(bessel_first_zero(-0.5).is_err());
        assert!(bessel_first_zero(f64::NAN).is_err());
    }

    #[test]
    fn zeros_increase_with_order() {
        let mut prev = 0.0;
        for i in 0..12 {
            let j = bessel_first_zero(0.5 * i as f64).unwrap();
            assert!(j > prev);
            assert!(j > 0.5 * i as f64);
            prev = j;
        }
    }
}
