use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadformFailure {
    pub seed: u64,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadformSummary {
    pub trials: usize,
    pub dim1: usize,
    pub dim2: usize,
    pub base_seed: u64,
    pub failures: Vec<QuadformFailure>,
    /// Smallest `λ_k(Q1) / ((C2/C1) λ_k(Q2))` seen; `>= 1` means no violation.
    pub min_ratio: f64,
}

impl QuadformSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Eigenvalues of the pencil `(q, g)` with `g` positive definite, ascending.
fn pencil_eigenvalues(q: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<Vec<f64>> {
    let l = g.clone().cholesky().ok_or_else(|| Error::solver("inner product is not positive definite"))?.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::solver("singular Cholesky factor"))?;
    let c = &linv * q * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

/// Random positive definite matrix, bounded away from singular.
fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = random_matrix(rng, n, n);
    &m * m.transpose() + DMatrix::identity(n, n) * 0.1
}

/// One trial: `(C1, C2, λ(Q1), λ(Q2))` with the sharpest admissible constants.
pub(crate) struct Trial {
    pub c1: f64,
    pub c2: f64,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
}

pub(crate) fn evaluate(
    g1: &DMatrix<f64>,
    q1: &DMatrix<f64>,
    g2: &DMatrix<f64>,
    q2: &DMatrix<f64>,
    phi: &DMatrix<f64>,
) -> Result<Trial> {
    let pg2 = phi.transpose() * g2 * phi;
    let pq2 = phi.transpose() * q2 * phi;
    // ⟨f,f⟩₁ ≤ C1 ⟨Φf,Φf⟩₂ sharpest: max eigenvalue of (G1, ΦᵀG2Φ)
    let c1 = *pencil_eigenvalues(g1, &pg2)?.last().unwrap();
    // Q1(f) ≥ C2 Q2(Φf) sharpest: min eigenvalue of (Q1, ΦᵀQ2Φ)
    let c2 = pencil_eigenvalues(q1, &pq2)?[0];
    Ok(Trial { c1, c2, lambda1: pencil_eigenvalues(q1, g1)?, lambda2: pencil_eigenvalues(q2, g2)? })
}

/// Randomized check of `λ_k(Q1) ≥ (C2/C1) λ_k(Q2)` for injective `Φ`.
/// Trial `t` is drawn from seed `seed + t`, so each failure is reproducible.
pub fn quadform_comparison_check(trials: usize, dim1: usize, dim2: usize, seed: u64) -> Result<QuadformSummary> {
    if dim1 == 0 || dim1 > dim2 {
        return Err(Error::domain(format!("need 1 <= dim1 <= dim2, got {dim1}, {dim2}")));
    }
    let mut failures = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let phi = loop {
            let phi = random_matrix(&mut rng, dim2, dim1);
            let sv = phi.clone().svd(false, false).singular_values;
            if sv.iter().fold(f64::INFINITY, |m, v| m.min(*v)) > 1e-6 {
                break phi;
            }
        };
        let g1 = random_spd(&mut rng, dim1);
        let g2 = random_spd(&mut rng, dim2);
        let q1 = random_spd(&mut rng, dim1);
        let q2 = random_spd(&mut rng, dim2);
        let tr = evaluate(&g1, &q1, &g2, &q2, &phi)?;
        check_trial(&tr, trial_seed, &mut failures, &mut min_ratio);
    }
    Ok(QuadformSummary { trials, dim1, dim2, base_seed: seed, failures, min_ratio })
}

pub(crate) fn check_trial(tr: &Trial, seed: u64, failures: &mut Vec<QuadformFailure>, min_ratio: &mut f64) {
    for (k, (l1, l2)) in tr.lambda1.iter().zip(&tr.lambda2).enumerate() {
        let rhs = tr.c2 / tr.c1 * l2;
        *min_ratio = min_ratio.min(l1 / rhs);
        if *l1 < rhs * (1.0 - 1e-10) {
            failures.push(QuadformFailure { seed, k: k + 1, lhs: *l1, rhs });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_map_is_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_spd(&mut rng, 4);
        let q = random_spd(&mut rng, 4);
        let tr = evaluate(&g, &q, &g, &q, &DMatrix::identity(4, 4)).unwrap();
        assert!((tr.c1 - 1.0).abs() < 1e-12 && (tr.c2 - 1.0).abs() < 1e-12);
        for (a, b) in tr.lambda1.iter().zip(&tr.lambda2) {
            assert!((a - b).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn seeded_suite_has_no_violations() {
        let s = quadform_comparison_check(200, 5, 8, 2024).unwrap();
        assert!(s.passed(), "{:?}", s.failures);
        assert!(s.min_ratio >= 1.0 - 1e-10);
        assert_eq!(s, quadform_comparison_check(200, 5, 8, 2024).unwrap());
    }

    #[test]
    fn violation_is_reported_with_seed() {
        // constants that are too generous must trip the check
        let tr = Trial { c1: 1.0, c2: 2.0, lambda1: vec![1.0], lambda2: vec![1.0] };
        let mut f = Vec::new();
        let mut r = f64::INFINITY;
        check_trial(&tr, 77, &mut f, &mut r);
        assert_eq!(f, vec![QuadformFailure { seed: 77, k: 1, lhs: 1.0, rhs: 2.0 }]);
    }

    #[test]
    fn dimension_guard() {
        assert!(quadform_comparison_check(1, 9, 8, 0).is_err());
    }
}
