use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sparse::{self, EnvelopeCholesky};
use super::Pencil;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Bound on every reported relative residual.
    pub tol: f64,
    /// Largest pencil dimension handled by the dense solver.
    pub dense_limit: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Forces a method regardless of size.
    pub method: Option<SolveMethod>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-8, dense_limit: 2000, seed: 0, max_iterations: 2000, method: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub p: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    pub tol: f64,
    pub method: SolveMethod,
    pub residual_norms: Vec<f64>,
    /// Seed of the random start block (iterative solves only).
    pub seed: Option<u64>,
    pub iterations: usize,
    /// Smallest eigenvalue before clamping tiny negatives to zero.
    pub raw_min: f64,
    pub warnings: Vec<String>,
}

impl SpectrumResult {
    /// Eigenvalues grouped by a relative gap of 1e-6.
    pub fn multiplicities(&self) -> Vec<(f64, usize)> {
        let scale = self.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.eigenvalues {
            match out.last_mut() {
                Some((rep, count)) if (v - *rep).abs() <= 1e-6 * rep.abs().max(1e-6 * scale) => {
                    *count += 1
                }
                _ => out.push((v, 1)),
            }
        }
        out
    }

    /// Eigenvalues above the kernel, ascending.
    pub fn positive(&self) -> &[f64] {
        &self.eigenvalues[self.kernel_dim.min(self.eigenvalues.len())..]
    }
}

/// Mean eigenvalue `tr A / tr B`, the pencil's natural scale.
fn spectral_scale(pencil: &Pencil) -> f64 {
    let tr_a: f64 = (0..pencil.dim())
        .map(|i| {
            let row = pencil.a.row(i);
            row.col_indices()
                .iter()
                .zip(row.values())
                .filter(|(c, _)| **c == i)
                .map(|(_, v)| *v)
                .sum::<f64>()
        })
        .sum();
    let tr_b: f64 = pencil.b.iter().sum();
    (tr_a / tr_b).abs()
}

/// The `num` smallest eigenvalues of the pencil. Requests beyond the number of
/// massive degrees of freedom are truncated with a warning.
pub fn solve_spectrum(pencil: &Pencil, num: usize, cfg: &SolverConfig) -> Result<SpectrumResult> {
    if num == 0 {
        return Err(Error::domain("number of eigenvalues must be >= 1"));
    }
    let rank = pencil.rank_b();
    if rank == 0 {
        return Err(Error::DegenerateDomain("pencil has no degrees of freedom".into()));
    }
    if pencil.b.iter().any(|&b| b < 0.0 || !b.is_finite()) {
        return Err(Error::MeshQuality("mass matrix has negative or non-finite entries".into()));
    }
    let mut warnings = pencil.warnings.clone();
    let k = num.min(rank);
    if k < num {
        warnings.push(format!("requested {num} eigenvalues but only {rank} degrees of freedom exist"));
    }
    let method = cfg.method.unwrap_or(if pencil.dim() <= cfg.dense_limit {
        SolveMethod::Dense
    } else {
        SolveMethod::Iterative
    });
    let (vals, vecs, iterations) = match method {
        SolveMethod::Dense => {
            let (v, x) = dense(pencil, k)?;
            (v, x, 1)
        }
        SolveMethod::Iterative => iterative(pencil, k, cfg)?,
    };
    let a_norm = sparse::inf_norm(&pencil.a);
    let b_norm = pencil.b.iter().fold(0.0f64, |m, v| m.max(*v));
    let residual_norms: Vec<f64> = vals
        .iter()
        .zip(&vecs)
        .map(|(&l, x)| relative_residual(pencil, l, x, a_norm, b_norm))
        .collect();
    if let Some(worst) = residual_norms.iter().copied().reduce(f64::max) {
        if !(worst <= cfg.tol) {
            return Err(Error::Solver {
                message: format!("residual {worst:e} exceeds tolerance {:e}", cfg.tol),
                diagnostics: residual_norms,
            });
        }
    }

    let scale = spectral_scale(pencil);
    let raw_min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let indefinite = !pencil.warnings.is_empty();
    let mut eigenvalues = Vec::with_capacity(vals.len());
    for &l in &vals {
        if l < 0.0 {
            if l < -cfg.tol * scale && !indefinite {
                return Err(Error::Solver {
                    message: format!("eigenvalue {l:e} is negative beyond tolerance"),
                    diagnostics: vals.clone(),
                });
            }
            eigenvalues.push(if indefinite { l } else { 0.0 });
        } else {
            eigenvalues.push(l);
        }
    }
    let first_nonzero = eigenvalues.iter().copied().find(|&l| l > 1e-6 * scale);
    let threshold = 1e-8 * first_nonzero.unwrap_or(1e-6 * scale);
    let kernel_dim = eigenvalues.iter().filter(|&&l| l.abs() <= threshold).count();
    Ok(SpectrumResult {
        p: pencil.p,
        eigenvalues,
        kernel_dim,
        tol: cfg.tol,
        method,
        residual_norms,
        seed: (method == SolveMethod::Iterative).then_some(cfg.seed),
        iterations,
        raw_min,
        warnings,
    })
}

fn relative_residual(pencil: &Pencil, lambda: f64, x: &[f64], a_norm: f64, b_norm: f64) -> f64 {
    let ax = sparse::matvec(&pencil.a, x);
    let r: f64 = ax
        .iter()
        .zip(x)
        .zip(&pencil.b)
        .map(|((ai, xi), bi)| (ai - lambda * bi * xi).powi(2))
        .sum::<f64>()
        .sqrt();
    let xn = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    r / ((a_norm + lambda.abs() * b_norm) * xn)
}

/// Dense solve; massless degrees of freedom are eliminated by a Schur
/// complement before the symmetric similarity `B^{-1/2} S B^{-1/2}`.
fn dense(pencil: &Pencil, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let a = sparse::to_dense(&pencil.a);
    let massive: Vec<usize> = (0..pencil.dim()).filter(|&i| pencil.b[i] > 0.0).collect();
    let massless: Vec<usize> = (0..pencil.dim()).filter(|&i| pencil.b[i] == 0.0).collect();
    let ann = a.select_rows(&massive).select_columns(&massive);
    let (s, slave) = if massless.is_empty() {
        (ann, None)
    } else {
        let azz = a.select_rows(&massless).select_columns(&massless);
        let azn = a.select_rows(&massless).select_columns(&massive);
        let chol = azz.cholesky().ok_or_else(|| Error::Solver {
            message: "massless block is singular".into(),
            diagnostics: vec![],
        })?;
        let x = chol.solve(&azn);
        (ann - azn.transpose() * &x, Some(x))
    };
    let scale: Vec<f64> = massive.iter().map(|&i| 1.0 / pencil.b[i].sqrt()).collect();
    let m = massive.len();
    let mut c = DMatrix::from_fn(m, m, |i, j| s[(i, j)] * scale[i] * scale[j]);
    c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let mut vals = Vec::with_capacity(k);
    let mut vecs = Vec::with_capacity(k);
    for &col in idx.iter().take(k) {
        vals.push(eig.eigenvalues[col]);
        let y: Vec<f64> = (0..m).map(|i| eig.eigenvectors[(i, col)] * scale[i]).collect();
        let mut x = vec![0.0; pencil.dim()];
        for (i, &g) in massive.iter().enumerate() {
            x[g] = y[i];
        }
        if let Some(sl) = &slave {
            for (zi, &g) in massless.iter().enumerate() {
                x[g] = -(0..m).map(|j| sl[(zi, j)] * y[j]).sum::<f64>();
            }
        }
        vecs.push(x);
    }
    Ok((vals, vecs))
}

/// Shift-invert subspace iteration with Rayleigh-Ritz on `K = A + τB`.
fn iterative(pencil: &Pencil, k: usize, cfg: &SolverConfig) -> Result<(Vec<f64>, Vec<Vec<f64>>, usize)> {
    let n = pencil.dim();
    let rank = pencil.rank_b();
    let q = rank.min(k + k.max(16));
    let tau = 1e-4 * spectral_scale(pencil).max(f64::MIN_POSITIVE);
    let shifted = &pencil.a + &sparse::diag(&pencil.b.iter().map(|b| tau * b).collect::<Vec<_>>());
    let chol = EnvelopeCholesky::factor(&shifted)?;
    let a_norm = sparse::inf_norm(&pencil.a);
    let b_norm = pencil.b.iter().fold(0.0f64, |m, v| m.max(*v));
    let b = &pencil.b;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random_vec = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    };
    let mut x: Vec<Vec<f64>> = (0..q).map(|_| random_vec(&mut rng)).collect();
    let mut last = vec![];
    for iter in 1..=cfg.max_iterations {
        let mut y: Vec<Vec<f64>> = x
            .par_iter()
            .map(|col| {
                let rhs: Vec<f64> = col.iter().zip(b).map(|(v, w)| v * w).collect();
                chol.solve(&rhs)
            })
            .collect();
        for col in y.iter_mut() {
            let nb = col.iter().zip(b).map(|(v, w)| w * v * v).sum::<f64>().sqrt();
            if nb > 0.0 {
                col.iter_mut().for_each(|v| *v /= nb);
            }
        }
        let ay: Vec<Vec<f64>> = y.par_iter().map(|col| sparse::matvec(&pencil.a, col)).collect();
        let m = y.len();
        let ga = DMatrix::from_fn(m, m, |i, j| dotp(&y[i], &ay[j]));
        let gb = DMatrix::from_fn(m, m, |i, j| y[i].iter().zip(&y[j]).zip(b).map(|((u, v), w)| u * v * w).sum());
        let ga = (&ga + ga.transpose()) * 0.5;
        let gb = (&gb + gb.transpose()) * 0.5;
        let eb = SymmetricEigen::new(gb);
        let dmax = eb.eigenvalues.iter().fold(0.0f64, |a, v| a.max(*v));
        let keep: Vec<usize> = (0..m).filter(|&i| eb.eigenvalues[i] > 1e-12 * dmax).collect();
        let w = DMatrix::from_fn(m, keep.len(), |i, j| {
            eb.eigenvectors[(i, keep[j])] / eb.eigenvalues[keep[j]].sqrt()
        });
        let c = w.transpose() * &ga * &w;
        let c = (&c + c.transpose()) * 0.5;
        let ec = SymmetricEigen::new(c);
        let mut order: Vec<usize> = (0..keep.len()).collect();
        order.sort_by(|&i, &j| ec.eigenvalues[i].total_cmp(&ec.eigenvalues[j]).then(i.cmp(&j)));
        let coef = &w * &ec.eigenvectors;
        let combine = |basis: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (j, bj) in basis.iter().enumerate() {
                let cj = coef[(j, col)];
                if cj != 0.0 {
                    out.iter_mut().zip(bj).for_each(|(o, v)| *o += cj * v);
                }
            }
            out
        };
        let new_x: Vec<Vec<f64>> = order.par_iter().map(|&col| combine(&y, col)).collect();
        let new_ax: Vec<Vec<f64>> = order.par_iter().take(k).map(|&col| combine(&ay, col)).collect();
        let theta: Vec<f64> = order.iter().map(|&i| ec.eigenvalues[i]).collect();
        let res: Vec<f64> = (0..k.min(theta.len()))
            .map(|i| {
                let l = theta[i];
                let xi = &new_x[i];
                let r = new_ax[i]
                    .iter()
                    .zip(xi)
                    .zip(b)
                    .map(|((a, v), w)| (a - l * w * v).powi(2))
                    .sum::<f64>()
                    .sqrt();
                r / ((a_norm + l.abs() * b_norm) * dotp(xi, xi).sqrt())
            })
            .collect();
        if theta.len() >= k && res.iter().all(|&r| r <= 0.1 * cfg.tol) {
            return Ok((theta[..k].to_vec(), new_x[..k].to_vec(), iter));
        }
        last = res;
        x = new_x;
        while x.len() < q {
            x.push(random_vec(&mut rng));
        }
    }
    Err(Error::Solver {
        message: format!("subspace iteration did not converge in {} iterations", cfg.max_iterations),
        diagnostics: last,
    })
}

fn dotp(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}
