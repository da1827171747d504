//! Small sparse kernels on top of `nalgebra_sparse::CsrMatrix`.

use nalgebra::DMatrix;
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use std::collections::VecDeque;

use crate::{Error, Result};

pub(crate) fn diag(v: &[f64]) -> CsrMatrix<f64> {
    let n = v.len();
    CsrMatrix::try_from_csr_data(n, n, (0..=n).collect(), (0..n).collect(), v.to_vec())
        .expect("valid diagonal pattern")
}

pub(crate) fn from_triplets(
    rows: usize,
    cols: usize,
    entries: impl IntoIterator<Item = (usize, usize, f64)>,
) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(rows, cols);
    for (i, j, v) in entries {
        coo.push(i, j, v);
    }
    CsrMatrix::from(&coo)
}

pub(crate) fn principal_submatrix(a: &CsrMatrix<f64>, keep: &[usize]) -> CsrMatrix<f64> {
    let mut map = vec![usize::MAX; a.nrows()];
    for (new, &old) in keep.iter().enumerate() {
        map[old] = new;
    }
    let mut offsets = Vec::with_capacity(keep.len() + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    offsets.push(0);
    for &old in keep {
        let row = a.row(old);
        let mut entries: Vec<(usize, f64)> = row
            .col_indices()
            .iter()
            .zip(row.values())
            .filter(|(c, _)| map[**c] != usize::MAX)
            .map(|(c, v)| (map[*c], *v))
            .collect();
        entries.sort_by_key(|e| e.0);
        for (c, v) in entries {
            cols.push(c);
            vals.push(v);
        }
        offsets.push(cols.len());
    }
    CsrMatrix::try_from_csr_data(keep.len(), keep.len(), offsets, cols, vals)
        .expect("valid submatrix pattern")
}

pub(crate) fn to_dense(a: &CsrMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        m[(i, j)] += *v;
    }
    m
}

pub(crate) fn matvec(a: &CsrMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (0..a.nrows())
        .map(|i| {
            let row = a.row(i);
            row.col_indices().iter().zip(row.values()).map(|(c, v)| v * x[*c]).sum()
        })
        .collect()
}

pub(crate) fn inf_norm(a: &CsrMatrix<f64>) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).values().iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest entry of `|A - Aᵀ|`.
pub(crate) fn max_asymmetry(a: &CsrMatrix<f64>) -> f64 {
    let t = a.transpose();
    let d = a - &t;
    d.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn adjacency(a: &CsrMatrix<f64>) -> Vec<Vec<usize>> {
    (0..a.nrows())
        .map(|i| {
            let row = a.row(i);
            row.col_indices()
                .iter()
                .zip(row.values())
                .filter(|(c, v)| **c != i && **v != 0.0)
                .map(|(c, _)| *c)
                .collect()
        })
        .collect()
}

fn bfs_levels(adj: &[Vec<usize>], root: usize, mark: &mut [usize], stamp: usize) -> Vec<Vec<usize>> {
    let mut levels = vec![vec![root]];
    mark[root] = stamp;
    loop {
        let mut next = Vec::new();
        for &v in levels.last().unwrap() {
            for &w in &adj[v] {
                if mark[w] != stamp {
                    mark[w] = stamp;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

/// Reverse Cuthill-McKee ordering; `perm[new] = old`.
pub(crate) fn rcm_order(a: &CsrMatrix<f64>) -> Vec<usize> {
    let n = a.nrows();
    let adj = adjacency(a);
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut placed = vec![false; n];
    let mut mark = vec![usize::MAX; n];
    let mut stamp = 0;
    let mut order = Vec::with_capacity(n);
    for seed in 0..n {
        if placed[seed] {
            continue;
        }
        // pseudo-peripheral start
        let mut root = seed;
        let mut depth = 0;
        for _ in 0..8 {
            stamp += 1;
            let levels = bfs_levels(&adj, root, &mut mark, stamp);
            if levels.len() <= depth {
                break;
            }
            depth = levels.len();
            let last = levels.last().unwrap();
            let cand = *last.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
            if cand == root {
                break;
            }
            root = cand;
        }
        let mut queue = VecDeque::from([root]);
        placed[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !placed[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Cholesky factor stored by rows over each row's envelope.
pub(crate) struct EnvelopeCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub(crate) fn factor(a: &CsrMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let perm = rcm_order(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (old, row) in (0..n).map(|i| (i, a.row(i))) {
            let i = inv[old];
            for &c in row.col_indices() {
                let j = inv[c];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for i in 0..n {
            offsets.push(offsets[i] + i - first[i] + 1);
        }
        let mut data = vec![0.0; offsets[n]];
        for old in 0..n {
            let i = inv[old];
            let row = a.row(old);
            for (c, v) in row.col_indices().iter().zip(row.values()) {
                let j = inv[*c];
                if j <= i {
                    data[offsets[i] + j - first[i]] += *v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let (head, tail) = data.split_at_mut(offsets[i]);
            let row_i = &mut tail[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let row_j = &head[offsets[j]..offsets[j + 1]];
                let k0 = fi.max(fj);
                let mut s = row_i[j - fi];
                for k in k0..j {
                    s -= row_i[k - fi] * row_j[k - fj];
                }
                row_i[j - fi] = s / row_j[j - fj];
            }
            let mut d = row_i[i - fi];
            for k in fi..i {
                d -= row_i[k - fi] * row_i[k - fi];
            }
            if !(d > 0.0) {
                return Err(Error::Solver {
                    message: format!("shifted operator is not positive definite at pivot {i}"),
                    diagnostics: vec![d],
                });
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(Self { perm, first, offsets, data })
    }

    #[cfg(test)]
    pub(crate) fn envelope_size(&self) -> usize {
        self.data.len()
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.offsets[i]..self.offsets[i + 1]];
            let mut s = y[i];
            for k in fi..i {
                s -= row[k - fi] * y[k];
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.offsets[i]..self.offsets[i + 1]];
            y[i] /= row[i - fi];
            let yi = y[i];
            for k in fi..i {
                y[k] -= row[k - fi] * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
