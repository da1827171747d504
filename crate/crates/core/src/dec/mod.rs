//! Discrete exterior calculus on closed triangulated surfaces.
//!
//! Every Laplacian is produced as a symmetric pencil `(A, B)` with diagonal
//! `B`; nothing ever forms `B⁻¹A`.
//!
//! Right-angled triangles make `★1` vanish on the edge opposite the right
//! angle. Such edges carry no mass in degree 1, so the degree-1 pencil keeps
//! them with `B = 0` (their values are slaved to the others by energy
//! minimisation), and in degree 2 the two triangles across them are merged
//! into one degree of freedom (an infinite `★1⁻¹` forces equal values).

mod dirichlet;
mod eigen;
pub(crate) mod sparse;

use nalgebra_sparse::CsrMatrix;
use serde::{Deserialize, Serialize};

use crate::mesh::SurfaceMesh;
use crate::{Error, Result};

pub use dirichlet::{closed_pencils, dirichlet_spectrum, dirichlet_subproblem, DirichletSubproblem};
pub use eigen::{solve_spectrum, SolveMethod, SolverConfig, SpectrumResult};

/// Relative size below which a `★1` weight counts as zero.
pub const ZERO_WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DecOperators {
    pub d0: CsrMatrix<f64>,
    pub d1: CsrMatrix<f64>,
    pub star0: Vec<f64>,
    pub star1: Vec<f64>,
    pub star2: Vec<f64>,
    /// Fraction of negative `★1` entries.
    pub quality: f64,
    pub zero_weight_edges: usize,
    edge_triangles: Vec<[usize; 2]>,
}

/// Classification of a `★1` weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum WeightClass {
    Positive,
    Zero,
    Negative,
}

impl DecOperators {
    pub fn assemble(mesh: &SurfaceMesh) -> Result<Self> {
        let nv = mesh.num_vertices();
        let ne = mesh.num_edges();
        let nf = mesh.num_triangles();
        let mean_len = mesh.edge_lengths().iter().sum::<f64>() / ne as f64;

        let mut areas = Vec::with_capacity(nf);
        for t in 0..nf {
            let a = mesh.triangle_area(t);
            if !(a > 1e-14 * mean_len * mean_len) {
                return Err(Error::MeshQuality(format!(
                    "triangle {t} {:?} is degenerate (area {a:e})",
                    mesh.triangles()[t]
                )));
            }
            areas.push(a);
        }

        let d0 = sparse::from_triplets(
            ne,
            nv,
            mesh.edges()
                .iter()
                .enumerate()
                .flat_map(|(e, &[a, b])| [(e, a, -1.0), (e, b, 1.0)]),
        );
        let d1 = sparse::from_triplets(
            nf,
            ne,
            (0..nf).flat_map(|t| {
                let es = mesh.triangle_edges(t);
                let ss = mesh.triangle_edge_signs(t);
                (0..3).map(move |s| (t, es[s], ss[s] as f64))
            }),
        );

        let mut star0 = vec![0.0; nv];
        let mut star1 = vec![0.0; ne];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            for &v in tri {
                star0[v] += areas[t] / 3.0;
            }
            let es = mesh.triangle_edges(t);
            for s in 0..3 {
                // the corner opposite edge (tri[s], tri[s+1])
                star1[es[s]] += 0.5 * mesh.corner_cotangent(t, (s + 2) % 3);
            }
        }
        let star2: Vec<f64> = areas.iter().map(|a| 1.0 / a).collect();

        let mut ops = Self {
            d0,
            d1,
            star0,
            star1,
            star2,
            quality: 0.0,
            zero_weight_edges: 0,
            edge_triangles: (0..ne).map(|e| mesh.edge_triangles(e)).collect(),
        };
        let classes = ops.weight_classes();
        ops.quality =
            classes.iter().filter(|c| **c == WeightClass::Negative).count() as f64 / ne as f64;
        ops.zero_weight_edges = classes.iter().filter(|c| **c == WeightClass::Zero).count();
        Ok(ops)
    }

    pub fn num_vertices(&self) -> usize {
        self.star0.len()
    }

    pub fn num_edges(&self) -> usize {
        self.star1.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.star2.len()
    }

    pub(crate) fn weight_classes(&self) -> Vec<WeightClass> {
        let scale = self.star1.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        self.star1
            .iter()
            .map(|&w| {
                if w > ZERO_WEIGHT_TOL * scale {
                    WeightClass::Positive
                } else if w < -ZERO_WEIGHT_TOL * scale {
                    WeightClass::Negative
                } else {
                    WeightClass::Zero
                }
            })
            .collect()
    }

    /// Groups triangles joined across zero-weight edges; returns the
    /// triangles of each group in ascending order of their smallest member.
    pub(crate) fn triangle_clusters(&self) -> Vec<Vec<usize>> {
        let nf = self.num_triangles();
        let mut parent: Vec<usize> = (0..nf).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (e, class) in self.weight_classes().into_iter().enumerate() {
            if class == WeightClass::Zero {
                let [a, b] = self.edge_triangles[e];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut slot = vec![usize::MAX; nf];
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for t in 0..nf {
            let r = find(&mut parent, t);
            if slot[r] == usize::MAX {
                slot[r] = clusters.len();
                clusters.push(Vec::new());
            }
            clusters[slot[r]].push(t);
        }
        clusters
    }
}

/// Generalized symmetric eigenproblem `A x = λ B x` for the Hodge Laplacian
/// in one degree.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub p: usize,
    pub a: CsrMatrix<f64>,
    /// Diagonal of `B`; zero entries mark massless degrees of freedom.
    pub b: Vec<f64>,
    /// The `p`-simplices making up each degree of freedom.
    pub dofs: Vec<Vec<usize>>,
    pub warnings: Vec<String>,
}

impl Pencil {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// Number of degrees of freedom carrying mass.
    pub fn rank_b(&self) -> usize {
        self.b.iter().filter(|&&b| b > 0.0).count()
    }

    /// Restriction to a subset of degrees of freedom (principal submatrix).
    pub fn restrict(&self, keep: &[usize]) -> Pencil {
        Pencil {
            p: self.p,
            a: sparse::principal_submatrix(&self.a, keep),
            b: keep.iter().map(|&i| self.b[i]).collect(),
            dofs: keep.iter().map(|&i| self.dofs[i].clone()).collect(),
            warnings: self.warnings.clone(),
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        sparse::max_asymmetry(&self.a)
    }

    /// `xᵀ A x`.
    pub fn energy(&self, x: &[f64]) -> f64 {
        sparse::matvec(&self.a, x).iter().zip(x).map(|(u, v)| u * v).sum()
    }

    /// `xᵀ B x`.
    pub fn mass(&self, x: &[f64]) -> f64 {
        self.b.iter().zip(x).map(|(b, v)| b * v * v).sum()
    }
}

/// Builds the degree-`p` pencil. Negative `★1` weights are rejected unless
/// `allow_indefinite` is set; degree 1 never accepts them since its mass
/// matrix would be indefinite.
pub fn hodge_laplacian(ops: &DecOperators, p: usize, allow_indefinite: bool) -> Result<Pencil> {
    let classes = ops.weight_classes();
    let negative = classes.iter().filter(|c| **c == WeightClass::Negative).count();
    let mut warnings = Vec::new();
    if negative > 0 {
        if !allow_indefinite || p == 1 {
            return Err(Error::MeshQuality(format!(
                "{negative} of {} edges have negative cotan weight (quality {:.4}){}",
                ops.num_edges(),
                ops.quality,
                if p == 1 && allow_indefinite { "; the degree-1 mass matrix would be indefinite" } else { "" }
            )));
        }
        warnings.push(format!("{negative} negative cotan weights admitted; energy is indefinite"));
    }
    // zero-weight entries exactly zero
    let w: Vec<f64> = ops
        .star1
        .iter()
        .zip(&classes)
        .map(|(&w, c)| if *c == WeightClass::Zero { 0.0 } else { w })
        .collect();
    match p {
        0 => {
            let d0t = ops.d0.transpose();
            let a = &(&d0t * &sparse::diag(&w)) * &ops.d0;
            Ok(Pencil {
                p,
                a,
                b: ops.star0.clone(),
                dofs: (0..ops.num_vertices()).map(|v| vec![v]).collect(),
                warnings,
            })
        }
        1 => {
            let s0inv: Vec<f64> = ops.star0.iter().map(|x| 1.0 / x).collect();
            let wm = sparse::diag(&w);
            let g = &wm * &ops.d0;
            let exact = &(&g * &sparse::diag(&s0inv)) * &g.transpose();
            let d1t = ops.d1.transpose();
            let coexact = &(&d1t * &sparse::diag(&ops.star2)) * &ops.d1;
            Ok(Pencil {
                p,
                a: &exact + &coexact,
                b: w,
                dofs: (0..ops.num_edges()).map(|e| vec![e]).collect(),
                warnings,
            })
        }
        2 => {
            let clusters = ops.triangle_clusters();
            let agg = sparse::from_triplets(
                ops.num_triangles(),
                clusters.len(),
                clusters
                    .iter()
                    .enumerate()
                    .flat_map(|(c, ts)| ts.iter().map(move |&t| (t, c, 1.0))),
            );
            let winv: Vec<f64> = w.iter().map(|&x| if x == 0.0 { 0.0 } else { 1.0 / x }).collect();
            let m = &agg.transpose() * &ops.d1;
            let a = &(&m * &sparse::diag(&winv)) * &m.transpose();
            let b = clusters
                .iter()
                .map(|ts| ts.iter().map(|&t| 1.0 / ops.star2[t]).sum())
                .collect();
            Ok(Pencil { p, a, b, dofs: clusters, warnings })
        }
        _ => Err(Error::domain(format!("form degree must be 0, 1 or 2, got {p}"))),
    }
}

/// Mesh-level sanity numbers shared by the CLI and reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorSummary {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub quality: f64,
    pub zero_weight_edges: usize,
}

impl From<&DecOperators> for OperatorSummary {
    fn from(ops: &DecOperators) -> Self {
        Self {
            vertices: ops.num_vertices(),
            edges: ops.num_edges(),
            triangles: ops.num_triangles(),
            quality: ops.quality,
            zero_weight_edges: ops.zero_weight_edges,
        }
    }
}
