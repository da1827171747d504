use serde::{Deserialize, Serialize};

use super::{hodge_laplacian, solve_spectrum, DecOperators, Pencil, SolverConfig, SpectrumResult};
use crate::mesh::{MeshBall, SurfaceMesh};
use crate::{Error, Result};

/// Forms on a ball that vanish on every simplex whose star leaves the ball.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirichletSubproblem {
    /// Kept vertices, edges and triangles of the parent mesh.
    pub kept_simplices: [Vec<usize>; 3],
    /// Indices of kept degrees of freedom in the parent pencils.
    pub kept_dofs: [Vec<usize>; 3],
    #[serde(skip)]
    pencils: [Option<Pencil>; 3],
}

impl DirichletSubproblem {
    pub fn pencil(&self, p: usize) -> Option<&Pencil> {
        self.pencils.get(p).and_then(Option::as_ref)
    }

    pub fn dof_count(&self, p: usize) -> usize {
        self.kept_dofs.get(p).map_or(0, Vec::len)
    }

    /// Zero-extends a kept-DOF vector to the parent pencil of degree `p`.
    pub fn extend_by_zero(&self, p: usize, x: &[f64], parent_dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; parent_dim];
        for (&i, &v) in self.kept_dofs[p].iter().zip(x) {
            out[i] = v;
        }
        out
    }
}

/// Kept sets for the closed subcomplex induced by `ball`, restricted from
/// `parents` (the closed-mesh pencils in degrees 0, 1, 2).
pub fn dirichlet_subproblem(
    mesh: &SurfaceMesh,
    parents: &[Pencil; 3],
    ball: &MeshBall,
) -> Result<DirichletSubproblem> {
    let in_ball = ball.vertex_mask(mesh);
    let tri_in: Vec<bool> = mesh.triangles().iter().map(|t| t.iter().all(|&v| in_ball[v])).collect();
    let edge_in: Vec<bool> = mesh.edges().iter().map(|e| e.iter().all(|&v| in_ball[v])).collect();

    let vertices: Vec<usize> = (0..mesh.num_vertices())
        .filter(|&v| in_ball[v] && mesh.vertex_edges(v).iter().all(|&e| edge_in[e]))
        .collect();
    let edges: Vec<usize> = (0..mesh.num_edges())
        .filter(|&e| edge_in[e] && mesh.edge_triangles(e).iter().all(|&t| tri_in[t]))
        .collect();
    let triangles: Vec<usize> = (0..mesh.num_triangles()).filter(|&t| tri_in[t]).collect();

    let mut masks = [vec![false; mesh.num_vertices()], vec![false; mesh.num_edges()], tri_in];
    for &v in &vertices {
        masks[0][v] = true;
    }
    for &e in &edges {
        masks[1][e] = true;
    }
    let mut kept_dofs: [Vec<usize>; 3] = Default::default();
    let mut pencils: [Option<Pencil>; 3] = Default::default();
    for p in 0..3 {
        let parent = &parents[p];
        if parent.p != p {
            return Err(Error::domain("parent pencils must be ordered by degree"));
        }
        kept_dofs[p] = (0..parent.dim())
            .filter(|&i| parent.dofs[i].iter().all(|&s| masks[p][s]))
            .collect();
        if kept_dofs[p].iter().any(|&i| parent.b[i] > 0.0) {
            pencils[p] = Some(parent.restrict(&kept_dofs[p]));
        }
    }
    if pencils.iter().all(Option::is_none) {
        return Err(Error::DegenerateDomain(format!(
            "ball around vertex {} of radius {} has no interior degrees of freedom",
            ball.center, ball.radius
        )));
    }
    Ok(DirichletSubproblem { kept_simplices: [vertices, edges, triangles], kept_dofs, pencils })
}

/// Smallest `num` Dirichlet eigenvalues in degree `p`.
pub fn dirichlet_spectrum(
    sub: &DirichletSubproblem,
    p: usize,
    num: usize,
    cfg: &SolverConfig,
) -> Result<SpectrumResult> {
    let pencil = sub.pencil(p).ok_or_else(|| {
        Error::DegenerateDomain(format!("no interior degrees of freedom in degree {p}"))
    })?;
    solve_spectrum(pencil, num, cfg)
}

/// The three closed-mesh pencils.
pub fn closed_pencils(ops: &DecOperators, allow_indefinite: bool) -> Result<[Pencil; 3]> {
    Ok([
        hodge_laplacian(ops, 0, allow_indefinite)?,
        hodge_laplacian(ops, 1, allow_indefinite)?,
        hodge_laplacian(ops, 2, allow_indefinite)?,
    ])
}
