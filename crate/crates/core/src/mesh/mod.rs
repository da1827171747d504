//! Closed oriented triangulated surfaces.
//!
//! A [`SurfaceMesh`] is immutable after construction. Edge lengths and
//! triangle geometry are measured with the mesh's own metric: Euclidean for
//! embedded meshes, periodic for the flat torus whose vertices are stored as
//! fundamental-domain coordinates.

mod generators;
mod geodesic;
mod off;

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::{Error, Result};

pub use generators::{build_flat_torus, build_icosphere};
pub use geodesic::{
    bishop_sanity, build_eps_net, estimate_diameter, geodesic_ball, graph_distances,
    partition_shortest_path, shortest_path_tree, verify_eps_net, BishopSanity, DiameterEstimate,
    EpsNet, MeshBall,
};
pub use off::{load_off, parse_off, write_off};

/// Where a mesh came from; drives default metric hypotheses downstream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MeshKind {
    FlatTorus { m: usize },
    Icosphere { s: usize },
    Loaded { path: String },
}

#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    kind: MeshKind,
    vertices: Vec<[f64; 3]>,
    /// Canonically ordered `a < b`; oriented from `a` to `b`.
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    /// Side length of the periodic square for the flat torus.
    period: Option<f64>,
    edge_lengths: Vec<f64>,
    /// Edges `(v0 v1, v1 v2, v2 v0)` of each triangle.
    triangle_edges: Vec<[usize; 3]>,
    /// `+1` if the triangle traverses the edge from its smaller to its larger vertex.
    triangle_edge_signs: Vec<[i8; 3]>,
    edge_triangles: Vec<[usize; 2]>,
    vertex_edges: Vec<Vec<usize>>,
    vertex_triangles: Vec<Vec<usize>>,
}

impl SurfaceMesh {
    /// Builds and validates a closed, consistently oriented mesh.
    pub fn from_triangles(
        kind: MeshKind,
        vertices: Vec<[f64; 3]>,
        triangles: Vec<[usize; 3]>,
        period: Option<f64>,
    ) -> Result<Self> {
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::MeshValidation {
                    message: format!("triangle {t} references a vertex outside 0..{nv}"),
                    edges: vec![],
                });
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::MeshValidation {
                    message: format!("triangle {t} repeats a vertex"),
                    edges: vec![],
                });
            }
        }

        // (a, b) with a < b -> list of (triangle, local slot, sign)
        let mut map: BTreeMap<(usize, usize), Vec<(usize, usize, i8)>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for slot in 0..3 {
                let a = tri[slot];
                let b = tri[(slot + 1) % 3];
                let (key, sign) = if a < b { ((a, b), 1) } else { ((b, a), -1) };
                map.entry(key).or_default().push((t, slot, sign));
            }
        }
        let bad: Vec<(usize, usize)> = map
            .iter()
            .filter(|(_, v)| v.len() != 2)
            .map(|(k, _)| *k)
            .collect();
        if !bad.is_empty() {
            return Err(Error::MeshValidation {
                message: "every edge must belong to exactly two triangles (closed manifold surface)"
                    .to_string(),
                edges: bad,
            });
        }
        let misoriented: Vec<(usize, usize)> = map
            .iter()
            .filter(|(_, v)| v[0].2 == v[1].2)
            .map(|(k, _)| *k)
            .collect();
        if !misoriented.is_empty() {
            return Err(Error::MeshValidation {
                message: "triangle orientations are inconsistent".to_string(),
                edges: misoriented,
            });
        }

        let mut edges = Vec::with_capacity(map.len());
        let mut edge_triangles = Vec::with_capacity(map.len());
        let mut triangle_edges = vec![[0usize; 3]; triangles.len()];
        let mut triangle_edge_signs = vec![[0i8; 3]; triangles.len()];
        let mut vertex_edges = vec![Vec::new(); nv];
        for (e, ((a, b), uses)) in map.into_iter().enumerate() {
            edges.push([a, b]);
            edge_triangles.push([uses[0].0, uses[1].0]);
            vertex_edges[a].push(e);
            vertex_edges[b].push(e);
            for (t, slot, sign) in uses {
                triangle_edges[t][slot] = e;
                triangle_edge_signs[t][slot] = sign;
            }
        }
        let mut vertex_triangles = vec![Vec::new(); nv];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_triangles[v].push(t);
            }
        }
        let isolated: Vec<usize> = (0..nv).filter(|&v| vertex_edges[v].is_empty()).collect();
        if !isolated.is_empty() {
            return Err(Error::MeshValidation {
                message: format!("vertices not referenced by any triangle: {isolated:?}"),
                edges: vec![],
            });
        }

        let mut mesh = Self {
            kind,
            vertices,
            edges,
            triangles,
            period,
            edge_lengths: Vec::new(),
            triangle_edges,
            triangle_edge_signs,
            edge_triangles,
            vertex_edges,
            vertex_triangles,
        };
        mesh.edge_lengths = (0..mesh.edges.len())
            .map(|e| {
                let [a, b] = mesh.edges[e];
                norm(mesh.displacement(a, b))
            })
            .collect();
        Ok(mesh)
    }

    pub fn kind(&self) -> &MeshKind {
        &self.kind
    }

    /// Short textual descriptor such as `torus:32`.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            MeshKind::FlatTorus { m } => format!("torus:{m}"),
            MeshKind::Icosphere { s } => format!("icosphere:{s}"),
            MeshKind::Loaded { path } => format!("off:{path}"),
        }
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    /// Betti numbers `(b0, b1, b2)` of a connected closed orientable surface.
    pub fn betti_numbers(&self) -> [usize; 3] {
        let b1 = (2 - self.euler_characteristic()).max(0) as usize;
        [1, b1, 1]
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_lengths[e]
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn triangle_edge_signs(&self, t: usize) -> [i8; 3] {
        self.triangle_edge_signs[t]
    }

    pub fn edge_triangles(&self, e: usize) -> [usize; 2] {
        self.edge_triangles[e]
    }

    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }

    /// The endpoint of edge `e` other than `v`.
    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let [a, b] = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Vector from vertex `a` to vertex `b`, wrapped into the fundamental
    /// domain on periodic meshes.
    pub fn displacement(&self, a: usize, b: usize) -> [f64; 3] {
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let mut d = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
        if let Some(period) = self.period {
            for c in d.iter_mut().take(2) {
                *c -= period * (*c / period).round();
            }
        }
        d
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * norm(cross(self.displacement(a, b), self.displacement(a, c)))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    /// Cotangent of the interior angle of triangle `t` at its local corner `corner`.
    pub fn corner_cotangent(&self, t: usize, corner: usize) -> f64 {
        let tri = self.triangles[t];
        let o = tri[corner];
        let u = self.displacement(o, tri[(corner + 1) % 3]);
        let v = self.displacement(o, tri[(corner + 2) % 3]);
        dot(u, v) / norm(cross(u, v))
    }
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}
