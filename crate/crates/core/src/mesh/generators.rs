use std::collections::HashMap;
use std::f64::consts::PI;

use super::{MeshKind, SurfaceMesh};
use crate::{Error, Result};

/// The flat torus `ℝ² / (2πℤ)²` on an `m × m` grid of squares, each split
/// along its `(+1, +1)` diagonal.
pub fn build_flat_torus(m: usize) -> Result<SurfaceMesh> {
    if m < 3 {
        return Err(Error::domain(format!("torus grid size must be >= 3, got {m}")));
    }
    let h = 2.0 * PI / m as f64;
    let idx = |i: usize, j: usize| (j % m) * m + (i % m);
    let mut vertices = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            vertices.push([i as f64 * h, j as f64 * h, 0.0]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * m * m);
    for j in 0..m {
        for i in 0..m {
            let a = idx(i, j);
            let b = idx(i + 1, j);
            let c = idx(i + 1, j + 1);
            let d = idx(i, j + 1);
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    SurfaceMesh::from_triangles(MeshKind::FlatTorus { m }, vertices, triangles, Some(2.0 * PI))
}

/// Icosahedron refined `s` times by 1-to-4 midpoint subdivision, with every
/// vertex projected onto the unit sphere.
pub fn build_icosphere(s: usize) -> Result<SurfaceMesh> {
    if s > 7 {
        return Err(Error::domain(format!("icosphere subdivision level must be in 0..=7, got {s}")));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|&p| project(p))
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..s {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (pa, pb) = (vertices[a], vertices[b]);
                vertices.push(project([pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2]]));
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(4 * triangles.len());
        for &[a, b, c] in &triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    SurfaceMesh::from_triangles(MeshKind::Icosphere { s }, vertices, triangles, None)
}

fn project(p: [f64; 3]) -> [f64; 3] {
    let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / r, p[1] / r, p[2] / r]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{cross, dot};

    #[test]
    fn torus_counts() {
        let mesh = build_flat_torus(4).unwrap();
        assert_eq!(mesh.num_vertices(), 16);
        assert_eq!(mesh.num_edges(), 48);
        assert_eq!(mesh.num_triangles(), 32);
        assert_eq!(mesh.euler_characteristic(), 0);
        assert!(build_flat_torus(2).is_err());
    }

    #[test]
    fn torus_edge_lengths() {
        let mesh = build_flat_torus(3).unwrap();
        let h = 2.0 * PI / 3.0;
        for &l in mesh.edge_lengths() {
            assert!((l - h).abs() < 1e-14 || (l - 2f64.sqrt() * h).abs() < 1e-14, "{l}");
        }
    }

    #[test]
    fn torus_area_is_exact() {
        for m in [3, 5, 16] {
            let a = build_flat_torus(m).unwrap().total_area();
            assert!((a - 4.0 * PI * PI).abs() < 1e-11, "m={m}: {a}");
        }
    }

    #[test]
    fn every_edge_has_two_triangles() {
        for mesh in [build_flat_torus(5).unwrap(), build_icosphere(2).unwrap()] {
            for e in 0..mesh.num_edges() {
                let [t0, t1] = mesh.edge_triangles(e);
                assert_ne!(t0, t1);
                assert!(mesh.triangle_edges(t0).contains(&e));
                assert!(mesh.triangle_edges(t1).contains(&e));
            }
        }
    }

    #[test]
    fn icosphere_counts() {
        let m0 = build_icosphere(0).unwrap();
        assert_eq!((m0.num_vertices(), m0.num_triangles()), (12, 20));
        let m2 = build_icosphere(2).unwrap();
        assert_eq!((m2.num_vertices(), m2.num_triangles()), (162, 320));
        assert_eq!(m2.euler_characteristic(), 2);
        for s in 0..=4 {
            let m = build_icosphere(s).unwrap();
            assert_eq!(m.num_vertices(), 10 * 4usize.pow(s as u32) + 2);
            for p in m.vertices() {
                assert!((dot(*p, *p).sqrt() - 1.0).abs() < 1e-12);
            }
        }
        assert!(build_icosphere(8).is_err());
    }

    #[test]
    fn icosphere_is_outward_oriented() {
        let m = build_icosphere(1).unwrap();
        for tri in m.triangles() {
            let [a, b, c] = tri.map(|v| m.vertices()[v]);
            let n = cross(
                [b[0] - a[0], b[1] - a[1], b[2] - a[2]],
                [c[0] - a[0], c[1] - a[1], c[2] - a[2]],
            );
            assert!(dot(n, a) > 0.0);
        }
    }

    #[test]
    fn icosphere_area_converges() {
        let a = build_icosphere(4).unwrap().total_area();
        assert!((a - 4.0 * PI).abs() < 0.01 * 4.0 * PI, "{a}");
    }
}
