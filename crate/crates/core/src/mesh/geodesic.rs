use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::SurfaceMesh;
use crate::spaceform::ModelSpace;
use crate::{Error, Result};

/// Meshes up to this size get an exact all-pairs diameter.
pub const EXACT_DIAMETER_LIMIT: usize = 5000;

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    dist: f64,
    vertex: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_vertex(mesh: &SurfaceMesh, v: usize) -> Result<()> {
    if v >= mesh.num_vertices() {
        return Err(Error::domain(format!(
            "vertex index {v} out of range 0..{}",
            mesh.num_vertices()
        )));
    }
    Ok(())
}

/// Dijkstra from `source`, returning distances and the predecessor of every
/// reached vertex (`usize::MAX` for the source).
pub fn shortest_path_tree(mesh: &SurfaceMesh, source: usize) -> Result<(Vec<f64>, Vec<usize>)> {
    check_vertex(mesh, source)?;
    let n = mesh.num_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry { dist: 0.0, vertex: source });
    while let Some(Entry { dist: d, vertex: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &e in mesh.vertex_edges(v) {
            let w = mesh.other_end(e, v);
            let nd = d + mesh.edge_length(e);
            if nd < dist[w] {
                dist[w] = nd;
                pred[w] = v;
                heap.push(Entry { dist: nd, vertex: w });
            }
        }
    }
    Ok((dist, pred))
}

/// Single-source edge-graph distances.
pub fn graph_distances(mesh: &SurfaceMesh, source: usize) -> Result<Vec<f64>> {
    Ok(shortest_path_tree(mesh, source)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    pub value: f64,
    pub endpoints: (usize, usize),
    /// Set when the double-sweep heuristic was used; `value` is then only a
    /// lower bound for the graph diameter.
    pub lower_bound_only: bool,
}

/// Graph diameter. Graph distances overestimate geodesic ones, so on a
/// refined mesh this is biased upward relative to the smooth diameter.
pub fn estimate_diameter(mesh: &SurfaceMesh) -> DiameterEstimate {
    let n = mesh.num_vertices();
    let farthest = |dist: &[f64]| -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (v, &d) in dist.iter().enumerate() {
            if d > best.1 {
                best = (v, d);
            }
        }
        best
    };
    if n <= EXACT_DIAMETER_LIMIT {
        let per_source: Vec<(usize, usize, f64)> = (0..n)
            .into_par_iter()
            .map(|s| {
                let dist = graph_distances(mesh, s).expect("valid source");
                let (t, d) = farthest(&dist);
                (s, t, d)
            })
            .collect();
        let mut best = (0, 0, f64::NEG_INFINITY);
        for item in per_source {
            if item.2 > best.2 {
                best = item;
            }
        }
        DiameterEstimate { value: best.2, endpoints: (best.0, best.1), lower_bound_only: false }
    } else {
        let d0 = graph_distances(mesh, 0).expect("valid source");
        let (a, _) = farthest(&d0);
        let da = graph_distances(mesh, a).expect("valid source");
        let (b, d) = farthest(&da);
        DiameterEstimate { value: d, endpoints: (a, b), lower_bound_only: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsNet {
    pub centers: Vec<usize>,
    pub eps: f64,
    pub separation_ok: bool,
    pub covering_ok: bool,
}

/// Greedy farthest-point net: every new center is at distance `>= 2 eps`
/// from all earlier ones, and the loop stops only once every vertex is within
/// `2 eps` of the set.
pub fn build_eps_net(mesh: &SurfaceMesh, eps: f64) -> Result<EpsNet> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!("eps must be positive and finite, got {eps}")));
    }
    let mut centers = vec![0usize];
    let mut nearest = graph_distances(mesh, 0)?;
    loop {
        let mut best = (0usize, f64::NEG_INFINITY);
        for (v, &d) in nearest.iter().enumerate() {
            if d > best.1 {
                best = (v, d);
            }
        }
        if best.1 < 2.0 * eps {
            break;
        }
        centers.push(best.0);
        let dist = graph_distances(mesh, best.0)?;
        for (n, d) in nearest.iter_mut().zip(dist) {
            if d < *n {
                *n = d;
            }
        }
    }
    let (separation_ok, covering_ok) = verify_eps_net(mesh, &centers, eps)?;
    Ok(EpsNet { centers, eps, separation_ok, covering_ok })
}

/// Exhaustive check of both net clauses: pairwise separation `>= 2 eps` and
/// covering of every vertex within `2 eps`.
pub fn verify_eps_net(mesh: &SurfaceMesh, centers: &[usize], eps: f64) -> Result<(bool, bool)> {
    for &c in centers {
        check_vertex(mesh, c)?;
    }
    let rows: Vec<Vec<f64>> = centers
        .par_iter()
        .map(|&c| graph_distances(mesh, c).expect("checked source"))
        .collect();
    let mut separation = true;
    for (i, row) in rows.iter().enumerate() {
        for (j, &c) in centers.iter().enumerate() {
            if i != j && row[c] < 2.0 * eps {
                separation = false;
            }
        }
    }
    let covering = (0..mesh.num_vertices())
        .all(|v| rows.iter().any(|row| row[v] <= 2.0 * eps));
    Ok((separation, covering))
}

/// Counting figures that relate a net to model-space ball volumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BishopSanity {
    pub centers: usize,
    pub area: f64,
    /// `area / V_xi(eps / 2)`.
    pub packing_ratio: f64,
    /// `area / V_xi(2 eps)`; any covering by `2 eps` balls has at least this many.
    pub covering_lower_bound: f64,
}

pub fn bishop_sanity(mesh: &SurfaceMesh, net: &EpsNet, model: &ModelSpace) -> Result<BishopSanity> {
    let area = mesh.total_area();
    let cap = model.radius_cap();
    let vol = |r: f64| -> Result<f64> {
        if r >= cap {
            model.model_ball_volume(cap * (1.0 - 1e-12))
        } else {
            model.model_ball_volume(r)
        }
    };
    Ok(BishopSanity {
        centers: net.centers.len(),
        area,
        packing_ratio: area / vol(net.eps / 2.0)?,
        covering_lower_bound: area / vol(2.0 * net.eps)?,
    })
}

/// Vertices within graph distance `r` of `center` and the closed subcomplex
/// they induce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshBall {
    pub center: usize,
    pub radius: f64,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub triangles: Vec<usize>,
}

impl MeshBall {
    pub fn from_vertex_mask(mesh: &SurfaceMesh, center: usize, radius: f64, mask: &[bool]) -> Self {
        let vertices = (0..mesh.num_vertices()).filter(|&v| mask[v]).collect();
        let edges = (0..mesh.num_edges())
            .filter(|&e| mesh.edges()[e].iter().all(|&v| mask[v]))
            .collect();
        let triangles = (0..mesh.num_triangles())
            .filter(|&t| mesh.triangles()[t].iter().all(|&v| mask[v]))
            .collect();
        Self { center, radius, vertices, edges, triangles }
    }

    pub fn vertex_mask(&self, mesh: &SurfaceMesh) -> Vec<bool> {
        let mut mask = vec![false; mesh.num_vertices()];
        for &v in &self.vertices {
            mask[v] = true;
        }
        mask
    }

    pub fn is_disjoint(&self, other: &MeshBall) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.vertices.len() && j < other.vertices.len() {
            match self.vertices[i].cmp(&other.vertices[j]) {
                Ordering::Equal => return false,
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
            }
        }
        true
    }
}

/// Closed graph ball `d(center, v) <= r`.
pub fn geodesic_ball(mesh: &SurfaceMesh, center: usize, r: f64) -> Result<MeshBall> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("ball radius must be positive, got {r}")));
    }
    let dist = graph_distances(mesh, center)?;
    let mask: Vec<bool> = dist.iter().map(|&d| d <= r).collect();
    Ok(MeshBall::from_vertex_mask(mesh, center, r, &mask))
}

/// Traces the shortest path from `a` to `b` and returns `k + 1` vertices on
/// it, the `i`-th being the first path vertex whose arclength from `a`
/// reaches `i L / k`.
pub fn partition_shortest_path(
    mesh: &SurfaceMesh,
    a: usize,
    b: usize,
    k: usize,
) -> Result<(Vec<usize>, Vec<f64>)> {
    if k == 0 {
        return Err(Error::domain("partition count must be >= 1"));
    }
    check_vertex(mesh, b)?;
    let (dist, pred) = shortest_path_tree(mesh, a)?;
    let mut path = vec![b];
    let mut v = b;
    while v != a {
        v = pred[v];
        path.push(v);
    }
    path.reverse();
    let total = dist[b];
    let mut points = Vec::with_capacity(k + 1);
    let mut arc = Vec::with_capacity(k + 1);
    let mut cursor = 0;
    for i in 0..=k {
        let target = total * i as f64 / k as f64;
        while cursor + 1 < path.len() && dist[path[cursor]] < target - 1e-12 * total {
            cursor += 1;
        }
        points.push(path[cursor]);
        arc.push(dist[path[cursor]]);
    }
    Ok((points, arc))
}
