use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use super::{MeshKind, SurfaceMesh};
use crate::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn load_off(path: impl AsRef<Path>) -> Result<SurfaceMesh> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_off(&text, &path.display().to_string())
}

/// Parses ASCII OFF text. Blank lines and `#` comments are skipped.
pub fn parse_off(text: &str, name: &str) -> Result<SurfaceMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if header != "OFF" {
        return Err(parse_err(hline, format!("expected header \"OFF\", found {header:?}")));
    }
    let (cline, counts) = lines.next().ok_or_else(|| parse_err(hline + 1, "missing counts line"))?;
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(cline, format!("bad counts line: {e}")))?;
    if counts.len() < 2 {
        return Err(parse_err(cline, "counts line needs V and F"));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of file in vertex list"))?;
        let vals: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad vertex coordinate: {e}")))?;
        if vals.len() != 3 {
            return Err(parse_err(ln, "vertex line needs 3 coordinates"));
        }
        vertices.push([vals[0], vals[1], vals[2]]);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(0, "unexpected end of file in face list"))?;
        let vals: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad face index: {e}")))?;
        if vals.first() != Some(&3) {
            return Err(parse_err(ln, "non-triangular face"));
        }
        if vals.len() < 4 {
            return Err(parse_err(ln, "face line needs 3 vertex indices"));
        }
        if vals[1..4].iter().any(|&v| v >= nv) {
            return Err(parse_err(ln, format!("face index out of range 0..{nv}")));
        }
        triangles.push([vals[1], vals[2], vals[3]]);
    }
    repair_orientation(&mut triangles)?;
    SurfaceMesh::from_triangles(MeshKind::Loaded { path: name.to_string() }, vertices, triangles, None)
}

/// Flips triangles so neighbours traverse shared edges in opposite
/// directions, propagating from triangle 0 of every component.
fn repair_orientation(triangles: &mut [[usize; 3]]) -> Result<()> {
    let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for s in 0..3 {
            let (a, b) = (tri[s], tri[(s + 1) % 3]);
            map.entry((a.min(b), a.max(b))).or_default().push(t);
        }
    }
    let bad: Vec<(usize, usize)> =
        map.iter().filter(|(_, v)| v.len() != 2).map(|(k, _)| *k).collect();
    if !bad.is_empty() {
        return Err(Error::MeshValidation {
            message: "non-manifold or boundary edges".to_string(),
            edges: bad,
        });
    }
    let forward = |tri: &[usize; 3], a: usize, b: usize| -> bool {
        (0..3).any(|s| tri[s] == a && tri[(s + 1) % 3] == b)
    };
    let mut visited = vec![false; triangles.len()];
    for root in 0..triangles.len() {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            let tri = triangles[t];
            for s in 0..3 {
                let (a, b) = (tri[s], tri[(s + 1) % 3]);
                let uses = &map[&(a.min(b), a.max(b))];
                let u = if uses[0] == t { uses[1] } else { uses[0] };
                if !visited[u] {
                    if forward(&triangles[u], a, b) {
                        triangles[u].swap(1, 2);
                    }
                    visited[u] = true;
                    queue.push_back(u);
                } else if forward(&triangles[u], a, b) {
                    return Err(Error::MeshValidation {
                        message: "surface is not orientable".to_string(),
                        edges: vec![(a.min(b), a.max(b))],
                    });
                }
            }
        }
    }
    Ok(())
}

/// Serializes with shortest round-trip float formatting.
pub fn write_off(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, off_string(mesh))?;
    Ok(())
}

pub(crate) fn off_string(mesh: &SurfaceMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF");
    let _ = writeln!(s, "{} {} {}", mesh.num_vertices(), mesh.num_triangles(), mesh.num_edges());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    s
}
