use serde::{Deserialize, Serialize};

use crate::mesh::{MeshKind, SurfaceMesh};
use crate::{Error, Result};

/// Smooth surfaces with closed-form Hodge spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnalyticManifold {
    /// `ℝ² / (2πℤ)²`.
    FlatTorus2D,
    /// Unit sphere.
    RoundSphere2D,
}

impl AnalyticManifold {
    pub fn for_mesh(mesh: &SurfaceMesh) -> Result<Self> {
        match mesh.kind() {
            MeshKind::FlatTorus { .. } => Ok(Self::FlatTorus2D),
            MeshKind::Icosphere { .. } => Ok(Self::RoundSphere2D),
            MeshKind::Loaded { path } => Err(Error::domain(format!(
                "no analytic spectrum is known for loaded mesh {path}"
            ))),
        }
    }
}

/// Generator of the spectrum with multiplicity: `(value, multiplicity)` in
/// ascending order of value, complete up to `cutoff`.
pub struct AnalyticSpectrum {
    pub manifold: AnalyticManifold,
    pub p: usize,
}

impl AnalyticSpectrum {
    pub fn levels(&self, cutoff: f64) -> Result<Vec<(f64, usize)>> {
        if self.p > 2 {
            return Err(Error::domain(format!("form degree must be 0, 1 or 2, got {}", self.p)));
        }
        let mut out = Vec::new();
        match self.manifold {
            AnalyticManifold::FlatTorus2D => {
                let r = cutoff.max(0.0).sqrt().floor() as i64;
                let mut counts = std::collections::BTreeMap::new();
                for a in -r..=r {
                    for b in -r..=r {
                        let v = a * a + b * b;
                        if v as f64 <= cutoff {
                            *counts.entry(v).or_insert(0usize) += 1;
                        }
                    }
                }
                for (v, c) in counts {
                    let c = if self.p == 1 { 2 * c } else { c };
                    out.push((v as f64, c));
                }
            }
            AnalyticManifold::RoundSphere2D => {
                let start = if self.p == 1 { 1 } else { 0 };
                let mut l = start;
                while ((l * (l + 1)) as f64) <= cutoff {
                    let m = 2 * l + 1;
                    out.push(((l * (l + 1)) as f64, if self.p == 1 { 2 * m } else { m }));
                    l += 1;
                }
            }
        }
        Ok(out)
    }
}

/// First `count` eigenvalues with multiplicity, ascending.
pub fn reference_spectrum(manifold: AnalyticManifold, p: usize, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::domain("count must be >= 1"));
    }
    let gen = AnalyticSpectrum { manifold, p };
    let mut cutoff = 4.0;
    loop {
        let levels = gen.levels(cutoff)?;
        let total: usize = levels.iter().map(|l| l.1).sum();
        if total >= count {
            let mut out = Vec::with_capacity(count);
            for (v, m) in levels {
                out.extend(std::iter::repeat(v).take(m));
            }
            out.truncate(count);
            return Ok(out);
        }
        cutoff *= 2.0;
    }
}
