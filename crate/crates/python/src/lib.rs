use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hodgebound_core::bounds::{self, ManifoldClass, RicciConvention};
use hodgebound_core::dec::{self, DecOperators, SolverConfig};
use hodgebound_core::mesh::{self, SurfaceMesh};
use hodgebound_core::spaceform::{self, ModelSpace};
use hodgebound_core::verify::{self, ReportFormat};
use hodgebound_core::Error;

create_exception!(hodgebound, HypothesisError, PyValueError, "A theorem hypothesis is not met by the inputs.");
create_exception!(hodgebound, MeshError, PyValueError, "The mesh failed validation or quality checks.");

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Hypothesis(_) => HypothesisError::new_err(msg),
        Error::MeshValidation { .. } | Error::MeshQuality(_) => MeshError::new_err(msg),
        Error::Io(_) => PyOSError::new_err(msg),
        Error::Solver { .. } | Error::Json(_) => PyRuntimeError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn convention(name: &str) -> PyResult<RicciConvention> {
    match name {
        "lower" => Ok(RicciConvention::LowerBound),
        "neg-lower" | "neg_lower" => Ok(RicciConvention::NegativeLowerBound),
        other => Err(PyValueError::new_err(format!("unknown convention {other:?} (lower|neg-lower)"))),
    }
}

/// First Dirichlet eigenvalue of the geodesic ball of radius `r` in the
/// simply connected `n`-dimensional space of constant curvature `xi`.
#[pyfunction]
fn ball_dirichlet_eigenvalue(n: usize, xi: f64, r: f64) -> PyResult<f64> {
    let ms = ModelSpace::new(n, xi).map_err(to_py)?;
    Ok(spaceform::ball_dirichlet_eigenvalue(&ms, r).map_err(to_py)?.lambda)
}

#[pyfunction]
fn model_ball_volume(n: usize, xi: f64, r: f64) -> PyResult<f64> {
    let ms = ModelSpace::new(n, xi).map_err(to_py)?;
    spaceform::model_ball_volume(&ms, r).map_err(to_py)
}

#[pyfunction]
fn savo_hyperbolic_sigma(n: usize, p: usize) -> PyResult<f64> {
    bounds::savo_hyperbolic_sigma(n, p).map_err(to_py)
}

#[pyclass(name = "BoundResult", frozen)]
struct PyBoundResult {
    inner: bounds::BoundResult,
}

#[pymethods]
impl PyBoundResult {
    /// `None` when the bound does not apply.
    #[getter]
    fn value(&self) -> Option<f64> {
        self.inner.value
    }

    #[getter]
    fn regime(&self) -> String {
        format!("{:?}", self.inner.regime)
    }

    #[getter]
    fn source(&self) -> &str {
        &self.inner.source
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    fn __repr__(&self) -> String {
        format!("BoundResult(source={:?}, k={}, p={}, value={:?}, regime={})", self.inner.source, self.inner.k, self.inner.p, self.inner.value, self.regime())
    }
}

fn wrap(r: hodgebound_core::Result<bounds::BoundResult>) -> PyResult<PyBoundResult> {
    r.map(|inner| PyBoundResult { inner }).map_err(to_py)
}

#[pyclass(name = "ManifoldClass", frozen, from_py_object)]
#[derive(Clone)]
struct PyManifoldClass {
    inner: ManifoldClass,
}

#[pymethods]
impl PyManifoldClass {
    #[new]
    #[pyo3(signature = (n, xi, convention="lower", D=None, rH=None, V=None, r0=None))]
    #[allow(non_snake_case)]
    fn new(n: usize, xi: f64, convention: &str, D: Option<f64>, rH: Option<f64>, V: Option<f64>, r0: Option<f64>) -> PyResult<Self> {
        let mut inner = ManifoldClass::new(n, xi, self::convention(convention)?).map_err(to_py)?;
        inner.diameter = D;
        inner.rh = rH;
        inner.volume = V;
        inner.r0 = r0;
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn xi(&self) -> f64 {
        self.inner.xi
    }

    #[getter(D)]
    fn diameter(&self) -> Option<f64> {
        self.inner.diameter
    }

    #[getter(rH)]
    fn rh(&self) -> Option<f64> {
        self.inner.rh
    }

    fn hodge_bound(&self, k: usize, p: usize) -> PyResult<PyBoundResult> {
        wrap(bounds::hodge_bound(&self.inner, k, p))
    }

    fn cheng_function_bound(&self, k: usize) -> PyResult<PyBoundResult> {
        wrap(bounds::cheng_function_bound(&self.inner, k))
    }

    fn nonneg_ricci_bound(&self, k: usize, p: usize) -> PyResult<PyBoundResult> {
        wrap(bounds::nonneg_ricci_bound(&self.inner, k, p))
    }

    fn neg_ricci_bound(&self, k: usize, p: usize) -> PyResult<PyBoundResult> {
        wrap(bounds::neg_ricci_bound(&self.inner, k, p))
    }

    fn volume_bound(&self, k: usize, p: usize) -> PyResult<PyBoundResult> {
        wrap(bounds::volume_bound(&self.inner, k, p))
    }

    #[pyo3(signature = (p=1))]
    fn connection_laplacian_bound(&self, p: usize) -> PyResult<PyBoundResult> {
        wrap(bounds::connection_laplacian_bound(&self.inner, p))
    }

    fn sigma_p_bounds(&self, p: usize) -> PyResult<Vec<PyBoundResult>> {
        let rows = bounds::sigma_p_bounds(&self.inner, p).map_err(to_py)?;
        Ok(rows.into_iter().map(|inner| PyBoundResult { inner }).collect())
    }

    fn __repr__(&self) -> String {
        serde_json::to_string(&self.inner).unwrap_or_default()
    }
}

#[pyclass(name = "Spectrum", frozen)]
struct PySpectrum {
    inner: dec::SpectrumResult,
}

#[pymethods]
impl PySpectrum {
    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues.clone()
    }

    /// Eigenvalues above the kernel, with multiplicity.
    #[getter]
    fn positive(&self) -> Vec<f64> {
        self.inner.positive().to_vec()
    }

    #[getter]
    fn kernel_dim(&self) -> usize {
        self.inner.kernel_dim
    }

    #[getter]
    fn residual_norms(&self) -> Vec<f64> {
        self.inner.residual_norms.clone()
    }

    #[getter]
    fn method(&self) -> String {
        format!("{:?}", self.inner.method)
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }
}

#[pyclass(name = "Mesh", frozen)]
struct PyMesh {
    inner: SurfaceMesh,
}

#[pymethods]
impl PyMesh {
    /// `torus:M`, `icosphere:S` or `off:PATH`.
    #[new]
    fn new(descriptor: &str) -> PyResult<Self> {
        hodgebound_core::cli::parse_mesh(descriptor).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn torus(m: usize) -> PyResult<Self> {
        mesh::build_flat_torus(m).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn icosphere(s: usize) -> PyResult<Self> {
        mesh::build_icosphere(s).map(|inner| Self { inner }).map_err(to_py)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        mesh::load_off(path).map(|inner| Self { inner }).map_err(to_py)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        mesh::write_off(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn descriptor(&self) -> String {
        self.inner.descriptor()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    #[getter]
    fn num_triangles(&self) -> usize {
        self.inner.num_triangles()
    }

    #[getter]
    fn betti_numbers(&self) -> [usize; 3] {
        self.inner.betti_numbers()
    }

    #[getter]
    fn total_area(&self) -> f64 {
        self.inner.total_area()
    }

    fn vertices(&self) -> Vec<[f64; 3]> {
        self.inner.vertices().to_vec()
    }

    fn triangles(&self) -> Vec<[usize; 3]> {
        self.inner.triangles().to_vec()
    }

    /// Graph diameter and whether it is only a lower bound.
    fn diameter(&self) -> (f64, bool) {
        let d = mesh::estimate_diameter(&self.inner);
        (d.value, d.lower_bound_only)
    }

    fn distances(&self, source: usize) -> PyResult<Vec<f64>> {
        mesh::graph_distances(&self.inner, source).map_err(to_py)
    }

    /// Greedy eps-net: `(centers, separation_ok, covering_ok)`.
    fn eps_net(&self, eps: f64) -> PyResult<(Vec<usize>, bool, bool)> {
        let net = mesh::build_eps_net(&self.inner, eps).map_err(to_py)?;
        Ok((net.centers, net.separation_ok, net.covering_ok))
    }

    #[pyo3(signature = (p, num, tol=1e-8, seed=0, allow_indefinite=false))]
    fn spectrum(&self, py: Python<'_>, p: usize, num: usize, tol: f64, seed: u64, allow_indefinite: bool) -> PyResult<PySpectrum> {
        let cfg = SolverConfig { tol, seed, ..SolverConfig::default() };
        py.detach(|| {
            let ops = DecOperators::assemble(&self.inner)?;
            let pencil = dec::hodge_laplacian(&ops, p, allow_indefinite)?;
            dec::solve_spectrum(&pencil, num, &cfg)
        })
        .map(|inner| PySpectrum { inner })
        .map_err(to_py)
    }

    /// Runs the main-theorem suite against `class_` (default: the mesh's
    /// reference class) and returns the report as JSON.
    #[pyo3(signature = (class_=None, k_max=20, p_list=vec![0, 1, 2], seed=0))]
    fn verify_main(&self, py: Python<'_>, class_: Option<PyManifoldClass>, k_max: usize, p_list: Vec<usize>, seed: u64) -> PyResult<String> {
        py.detach(|| {
            let mc = match class_ {
                Some(c) => c.inner,
                None => verify::default_class(&self.inner)?,
            };
            let opts = verify::MainSuiteOptions {
                k_max,
                p_list,
                solver: SolverConfig { seed, ..SolverConfig::default() },
                ..verify::MainSuiteOptions::default()
            };
            let report = verify::check_main_theorem(&self.inner, &mc, &opts)?;
            verify::emit_report(&report, ReportFormat::Json)
        })
        .map_err(to_py)
    }

    /// Domain-decomposition suite over eps-nets; returns the report as JSON.
    #[pyo3(signature = (eps_list, p_list=vec![0, 1], l_max=3))]
    fn verify_decomposition(&self, py: Python<'_>, eps_list: Vec<f64>, p_list: Vec<usize>, l_max: usize) -> PyResult<String> {
        py.detach(|| {
            let opts = verify::DecompositionOptions { l_max, ..verify::DecompositionOptions::default() };
            let report = verify::check_net_decomposition(&self.inner, &eps_list, &p_list, &opts)?;
            verify::emit_report(&report, ReportFormat::Json)
        })
        .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Mesh({:?}, V={}, E={}, F={})", self.inner.descriptor(), self.num_vertices(), self.num_edges(), self.num_triangles())
    }
}

#[pymodule]
fn hodgebound(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("HypothesisError", m.py().get_type::<HypothesisError>())?;
    m.add("MeshError", m.py().get_type::<MeshError>())?;
    m.add_function(wrap_pyfunction!(ball_dirichlet_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(model_ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(savo_hyperbolic_sigma, m)?)?;
    m.add_class::<PyManifoldClass>()?;
    m.add_class::<PyBoundResult>()?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PySpectrum>()?;
    Ok(())
}
