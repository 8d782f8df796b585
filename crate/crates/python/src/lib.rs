//! Python bindings for `chaincongruence_core`.
//!
//! Indices are 0-based on the Python side, like the Rust API; only the JSON
//! files use 1-based indices.

use chaincongruence_core as core;
use chaincongruence_core::generate::{exploded_grid as core_exploded_grid, GridOptions};
use chaincongruence_core::{io, Engine, MergeOptions, Tolerance};
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

create_exception!(chaincongruence, ChainCongruenceError, PyValueError);

fn to_py(err: core::Error) -> PyErr {
    let msg = format!("{}: {err}", err.code());
    match err {
        core::Error::Io { .. } => PyOSError::new_err(msg),
        _ => ChainCongruenceError::new_err(msg),
    }
}

fn cloud(points: Vec<[f64; 3]>) -> PyResult<core::PointCloud> {
    core::PointCloud::from_points3(&points).map_err(to_py)
}

fn rows(cloud: &core::PointCloud) -> Vec<Vec<f64>> {
    cloud.points().map(<[f64]>::to_vec).collect()
}

/// Signed integer sparse matrix with entries in {-1, +1} (or small integers).
#[pyclass(
    name = "SparseMatrix",
    module = "chaincongruence",
    frozen,
    eq,
    from_py_object
)]
#[derive(Clone, PartialEq)]
pub struct PySparseMatrix(core::SignedSparseMatrix);

#[pymethods]
impl PySparseMatrix {
    /// Build from `(row, col, value)` triples with 0-based indices.
    #[new]
    #[pyo3(signature = (nrows, ncols, triples=Vec::new()))]
    fn new(nrows: usize, ncols: usize, triples: Vec<(usize, usize, i32)>) -> PyResult<Self> {
        core::SignedSparseMatrix::from_triples(nrows, ncols, triples)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.nrows(), self.0.ncols())
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.0.nnz()
    }

    /// Nonzero `(row, col, value)` triples in column-major order.
    fn triples(&self) -> Vec<(usize, usize, i32)> {
        self.0.triples().collect()
    }

    fn to_dense(&self) -> Vec<Vec<i32>> {
        self.0.to_dense()
    }

    fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    fn matmul(&self, other: &Self) -> PyResult<Self> {
        self.0.matmul(&other.0).map(Self).map_err(to_py)
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        self.matmul(other)
    }

    fn __repr__(&self) -> String {
        format!(
            "SparseMatrix(shape=({}, {}), nnz={})",
            self.0.nrows(),
            self.0.ncols(),
            self.0.nnz()
        )
    }
}

/// Local chain complexes stacked block-diagonally.
#[pyclass(
    name = "AccumulatorComplex",
    module = "chaincongruence",
    frozen,
    from_py_object
)]
#[derive(Clone)]
pub struct PyAccumulator(core::AccumulatorComplex);

#[pymethods]
impl PyAccumulator {
    #[new]
    fn new(
        vertices: Vec<[f64; 3]>,
        delta0: PySparseMatrix,
        delta1: PySparseMatrix,
    ) -> PyResult<Self> {
        core::AccumulatorComplex::new(cloud(vertices)?, delta0.0, delta1.0)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::complex_from_json(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> String {
        io::complex_to_json(&self.0)
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        io::save_complex(&self.0, path).map_err(to_py)
    }

    /// `(vertex instances, local edges, local faces)`.
    fn counts(&self) -> (usize, usize, usize) {
        let [v, e, f] = self.0.counts();
        (v, e, f)
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        rows(self.0.vertices())
    }

    #[getter]
    fn delta0(&self) -> PySparseMatrix {
        PySparseMatrix(self.0.delta0().clone())
    }

    #[getter]
    fn delta1(&self) -> PySparseMatrix {
        PySparseMatrix(self.0.delta1().clone())
    }

    fn __repr__(&self) -> String {
        let [v, e, f] = self.0.counts();
        format!("AccumulatorComplex(vertices={v}, edges={e}, faces={f})")
    }
}

/// Merged global complex with its class maps.
#[pyclass(
    name = "QuotientComplex",
    module = "chaincongruence",
    frozen,
    from_py_object
)]
#[derive(Clone)]
pub struct PyQuotient(core::QuotientComplex);

#[pymethods]
impl PyQuotient {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::quotient_from_json(text).map(Self).map_err(to_py)
    }

    fn to_json(&self) -> String {
        io::quotient_to_json(&self.0)
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        io::save_quotient(&self.0, path).map_err(to_py)
    }

    /// `(vertices, edges, faces)`.
    fn counts(&self) -> (usize, usize, usize) {
        let [v, e, f] = self.0.counts();
        (v, e, f)
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        rows(&self.0.vertices)
    }

    /// Edges as vertex index pairs, in first-occurrence order.
    #[getter]
    fn ev(&self) -> Vec<Vec<usize>> {
        self.0.ev.cells.clone()
    }

    /// Faces as sorted edge index lists, in first-occurrence order.
    #[getter]
    fn fe(&self) -> Vec<Vec<usize>> {
        self.0.fe.cells.clone()
    }

    /// Signed coboundary operators; `None` for the array-of-arrays engine.
    #[getter]
    fn delta0(&self) -> Option<PySparseMatrix> {
        self.0.delta0.clone().map(PySparseMatrix)
    }

    #[getter]
    fn delta1(&self) -> Option<PySparseMatrix> {
        self.0.delta1.clone().map(PySparseMatrix)
    }

    #[getter]
    fn vclasses(&self) -> Vec<Vec<usize>> {
        self.0.vclasses.classes.clone()
    }

    #[getter]
    fn eclasses(&self) -> Vec<Vec<usize>> {
        self.0.eclasses.classes.clone()
    }

    #[getter]
    fn fclasses(&self) -> Vec<Vec<usize>> {
        self.0.fclasses.classes.clone()
    }

    /// Input edge and face indices dropped as degenerate.
    #[getter]
    fn dropped(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.0.eclasses.dropped.clone(),
            self.0.fclasses.dropped.clone(),
        )
    }

    fn __repr__(&self) -> String {
        let [v, e, f] = self.0.counts();
        format!("QuotientComplex(vertices={v}, edges={e}, faces={f})")
    }
}

#[pyclass(name = "ValidationReport", module = "chaincongruence", frozen)]
pub struct PyReport {
    #[pyo3(get)]
    counts: Vec<usize>,
    #[pyo3(get)]
    dd_zero: Option<bool>,
    #[pyo3(get)]
    dropped: Vec<usize>,
    #[pyo3(get)]
    euler: i64,
    #[pyo3(get)]
    euler_expected: Option<i64>,
    #[pyo3(get)]
    partitions_ok: bool,
    #[pyo3(get)]
    violations: Vec<String>,
    #[pyo3(get)]
    passed: bool,
    json: String,
}

#[pymethods]
impl PyReport {
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        let py_bool = |b: bool| if b { "True" } else { "False" };
        let dd = self.dd_zero.map_or("None", py_bool);
        format!(
            "ValidationReport(passed={}, dd_zero={dd}, euler={})",
            py_bool(self.passed),
            self.euler
        )
    }
}

#[pyfunction]
fn load_complex(path: std::path::PathBuf) -> PyResult<PyAccumulator> {
    io::load_complex(path).map(PyAccumulator).map_err(to_py)
}

#[pyfunction]
fn load_quotient(path: std::path::PathBuf) -> PyResult<PyQuotient> {
    io::load_quotient(path).map(PyQuotient).map_err(to_py)
}

/// Merge an accumulator complex. `engine` is `"sparse"` or `"aa"`.
#[pyfunction]
#[pyo3(signature = (acc, epsilon=Tolerance::DEFAULT, engine="sparse", self_check=true, threads=None))]
fn chain_congruence(
    py: Python<'_>,
    acc: &PyAccumulator,
    epsilon: f64,
    engine: &str,
    self_check: bool,
    threads: Option<usize>,
) -> PyResult<PyQuotient> {
    let options = MergeOptions {
        tolerance: Tolerance::new(epsilon).map_err(to_py)?,
        engine: engine.parse::<Engine>().map_err(to_py)?,
        self_check,
        threads,
    };
    py.detach(|| core::chain_congruence(&acc.0, &options))
        .map(PyQuotient)
        .map_err(to_py)
}

/// Weld points within `epsilon`; returns `(centroids, classes)`.
#[pyfunction]
#[pyo3(signature = (points, epsilon=Tolerance::DEFAULT))]
#[allow(clippy::type_complexity)]
fn vertex_congruence(
    points: Vec<[f64; 3]>,
    epsilon: f64,
) -> PyResult<(Vec<Vec<f64>>, Vec<Vec<usize>>)> {
    let tol = Tolerance::new(epsilon).map_err(to_py)?;
    let (w, classes) = core::vertex_congruence(&cloud(points)?, tol).map_err(to_py)?;
    Ok((rows(&w), classes.classes))
}

#[pyfunction]
fn euler_characteristic(counts: Vec<usize>) -> i64 {
    core::euler_characteristic(&counts)
}

#[pyfunction]
#[pyo3(signature = (q, expected_euler=None))]
fn validate(q: &PyQuotient, expected_euler: Option<i64>) -> PyReport {
    let r = core::validate(&q.0, expected_euler);
    PyReport {
        passed: r.passed(),
        json: io::report_to_json(&r),
        counts: r.counts,
        dd_zero: r.dd_zero,
        dropped: r.dropped,
        euler: r.euler.value,
        euler_expected: r.euler.expected,
        partitions_ok: r.partitions_ok,
        violations: r.violations,
    }
}

/// Generate an exploded `p x q x r` cuboid grid. With `cube=True` the cell
/// size is drawn at random, as for a single unit cube of random size.
#[pyfunction]
#[pyo3(signature = (cells=(1, 1, 1), seed=0, jitter=0.0, epsilon=Tolerance::DEFAULT, cube=false))]
fn exploded_grid(
    cells: (usize, usize, usize),
    seed: u64,
    jitter: f64,
    epsilon: f64,
    cube: bool,
) -> PyResult<PyAccumulator> {
    let base = if cube {
        GridOptions::unit_cube(seed)
    } else {
        GridOptions::grid([cells.0, cells.1, cells.2], seed)
    };
    let opts = GridOptions {
        cells: [cells.0, cells.1, cells.2],
        jitter,
        epsilon,
        ..base
    };
    core_exploded_grid(&opts).map(PyAccumulator).map_err(to_py)
}

#[pymodule]
pub fn chaincongruence(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add(
        "ChainCongruenceError",
        m.py().get_type::<ChainCongruenceError>(),
    )?;
    m.add("DEFAULT_EPSILON", Tolerance::DEFAULT)?;
    m.add_class::<PySparseMatrix>()?;
    m.add_class::<PyAccumulator>()?;
    m.add_class::<PyQuotient>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(load_complex, m)?)?;
    m.add_function(wrap_pyfunction!(load_quotient, m)?)?;
    m.add_function(wrap_pyfunction!(chain_congruence, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_congruence, m)?)?;
    m.add_function(wrap_pyfunction!(euler_characteristic, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(exploded_grid, m)?)?;
    Ok(())
}
