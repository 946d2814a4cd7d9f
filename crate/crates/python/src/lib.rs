//! Python bindings. Matrices cross the boundary as lists of lists of
//! Python `complex`.

use num_complex::Complex64;
use pyo3::exceptions::{PyFileNotFoundError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qfilter::catalog;
use qfilter::io;
use qfilter::linalg::CMatrix;
use qfilter::mcsim;
use qfilter::measure;
use qfilter::qstate;
use qfilter::scan;
use qfilter::verify;
use qfilter::witness;
use qfilter::Error;

type Rows = Vec<Vec<Complex64>>;
type ScanTuple = (f64, f64, Option<f64>, bool);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::FileNotFound(path) => PyFileNotFoundError::new_err(path),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_rows(m: &CMatrix) -> Rows {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn from_rows(rows: Rows) -> PyResult<CMatrix> {
    CMatrix::from_rows(&rows).map_err(py_err)
}

#[pyclass(
    name = "DensityOperator",
    module = "qfilter",
    frozen,
    skip_from_py_object
)]
#[derive(Clone, Debug)]
pub struct PyDensityOperator {
    inner: qstate::DensityOperator,
}

#[pymethods]
impl PyDensityOperator {
    #[new]
    fn new(dim_a: usize, dim_b: usize, matrix: Rows) -> PyResult<Self> {
        let inner =
            qstate::DensityOperator::new(dim_a, dim_b, from_rows(matrix)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Builtin label such as `rho-xt:0.63:0.05`, or a path to a JSON file.
    #[staticmethod]
    fn resolve(arg: &str) -> PyResult<Self> {
        Ok(Self {
            inner: io::resolve_state(arg).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: io::state_from_json(text).map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        io::state_to_json(&self.inner).to_string()
    }

    #[getter]
    fn dim_a(&self) -> usize {
        self.inner.dim_a()
    }

    #[getter]
    fn dim_b(&self) -> usize {
        self.inner.dim_b()
    }

    fn matrix(&self) -> Rows {
        to_rows(self.inner.matrix())
    }

    fn partial_transpose(&self) -> Rows {
        to_rows(&qstate::partial_transpose_b(&self.inner))
    }

    /// `(is_ppt, min_eigenvalue)` of the partial transpose.
    fn ppt(&self) -> (bool, f64) {
        let s = qstate::is_ppt(&self.inner);
        (s.ppt, s.min_eigenvalue)
    }

    fn __repr__(&self) -> String {
        format!(
            "DensityOperator(dim_a={}, dim_b={})",
            self.inner.dim_a(),
            self.inner.dim_b()
        )
    }
}

#[pyclass(name = "LocalFilter", module = "qfilter", frozen, skip_from_py_object)]
#[derive(Clone, Debug)]
pub struct PyLocalFilter {
    inner: qfilter::LocalFilter,
}

#[pymethods]
impl PyLocalFilter {
    #[new]
    fn new(l: Rows, m: Rows) -> PyResult<Self> {
        Ok(Self {
            inner: qfilter::LocalFilter::new(from_rows(l)?, from_rows(m)?).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (arg, dim_a = 3, dim_b = 3))]
    fn resolve(arg: &str, dim_a: usize, dim_b: usize) -> PyResult<Self> {
        Ok(Self {
            inner: io::resolve_filter(arg, (dim_a, dim_b)).map_err(py_err)?,
        })
    }

    #[getter]
    fn dims(&self) -> (usize, usize) {
        self.inner.dims()
    }

    fn l(&self) -> Rows {
        to_rows(self.inner.l())
    }

    fn m(&self) -> Rows {
        to_rows(self.inner.m())
    }

    fn yield_bound(&self) -> f64 {
        self.inner.yield_bound()
    }

    /// Filtered, renormalized state and the yield.
    fn apply(&self, state: &PyDensityOperator) -> PyResult<(PyDensityOperator, f64)> {
        let (inner, y) = self.inner.apply(&state.inner).map_err(py_err)?;
        Ok((PyDensityOperator { inner }, y))
    }

    fn to_json(&self) -> String {
        io::filter_to_json(&self.inner).to_string()
    }
}

#[pyclass(name = "Witness", module = "qfilter", frozen, skip_from_py_object)]
#[derive(Clone, Debug)]
pub struct PyWitness {
    inner: witness::PositiveMapWitness,
}

#[pymethods]
impl PyWitness {
    /// `spec` is `<kind>:<side>`; `dims` are those of the states it will see.
    #[new]
    #[pyo3(signature = (spec, dim_a = 3, dim_b = 3))]
    fn new(spec: &str, dim_a: usize, dim_b: usize) -> PyResult<Self> {
        Ok(Self {
            inner: witness::PositiveMapWitness::parse(spec, (dim_a, dim_b)).map_err(py_err)?,
        })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().as_str()
    }

    #[getter]
    fn side(&self) -> String {
        self.inner.side().to_string()
    }

    fn apply(&self, state: &PyDensityOperator) -> PyResult<Rows> {
        Ok(to_rows(
            &witness::apply_witness(&self.inner, &state.inner).map_err(py_err)?,
        ))
    }

    /// `(detected, min_eigenvalue)`.
    fn detect(&self, state: &PyDensityOperator) -> PyResult<(bool, f64)> {
        let r = witness::detect(&self.inner, &state.inner, "").map_err(py_err)?;
        Ok((r.detected, r.min_eigenvalue))
    }

    fn __repr__(&self) -> String {
        format!("Witness('{}')", self.inner)
    }
}

#[pyfunction]
fn rho_xt(x: f64, t: f64) -> PyResult<PyDensityOperator> {
    Ok(PyDensityOperator {
        inner: catalog::rho_xt(x, t).map_err(py_err)?,
    })
}

#[pyfunction]
fn rho_upb() -> PyDensityOperator {
    PyDensityOperator {
        inner: catalog::rho_upb(),
    }
}

#[pyfunction]
fn bell_state() -> PyDensityOperator {
    PyDensityOperator {
        inner: catalog::bell_state(),
    }
}

#[pyfunction]
fn schmidt_rank(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex64>) -> PyResult<usize> {
    let psi = qstate::PureState::normalized(dim_a, dim_b, amplitudes).map_err(py_err)?;
    Ok(qstate::schmidt_rank(&psi))
}

#[pyfunction]
fn build_projector(d: Vec<f64>) -> PyResult<Rows> {
    Ok(to_rows(
        measure::build_projector(&d).map_err(py_err)?.matrix(),
    ))
}

#[pyfunction]
fn postselect_diag(d: Vec<f64>, rho: Rows) -> PyResult<(Rows, f64)> {
    let (m, p) = measure::postselect_diag(&d, &from_rows(rho)?).map_err(py_err)?;
    Ok((to_rows(&m), p))
}

/// Exact protocol outcome: `(state, total_probability)`.
#[pyfunction]
fn protocol_analytic(
    filter: &PyLocalFilter,
    state: &PyDensityOperator,
) -> PyResult<(PyDensityOperator, f64)> {
    let out = measure::protocol_analytic(&filter.inner, &state.inner).map_err(py_err)?;
    Ok((PyDensityOperator { inner: out.state }, out.total_prob))
}

#[pyfunction]
fn run_protocol<'py>(
    py: Python<'py>,
    filter: &PyLocalFilter,
    state: &PyDensityOperator,
    shots: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let run = py
        .detach(|| mcsim::run_protocol(&filter.inner, &state.inner, shots, seed))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("shots", run.shots)?;
    d.set_item("seed", run.seed)?;
    d.set_item("rng", run.rng_algorithm)?;
    d.set_item("accepted", run.accepted)?;
    d.set_item("acceptance_rate", run.acceptance_rate)?;
    d.set_item("analytic_probability", run.analytic_probability)?;
    d.set_item("frobenius_distance", run.frobenius_distance())?;
    d.set_item("estimated_state", run.estimated_state.as_ref().map(to_rows))?;
    Ok(d)
}

/// Rows `(x, min_eig_unfiltered, min_eig_filtered, ppt)` in grid order.
#[pyfunction]
#[pyo3(signature = (t, x_min, x_max, steps, witness = "choi-phi:A", filter = None))]
fn scan_window(
    py: Python<'_>,
    t: f64,
    x_min: f64,
    x_max: f64,
    steps: usize,
    witness: &str,
    filter: Option<&PyLocalFilter>,
) -> PyResult<Vec<ScanTuple>> {
    let spec = scan::ScanSpec {
        t,
        x_min,
        x_max,
        steps,
        witness: witness::PositiveMapWitness::parse(witness, (3, 3)).map_err(py_err)?,
        filter: filter.map(|f| f.inner.clone()),
    };
    let rows = py.detach(|| scan::run_scan(&spec)).map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.x, r.min_eig_unfiltered, r.min_eig_filtered, r.ppt))
        .collect())
}

/// `(all_pass, table)` for the full set of reproduction checks.
#[pyfunction]
#[pyo3(signature = (t_neg = qfilter::tol::T_NEG))]
fn verify_all(py: Python<'_>, t_neg: f64) -> (bool, String) {
    let report = py.detach(|| verify::verify_all(verify::VerifyOptions { t_neg }));
    (report.all_pass(), report.table())
}

#[pymodule(name = "qfilter")]
mod qfilter_module {
    #[pymodule_export]
    use super::{
        bell_state, build_projector, postselect_diag, protocol_analytic, rho_upb, rho_xt,
        run_protocol, scan_window, schmidt_rank, verify_all, PyDensityOperator, PyLocalFilter,
        PyWitness,
    };
}
