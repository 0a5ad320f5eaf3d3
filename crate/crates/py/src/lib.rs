//! Python bindings. Every function raises ValueError on bad input and
//! RuntimeError when an internal verification check fails.

use mixprofile::gelfand::{ehrenfest_exact_tv, ehrenfest_profile_point, ehrenfest_schedule};
use mixprofile::hypercube::{hypercube_exact_tv, hypercube_profile_point, hypercube_schedule};
use mixprofile::montecarlo::{
    chi_square_gate, simulate_ehrenfest_occupancy, simulate_gibbs, simulate_kcycle_fixed_points, SimConfig,
    DEFAULT_SIGNIFICANCE, RNG_ALGORITHM,
};
use mixprofile::special::{gaussian_profile, poisson_profile};
use mixprofile::symmetric::{kcycle_exact_tv, kcycle_profile_point, kcycle_schedule};
use mixprofile::verify::{run_suite, Suite};
use mixprofile::{Error, Scalar};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Verification(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// One row of a profile table.
#[pyclass(name = "ProfilePoint", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyProfilePoint {
    pub c: f64,
    pub t: u64,
    pub exact_tv: f64,
    pub main_term: f64,
    pub error_term: f64,
    pub limit_value: f64,
}

#[pymethods]
impl PyProfilePoint {
    #[getter]
    fn gap(&self) -> f64 {
        (self.exact_tv - self.limit_value).abs()
    }

    fn sandwich_holds(&self, slack: f64) -> bool {
        (self.exact_tv - self.main_term).abs() <= self.error_term + slack
    }

    fn __repr__(&self) -> String {
        format!(
            "ProfilePoint(c={}, t={}, exact_tv={}, main_term={}, error_term={}, limit_value={})",
            self.c, self.t, self.exact_tv, self.main_term, self.error_term, self.limit_value
        )
    }
}

impl From<mixprofile::ProfilePoint> for PyProfilePoint {
    fn from(p: mixprofile::ProfilePoint) -> Self {
        PyProfilePoint {
            c: p.c,
            t: p.t,
            exact_tv: p.exact_tv,
            main_term: p.main_term,
            error_term: p.error_term,
            limit_value: p.limit_value,
        }
    }
}

/// Two-component Gibbs sampler on n1 + n2 binary sites.
#[pyclass(name = "GibbsModel", frozen)]
pub struct PyGibbsModel {
    inner: mixprofile::gibbs::GibbsModel,
}

#[pymethods]
impl PyGibbsModel {
    #[new]
    fn new(n1: usize, n2: usize, p: f64) -> PyResult<Self> {
        Ok(PyGibbsModel { inner: mixprofile::gibbs::GibbsModel::from_f64(n1, n2, p).map_err(py_err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn eigenvalue(&self, i: usize) -> f64 {
        self.inner.eigenvalue(i)
    }

    fn schedule(&self, c: f64) -> PyResult<u64> {
        self.inner.schedule(c).map_err(py_err)
    }

    fn exact_tv(&self, t: u64) -> PyResult<f64> {
        self.inner.exact_tv(t).map_err(py_err)
    }

    fn profile_point(&self, c: f64, m: usize) -> PyResult<PyProfilePoint> {
        self.inner.profile_point(c, m).map(Into::into).map_err(py_err)
    }

    fn simulate(&self, t: u64, seed: u64, trajectories: u64) -> PyResult<Vec<u64>> {
        let cfg = SimConfig::new(seed, trajectories).map_err(py_err)?;
        Ok(simulate_gibbs(&self.inner, t, &cfg).map_err(py_err)?.counts)
    }
}

#[pyfunction]
fn kcycle_tv(n: usize, k: usize, t: u64) -> PyResult<f64> {
    Ok(Scalar::to_f64(&kcycle_exact_tv(n, k, t).map_err(py_err)?))
}

#[pyfunction]
fn kcycle_steps(n: usize, k: usize, c: f64) -> PyResult<u64> {
    kcycle_schedule(n, k, c).map_err(py_err)
}

#[pyfunction]
fn kcycle_point(n: usize, k: usize, c: f64, m: usize) -> PyResult<PyProfilePoint> {
    kcycle_profile_point(n, k, c, m).map(Into::into).map_err(py_err)
}

#[pyfunction]
fn ehrenfest_tv(n: usize, m: usize, t: u64) -> PyResult<f64> {
    ehrenfest_exact_tv(n, m, t).map_err(py_err)
}

#[pyfunction]
fn ehrenfest_steps(n: usize, m: usize, c: f64) -> PyResult<u64> {
    ehrenfest_schedule(n, m, c).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n, m, c, epsilon = 1e-3))]
fn ehrenfest_point(n: usize, m: usize, c: f64, epsilon: f64) -> PyResult<PyProfilePoint> {
    ehrenfest_profile_point(n, m, c, epsilon).map(Into::into).map_err(py_err)
}

#[pyfunction]
fn hypercube_tv(n: usize, t: u64) -> PyResult<f64> {
    hypercube_exact_tv(n, t).map_err(py_err)
}

#[pyfunction]
fn hypercube_steps(n: usize, c: f64) -> PyResult<u64> {
    hypercube_schedule(n, c).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n, c, epsilon = 1e-3))]
fn hypercube_point(n: usize, c: f64, epsilon: f64) -> PyResult<PyProfilePoint> {
    hypercube_profile_point(n, c, epsilon).map(Into::into).map_err(py_err)
}

#[pyfunction]
fn gaussian_limit(c: f64) -> f64 {
    gaussian_profile(c)
}

#[pyfunction]
fn poisson_limit(c: f64) -> f64 {
    poisson_profile(c)
}

/// Returns (suite, check, cases, failures, passed) tuples.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 1))]
fn verify(suite: &str, seed: u64) -> PyResult<Vec<(String, String, usize, usize, bool)>> {
    let suite: Suite = suite.parse().map_err(py_err)?;
    let reports = run_suite(suite, seed).map_err(py_err)?;
    Ok(reports
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .map(move |c| (r.suite.to_string(), c.name.clone(), c.cases, c.failures, c.passed()))
        })
        .collect())
}

#[pyfunction]
fn simulate_kcycle(n: usize, k: usize, t: u64, seed: u64, trajectories: u64) -> PyResult<Vec<u64>> {
    let cfg = SimConfig::new(seed, trajectories).map_err(py_err)?;
    Ok(simulate_kcycle_fixed_points(n, k, t, &cfg).map_err(py_err)?.counts)
}

#[pyfunction]
fn simulate_ehrenfest(n: usize, m: usize, t: u64, seed: u64, trajectories: u64) -> PyResult<Vec<u64>> {
    let cfg = SimConfig::new(seed, trajectories).map_err(py_err)?;
    Ok(simulate_ehrenfest_occupancy(n, m, t, &cfg).map_err(py_err)?.counts)
}

/// Returns (statistic, dof, p_value, passed).
#[pyfunction]
#[pyo3(signature = (counts, probs, significance = DEFAULT_SIGNIFICANCE))]
fn chi_square(counts: Vec<u64>, probs: Vec<f64>, significance: f64) -> PyResult<(f64, usize, f64, bool)> {
    let r = chi_square_gate(&counts, &probs, significance).map_err(py_err)?;
    Ok((r.statistic, r.dof, r.p_value, r.passed))
}

#[pymodule]
#[pyo3(name = "mixprofile")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProfilePoint>()?;
    m.add_class::<PyGibbsModel>()?;
    m.add_function(wrap_pyfunction!(kcycle_tv, m)?)?;
    m.add_function(wrap_pyfunction!(kcycle_steps, m)?)?;
    m.add_function(wrap_pyfunction!(kcycle_point, m)?)?;
    m.add_function(wrap_pyfunction!(ehrenfest_tv, m)?)?;
    m.add_function(wrap_pyfunction!(ehrenfest_steps, m)?)?;
    m.add_function(wrap_pyfunction!(ehrenfest_point, m)?)?;
    m.add_function(wrap_pyfunction!(hypercube_tv, m)?)?;
    m.add_function(wrap_pyfunction!(hypercube_steps, m)?)?;
    m.add_function(wrap_pyfunction!(hypercube_point, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_limit, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_limit, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_kcycle, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_ehrenfest, m)?)?;
    m.add_function(wrap_pyfunction!(chi_square, m)?)?;
    m.add("RNG_ALGORITHM", RNG_ALGORITHM)?;
    Ok(())
}
