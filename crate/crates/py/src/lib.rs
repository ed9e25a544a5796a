//! Python bindings for the brainstorm solvers.
//!
//! Results come back as plain Python objects (floats, lists and small
//! read-only classes), so no array library is required.

use brainstorm as core;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::Solver(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn grid(times: Vec<f64>) -> PyResult<core::TimeGrid> {
    core::TimeGrid::new(times).map_err(to_py)
}

/// Model primitives: discount rate, prior validity, prior on the hard state,
/// state arrival rates and flow cost.
#[pyclass(name = "ModelParams", frozen, module = "brainstorm_py")]
struct PyModelParams(core::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    fn new(r: f64, nu0: f64, delta0: f64, lambda_e: f64, lambda_h: f64, c: f64) -> PyResult<Self> {
        core::ModelParams::new(r, nu0, delta0, lambda_e, lambda_h, c).map(Self).map_err(to_py)
    }

    /// Parameters with a single known arrival rate.
    #[staticmethod]
    fn known(r: f64, nu0: f64, lambda: f64, c: f64) -> PyResult<Self> {
        core::ModelParams::known(r, nu0, lambda, c).map(Self).map_err(to_py)
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }
    #[getter]
    fn nu0(&self) -> f64 {
        self.0.nu0()
    }
    #[getter]
    fn delta0(&self) -> f64 {
        self.0.delta0()
    }
    #[getter]
    fn lambda_e(&self) -> f64 {
        self.0.lambda_e()
    }
    #[getter]
    fn lambda_h(&self) -> f64 {
        self.0.lambda_h()
    }
    #[getter]
    fn c(&self) -> f64 {
        self.0.c()
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "ModelParams(r={}, nu0={}, delta0={}, lambda_e={}, lambda_h={}, c={})",
            p.r(),
            p.nu0(),
            p.delta0(),
            p.lambda_e(),
            p.lambda_h(),
            p.c()
        )
    }
}

/// Solved learning thresholds.
#[pyclass(name = "Thresholds", frozen, get_all, module = "brainstorm_py")]
struct PyThresholds {
    thresholds: Vec<f64>,
    brainstorm_times: Vec<f64>,
    residuals: Vec<f64>,
    /// Approach count after which no new approach is started, if any.
    n_bar: Option<usize>,
    /// Known-easy and known-hard thresholds; `inf` when never moving on.
    easy: f64,
    hard: f64,
}

/// Breadth path with derived depth and Euler-Lagrange residuals.
#[pyclass(name = "Trajectory", frozen, get_all, module = "brainstorm_py")]
struct PyTrajectory {
    times: Vec<f64>,
    breadth: Vec<f64>,
    depth: Vec<f64>,
    el_residual: Vec<f64>,
}

impl From<core::Trajectory> for PyTrajectory {
    fn from(t: core::Trajectory) -> Self {
        Self { times: t.times, breadth: t.breadth, depth: t.depth, el_residual: t.el_residual }
    }
}

/// Optimal dynamic share path with diagnostics.
#[pyclass(name = "ContractPath", frozen, get_all, module = "brainstorm_py")]
struct PyContractPath {
    times: Vec<f64>,
    alpha: Vec<f64>,
    x_alpha: Vec<f64>,
    x_first_best: Vec<f64>,
    incentive: Vec<f64>,
    distortion: Vec<f64>,
    law_residual: Vec<f64>,
    violations: Vec<usize>,
}

fn bound(t: core::Threshold) -> f64 {
    t.finite().unwrap_or(f64::INFINITY)
}

/// Stationary threshold with a known arrival rate.
#[pyfunction]
fn benchmark_threshold(p: &PyModelParams) -> PyResult<f64> {
    core::solve_benchmark_threshold(&p.0).map_err(to_py)
}

/// First `n_max` thresholds under difficulty uncertainty.
#[pyfunction]
#[pyo3(signature = (p, n_max = 20))]
fn learning_thresholds(p: &PyModelParams, n_max: usize) -> PyResult<PyThresholds> {
    let s = core::solve_learning_thresholds(&p.0, n_max).map_err(to_py)?;
    Ok(PyThresholds {
        easy: bound(s.bracket.0),
        hard: bound(s.bracket.1),
        thresholds: s.thresholds,
        brainstorm_times: s.brainstorm_times,
        residuals: s.residuals,
        n_bar: s.n_bar,
    })
}

/// Exact discounted payoff of a threshold policy. With `stationary` the last
/// threshold repeats forever; otherwise no approach follows the listed ones.
#[pyfunction]
#[pyo3(signature = (p, thresholds, stationary = false))]
fn policy_payoff(p: &PyModelParams, thresholds: Vec<f64>, stationary: bool) -> PyResult<f64> {
    let tail = if stationary { core::Tail::Stationary } else { core::Tail::Stop };
    let policy = core::ThresholdPolicy::new(thresholds, tail).map_err(to_py)?;
    core::policy_payoff(&p.0, &policy).map_err(to_py)
}

/// Optimal continuum breadth on increasing `times`.
#[pyfunction]
fn trajectory(p: &PyModelParams, times: Vec<f64>) -> PyResult<PyTrajectory> {
    core::solve_trajectory(&p.0, &grid(times)?).map(Into::into).map_err(to_py)
}

/// Limiting depths `(d0, d_h)` at the start and in the long run.
#[pyfunction]
fn depth_limits(p: &PyModelParams) -> PyResult<(f64, f64)> {
    let d = core::depth_limits(&p.0).map_err(to_py)?;
    Ok((d.d0, d.d_h))
}

/// Agent's breadth under a constant share `alpha`.
#[pyfunction]
fn best_response(p: &PyModelParams, alpha: f64, times: Vec<f64>) -> PyResult<PyTrajectory> {
    core::agent_best_response(&p.0, alpha, &grid(times)?).map(Into::into).map_err(to_py)
}

/// Profit-maximizing constant share as `(alpha, payoff)`.
#[pyfunction]
fn static_share(p: &PyModelParams) -> PyResult<(f64, f64)> {
    let s = core::optimal_static_share(&p.0).map_err(to_py)?;
    Ok((s.alpha, s.payoff))
}

/// Optimal dynamic share path.
#[pyfunction]
fn dynamic_contract(p: &PyModelParams, times: Vec<f64>) -> PyResult<PyContractPath> {
    let c = core::solve_dynamic_contract(&p.0, &grid(times)?).map_err(to_py)?;
    Ok(PyContractPath {
        times: c.times,
        alpha: c.alpha,
        x_alpha: c.x_alpha,
        x_first_best: c.x_first_best,
        incentive: c.incentive,
        distortion: c.distortion,
        law_residual: c.law_residual,
        violations: c.violations,
    })
}

/// No-commitment equilibrium as `(alpha, depth, payoff)`.
#[pyfunction]
fn no_commitment(p: &PyModelParams) -> PyResult<(f64, f64, f64)> {
    let n = core::no_commitment_equilibrium(&p.0).map_err(to_py)?;
    Ok((n.alpha, n.depth, n.payoff))
}

/// Extensive-margin share path `(initial, alpha)` under difficulty uncertainty.
#[pyfunction]
fn extensive_margin(
    lambda_e: f64,
    lambda_h: f64,
    gamma: f64,
    r: f64,
    delta0: f64,
    times: Vec<f64>,
) -> PyResult<(f64, Vec<f64>)> {
    let s = core::extensive_margin_learning_contract(lambda_e, lambda_h, gamma, r, delta0, &grid(times)?)
        .map_err(to_py)?;
    Ok((s.initial, s.alpha))
}

#[pymodule]
fn brainstorm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", core::VERSION)?;
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyThresholds>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyContractPath>()?;
    m.add_function(wrap_pyfunction!(benchmark_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(learning_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(policy_payoff, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(depth_limits, m)?)?;
    m.add_function(wrap_pyfunction!(best_response, m)?)?;
    m.add_function(wrap_pyfunction!(static_share, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic_contract, m)?)?;
    m.add_function(wrap_pyfunction!(no_commitment, m)?)?;
    m.add_function(wrap_pyfunction!(extensive_margin, m)?)?;
    Ok(())
}
