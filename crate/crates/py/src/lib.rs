//! Python bindings. Reports come back as JSON strings with the same schema as
//! the CLI artifacts.

use eklab::boundary_layer;
use eklab::ek::{self, EkConfig};
use eklab::entropy::gn;
use eklab::grid::{FlowState, Grid1D};
use eklab::harness::{self, Config, IdentitySuite, Preset};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn val<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rt<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(rt)
}

#[pyclass(name = "StateFunctions", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyStateFunctions {
    inner: eklab::StateFunctions,
}

#[pymethods]
impl PyStateFunctions {
    #[new]
    #[pyo3(signature = (gamma, alpha, c_alpha, epsilon))]
    fn new(gamma: f64, alpha: f64, c_alpha: f64, epsilon: f64) -> PyResult<Self> {
        eklab::StateFunctions::new(gamma, alpha, c_alpha, epsilon)
            .map(|inner| Self { inner })
            .map_err(val)
    }

    #[staticmethod]
    fn qhd(gamma: f64, epsilon: f64) -> PyResult<Self> {
        eklab::StateFunctions::qhd(gamma, epsilon)
            .map(|inner| Self { inner })
            .map_err(val)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon()
    }

    fn pressure(&self, rho: f64) -> PyResult<f64> {
        self.inner.pressure(rho).map_err(val)
    }

    fn internal_energy(&self, rho: f64) -> PyResult<f64> {
        self.inner.internal_energy(rho).map_err(val)
    }

    fn relative_internal_energy(&self, rho: f64, r: f64) -> PyResult<f64> {
        self.inner.relative_internal_energy(rho, r).map_err(val)
    }

    /// `(k, k')`.
    fn capillarity_k(&self, rho: f64) -> PyResult<(f64, f64)> {
        self.inner.capillarity_k(rho).map_err(val)
    }

    /// `(β, β')`.
    fn beta_of_rho(&self, rho: f64) -> PyResult<(f64, f64)> {
        self.inner.beta_of_rho(rho).map_err(val)
    }

    /// `(μ, μ')`.
    fn mu_of_rho(&self, rho: f64) -> PyResult<(f64, f64)> {
        self.inner.mu_of_rho(rho).map_err(val)
    }

    /// `(θ, θ')`.
    fn theta_of_rho(&self, rho: f64) -> PyResult<(f64, f64)> {
        self.inner.theta_of_rho(rho).map_err(val)
    }

    fn aux_velocity_v(&self, rho: f64, grad_rho: f64) -> PyResult<f64> {
        self.inner.aux_velocity_v(rho, grad_rho).map_err(val)
    }
}

/// EK solver on `[0, 1]` started from a named preset.
#[pyclass(name = "EkSolver")]
struct PyEkSolver {
    inner: ek::EkSolver,
    sf: eklab::StateFunctions,
}

#[pymethods]
impl PyEkSolver {
    #[new]
    #[pyo3(signature = (state, n_cells, t_end, preset = "cosine-bump"))]
    fn new(state: &PyStateFunctions, n_cells: usize, t_end: f64, preset: &str) -> PyResult<Self> {
        let p = Preset::parse(preset).ok_or_else(|| val(format!("unknown preset `{preset}`")))?;
        let grid = Grid1D::unit(n_cells).map_err(val)?;
        let init = FlowState::from_fns(grid, |x| p.rho0(x), |x| p.rho0(x) * p.u0(x));
        let inner = ek::EkSolver::new(EkConfig::new(state.inner, grid, t_end), &init).map_err(val)?;
        Ok(Self { inner, sf: state.inner })
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time()
    }

    #[getter]
    fn steps(&self) -> u64 {
        self.inner.steps()
    }

    fn advance_to(&mut self, py: Python<'_>, t: f64) -> PyResult<()> {
        py.detach(|| self.inner.advance_to(t)).map_err(rt)
    }

    fn x(&self) -> Vec<f64> {
        self.inner.state().grid.centers()
    }

    fn rho(&self) -> Vec<f64> {
        self.inner.state().rho.values
    }

    fn momentum(&self) -> Vec<f64> {
        self.inner.state().j.values
    }

    fn mass(&self) -> f64 {
        self.inner.state().mass()
    }

    fn energy(&self) -> f64 {
        ek::total_energy(&self.sf, &self.inner.state())
    }
}

/// Admissible upper bound for the boundary-layer rate in dimension `d`.
#[pyfunction]
#[pyo3(signature = (alpha, d = 1))]
fn s_max(alpha: f64, d: u32) -> f64 {
    boundary_layer::s_max(d, alpha)
}

/// Parses and validates a config; returns the resolved config as JSON.
#[pyfunction]
fn parse_config(text: &str) -> PyResult<String> {
    json(&Config::parse(text).map_err(val)?)
}

/// One EK run against its Euler reference; returns the run summary.
#[pyfunction]
#[pyo3(signature = (config, epsilon = None))]
fn simulate(py: Python<'_>, config: &str, epsilon: Option<f64>) -> PyResult<String> {
    let cfg = Config::parse(config).map_err(val)?;
    let eps = match epsilon {
        Some(e) => e,
        None => cfg.epsilon().map_err(val)?,
    };
    let out = py.detach(|| harness::run_experiment(&cfg, eps)).map_err(rt)?;
    json(&out.summary)
}

#[pyfunction]
#[pyo3(signature = (config, serial = true))]
fn sweep(py: Python<'_>, config: &str, serial: bool) -> PyResult<String> {
    let cfg = Config::parse(config).map_err(val)?;
    let rep = py.detach(|| harness::run_sweep(&cfg, serial)).map_err(rt)?;
    json(&rep)
}

#[pyfunction]
#[pyo3(signature = (seed = 0, count = 100))]
fn check_identities(seed: u64, count: usize) -> PyResult<String> {
    json(&IdentitySuite::new(seed, count).run())
}

#[pyfunction]
#[pyo3(signature = (d, alpha, draws = 100, seed = 0))]
fn gn_check(py: Python<'_>, d: usize, alpha: f64, draws: usize, seed: u64) -> PyResult<String> {
    let s = py
        .detach(|| gn::gn_sweep(d, alpha, draws, seed, gn::default_cells(d), false))
        .map_err(val)?;
    json(&s)
}

/// EK against the NLS oracle, configured by the `nls.*` keys.
#[pyfunction]
#[pyo3(signature = (config = "run.preset = cosine-bump"))]
fn nls_compare(py: Python<'_>, config: &str) -> PyResult<String> {
    let cfg = Config::parse(config).map_err(val)?;
    let p = cfg.run.preset;
    let rep = py
        .detach(|| eklab::nls::oracle_compare(&cfg.nls, |x| p.rho0(x), |x| p.u0(x)))
        .map_err(rt)?;
    json(&rep)
}

#[pymodule]
fn eklab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStateFunctions>()?;
    m.add_class::<PyEkSolver>()?;
    m.add_function(wrap_pyfunction!(s_max, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(check_identities, m)?)?;
    m.add_function(wrap_pyfunction!(gn_check, m)?)?;
    m.add_function(wrap_pyfunction!(nls_compare, m)?)?;
    Ok(())
}
