//! Python bindings: model parameters, the reproduction index, preset and
//! config-driven runs, periodic orbits and parameter sweeps.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use impulsive_logistic::engine::{simulate as run_simulation, OutputSpec};
use impulsive_logistic::experiments::{self, ExperimentError, Scenario as CoreScenario};
use impulsive_logistic::periodic::{period_map_fixed_point, FixedPointOutcome, DEFAULT_MAX_PERIODS};
use impulsive_logistic::{EvolutionRate, IndexReport as CoreIndex, ModelParams, PulseFunction};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn run_err(e: ExperimentError) -> PyErr {
    match e {
        ExperimentError::Config(_) | ExperimentError::Model(_) => value_err(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Diffusion `d`, growth `alpha`, competition `gamma`, domain length `l0`, pulse period.
#[pyclass(name = "Params", frozen, get_all, skip_from_py_object)]
#[derive(Clone, Copy)]
struct Params {
    d: f64,
    alpha: f64,
    gamma: f64,
    l0: f64,
    period: f64,
}

impl From<ModelParams> for Params {
    fn from(p: ModelParams) -> Self {
        Self { d: p.d, alpha: p.alpha, gamma: p.gamma, l0: p.l0, period: p.period }
    }
}

impl Params {
    fn core(&self) -> ModelParams {
        ModelParams { d: self.d, alpha: self.alpha, gamma: self.gamma, l0: self.l0, period: self.period }
    }
}

#[pymethods]
impl Params {
    #[new]
    fn new(d: f64, alpha: f64, gamma: f64, l0: f64, period: f64) -> PyResult<Self> {
        ModelParams::new(d, alpha, gamma, l0, period).map(Self::from).map_err(value_err)
    }

    #[staticmethod]
    fn reference() -> Self {
        ModelParams::reference().into()
    }

    fn __repr__(&self) -> String {
        format!("Params(d={}, alpha={}, gamma={}, l0={}, period={})", self.d, self.alpha, self.gamma, self.l0, self.period)
    }
}

/// Domain evolution rate `rho(t)`.
#[pyclass(name = "Rate", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct Rate(EvolutionRate);

#[pymethods]
impl Rate {
    #[staticmethod]
    fn constant(period: f64) -> PyResult<Self> {
        let r = EvolutionRate::constant(period);
        r.validate().map_err(value_err)?;
        Ok(Self(r))
    }

    /// `exp(c (1 - cos(2 pi t / period)))`.
    #[staticmethod]
    fn exp_cosine(amplitude: f64, period: f64) -> PyResult<Self> {
        let r = EvolutionRate::exp_cosine(amplitude, period);
        r.validate().map_err(value_err)?;
        Ok(Self(r))
    }

    #[getter]
    fn amplitude(&self) -> f64 {
        self.0.amplitude()
    }

    fn value(&self, t: f64) -> f64 {
        self.0.value(t)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

/// Pulse map applied at each multiple of the period.
#[pyclass(name = "Pulse", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct Pulse(PulseFunction);

impl Pulse {
    fn checked(p: PulseFunction) -> PyResult<Self> {
        p.validate().map_err(value_err)?;
        Ok(Self(p))
    }
}

#[pymethods]
impl Pulse {
    #[staticmethod]
    fn identity() -> Self {
        Self(PulseFunction::Identity)
    }

    /// `m u / (a + u)`.
    #[staticmethod]
    fn beverton_holt(a: f64, m: f64) -> PyResult<Self> {
        Self::checked(PulseFunction::BevertonHolt { a, m })
    }

    /// `u exp(r - b u)`.
    #[staticmethod]
    fn ricker(r: f64, b: f64) -> PyResult<Self> {
        Self::checked(PulseFunction::Ricker { r, b })
    }

    fn value(&self, u: f64) -> f64 {
        self.0.value(u)
    }

    fn derivative_at_zero(&self) -> f64 {
        self.0.derivative_at_zero()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyclass(name = "IndexReport", frozen, get_all)]
struct IndexReport {
    lambda1: f64,
    quad_rho: f64,
    ln_gprime0: f64,
    r0: Option<f64>,
    r_noimpulse: f64,
    lambda_star: f64,
    m_shift: f64,
    r0_star: f64,
}

impl From<CoreIndex> for IndexReport {
    fn from(r: CoreIndex) -> Self {
        Self {
            lambda1: r.lambda1,
            quad_rho: r.quad_rho,
            ln_gprime0: r.ln_gprime0,
            r0: r.r0,
            r_noimpulse: r.r_noimpulse,
            lambda_star: r.lambda_star,
            m_shift: r.m_shift,
            r0_star: r.r0_star,
        }
    }
}

#[pymethods]
impl IndexReport {
    /// `r0` when defined, else `r0_star`.
    fn index(&self) -> f64 {
        self.r0.unwrap_or(self.r0_star)
    }

    fn persists(&self) -> bool {
        self.lambda_star > 0.0
    }

    fn __repr__(&self) -> String {
        format!("IndexReport(r0={:?}, r0_star={}, lambda_star={})", self.r0, self.r0_star, self.lambda_star)
    }
}

#[pyfunction]
fn compute_index(params: PyRef<'_, Params>, rate: PyRef<'_, Rate>, pulse: PyRef<'_, Pulse>) -> PyResult<IndexReport> {
    impulsive_logistic::compute_index(&params.core(), &rate.0, &pulse.0).map(Into::into).map_err(value_err)
}

/// A complete run description: model, grid, initial data and period count.
#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
struct Scenario(CoreScenario);

#[pymethods]
impl Scenario {
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        experiments::preset(name).map(Self).ok_or_else(|| {
            value_err(format!("unknown preset {name:?}; known: {}", experiments::PRESET_NAMES.join(", ")))
        })
    }

    /// Parses a TOML run configuration.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        experiments::parse_config(text).map(Self).map_err(value_err)
    }

    /// Copy with one sweepable parameter replaced.
    fn with_param(&self, path: &str, value: f64) -> PyResult<Self> {
        self.0.with_param(path, value).map(Self).map_err(value_err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn params(&self) -> Params {
        self.0.params.into()
    }

    #[getter]
    fn rate(&self) -> Rate {
        Rate(self.0.rho)
    }

    #[getter]
    fn pulse(&self) -> Pulse {
        Pulse(self.0.pulse)
    }

    #[getter]
    fn n_periods(&self) -> usize {
        self.0.n_periods
    }

    #[setter]
    fn set_n_periods(&mut self, n: usize) {
        self.0.n_periods = n;
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.0.grid.nodes()
    }

    fn index(&self) -> PyResult<IndexReport> {
        impulsive_logistic::compute_index(&self.0.params, &self.0.rho, &self.0.pulse).map(Into::into).map_err(value_err)
    }

    /// Simulates the scenario and returns `(period_sup, final_state)`.
    fn simulate(&self, py: Python<'_>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let s = &self.0;
        py.detach(|| {
            let v0 = s.initial_state()?;
            let spec = OutputSpec { snapshots_per_period: 0, physical_frame: false };
            let t = run_simulation(&s.params, &s.rho, &s.pulse, &s.grid, &v0, s.n_periods, &spec)?;
            Ok((t.period_sup, t.final_state.values))
        })
        .map_err(|e: impulsive_logistic::Error| value_err(e))
    }

    /// Full run (index, simulation, classification, orbit). Writes
    /// artifacts when `out` is given and returns the summary as a dict.
    #[pyo3(signature = (out=None))]
    fn run<'py>(&self, py: Python<'py>, out: Option<PathBuf>) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let s = &self.0;
        let rec = py.detach(|| experiments::run_scenario(s, out.as_deref())).map_err(run_err)?;
        let d = pyo3::types::PyDict::new(py);
        d.set_item("name", &rec.name)?;
        d.set_item("classification", rec.classification.label())?;
        d.set_item("expected", rec.expected.as_str())?;
        d.set_item("r0", rec.index.r0)?;
        d.set_item("r0_star", rec.index.r0_star)?;
        d.set_item("lambda_star", rec.index.lambda_star)?;
        d.set_item("period_sup", &rec.period_sup)?;
        d.set_item("clamp_count", rec.clamp_count)?;
        d.set_item("decay_rate", rec.decay.map(|e| e.rate))?;
        d.set_item("orbit_min", rec.orbit.map(|o| o.min))?;
        d.set_item("orbit_max", rec.orbit.map(|o| o.max))?;
        d.set_item("errors", &rec.errors)?;
        Ok(d)
    }

    /// Iterates the period map from the initial state. Returns the state at
    /// the start of the period for a periodic orbit, or `None` on extinction.
    #[pyo3(signature = (tol=1e-8, max_periods=DEFAULT_MAX_PERIODS))]
    fn periodic_orbit(&self, py: Python<'_>, tol: f64, max_periods: usize) -> PyResult<Option<(Vec<f64>, f64)>> {
        let s = &self.0;
        let out = py
            .detach(|| {
                let v0 = s.initial_state()?;
                period_map_fixed_point(&s.params, &s.rho, &s.pulse, &s.grid, &v0.values, tol, max_periods)
            })
            .map_err(value_err)?;
        Ok(match out {
            FixedPointOutcome::Periodic(p) => Some((p.orbit.start, p.residual)),
            FixedPointOutcome::Extinct(_) => None,
        })
    }

    /// One-parameter sweep. Rows are `(value, r0, r0_star, lambda_star, classification)`;
    /// also returns the located `R0 = 1` crossings.
    #[pyo3(signature = (param, start, stop, points, simulate=false))]
    #[allow(clippy::type_complexity)]
    fn sweep(
        &self,
        py: Python<'_>,
        param: &str,
        start: f64,
        stop: f64,
        points: usize,
        simulate: bool,
    ) -> PyResult<(Vec<(f64, Option<f64>, f64, f64, Option<String>)>, Vec<f64>)> {
        let s = &self.0;
        let t = py.detach(|| experiments::sweep(s, param, start, stop, points, simulate)).map_err(run_err)?;
        let rows = t
            .rows
            .iter()
            .map(|r| (r.value, r.r0, r.r0_star, r.lambda_star, r.classification.map(|c| c.label().to_string())))
            .collect();
        Ok((rows, t.crossings))
    }

    fn __repr__(&self) -> String {
        format!("Scenario({:?})", self.0.name)
    }
}

#[pymodule]
fn impulsive_logistic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Params>()?;
    m.add_class::<Rate>()?;
    m.add_class::<Pulse>()?;
    m.add_class::<IndexReport>()?;
    m.add_class::<Scenario>()?;
    m.add_function(wrap_pyfunction!(compute_index, m)?)?;
    m.add("PRESETS", experiments::PRESET_NAMES.to_vec())?;
    Ok(())
}
