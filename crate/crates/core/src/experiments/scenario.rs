use std::fmt;

use crate::engine::{initial_condition, Grid, SineModes, StateField, DEFAULT_NY, DEFAULT_STEPS_PER_PERIOD};
use crate::error::{Error, Result};
use crate::model::{EvolutionRate, ModelParams, PulseFunction, RateKind};

pub const DEFAULT_PERIODS: usize = 100;
pub const DEFAULT_SNAPSHOTS: usize = 8;

/// Canonical preset names.
pub const PRESET_NAMES: [&str; 8] = ["4.1a", "4.1b", "4.2a", "4.2b", "4.3a", "4.3b", "4.3c", "4.4"];

/// Parameters a sweep may vary.
pub const SWEEP_PATHS: [&str; 7] = ["rho.amplitude", "pulse.m", "pulse.a", "pulse.r", "pulse.b", "model.d", "model.T"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Extinction,
    Persistence,
    Unspecified,
}

impl Expectation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Expectation::Extinction => "extinction",
            Expectation::Persistence => "persistence",
            Expectation::Unspecified => "unspecified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "extinction" => Some(Expectation::Extinction),
            "persistence" => Some(Expectation::Persistence),
            "unspecified" => Some(Expectation::Unspecified),
            _ => None,
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully specified run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub rho: EvolutionRate,
    pub pulse: PulseFunction,
    pub grid: Grid,
    pub initial: SineModes,
    pub n_periods: usize,
    pub snapshots_per_period: usize,
    pub expected: Expectation,
}

impl Scenario {
    pub fn initial_state(&self) -> Result<StateField> {
        initial_condition(&self.initial, &self.grid)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.rho.validate()?;
        self.pulse.validate()?;
        if (self.rho.period - self.params.period).abs() > 0.0 || (self.grid.period - self.params.period).abs() > 0.0 {
            return Err(Error::InvalidParameter { name: "period", reason: "model, rate and grid periods differ".into() });
        }
        if self.n_periods == 0 {
            return Err(Error::InvalidParameter { name: "n_periods", reason: "must be >= 1".into() });
        }
        Grid::new(&self.params, self.grid.ny, self.grid.steps_per_period)?;
        self.initial_state().map(|_| ())
    }

    /// Copy with one sweepable parameter replaced.
    pub fn with_param(&self, path: &str, value: f64) -> Result<Scenario> {
        let mut s = self.clone();
        match path {
            "rho.amplitude" => s.rho = EvolutionRate::exp_cosine(value, s.params.period),
            "pulse.a" | "pulse.m" => {
                let (mut a, mut m) = match s.pulse {
                    PulseFunction::BevertonHolt { a, m } => (a, m),
                    _ => return Err(Error::InvalidParameter { name: "pulse", reason: format!("{path} needs a beverton-holt pulse") }),
                };
                if path == "pulse.a" { a = value } else { m = value }
                s.pulse = PulseFunction::beverton_holt(a, m)?;
            }
            "pulse.r" | "pulse.b" => {
                let (mut r, mut b) = match s.pulse {
                    PulseFunction::Ricker { r, b } => (r, b),
                    _ => return Err(Error::InvalidParameter { name: "pulse", reason: format!("{path} needs a ricker pulse") }),
                };
                if path == "pulse.r" { r = value } else { b = value }
                s.pulse = PulseFunction::ricker(r, b)?;
            }
            "model.d" => s.params.d = value,
            "model.T" => {
                s.params.period = value;
                s.rho.period = value;
                s.grid = Grid::new(&s.params, s.grid.ny, s.grid.steps_per_period)?;
            }
            _ => {
                return Err(Error::InvalidParameter {
                    name: "param",
                    reason: format!("unknown path `{path}`; valid paths: {}", SWEEP_PATHS.join(", ")),
                })
            }
        }
        s.params.validate()?;
        s.rho.validate()?;
        Ok(s)
    }
}

/// Maps aliases such as `example-4.1-rho2` or `4.3-rho2-harvest` to a canonical name.
pub fn canonical_preset(name: &str) -> Option<&'static str> {
    let n = name.trim().to_ascii_lowercase();
    let n = n.strip_prefix("example-").unwrap_or(&n);
    let canonical = match n {
        "4.1a" | "4.1-rho1" => "4.1a",
        "4.1b" | "4.1-rho2" => "4.1b",
        "4.2a" | "4.2-rho1" => "4.2a",
        "4.2b" | "4.2-rho2" => "4.2b",
        "4.3a" | "4.3-rho1" | "4.3-rho1-noimpulse" => "4.3a",
        "4.3b" | "4.3-rho2" | "4.3-rho2-noimpulse" => "4.3b",
        "4.3c" | "4.3-rho2-harvest" => "4.3c",
        "4.4" | "4.4-rho2" => "4.4",
        _ => return None,
    };
    Some(canonical)
}

/// Reference parameters `d = 1, α = 1.1, γ = 0.05, l0 = π, T = 2` with
/// initial data `0.5 sin y + 0.2 sin 3y`.
pub fn preset(name: &str) -> Option<Scenario> {
    let canonical = canonical_preset(name)?;
    let params = ModelParams::reference();
    let rho1 = EvolutionRate::exp_cosine(-0.1, params.period);
    let rho2 = EvolutionRate::exp_cosine(0.1, params.period);
    let bh = PulseFunction::BevertonHolt { a: 10.0, m: 8.0 };
    let ricker = PulseFunction::Ricker { r: 0.05, b: 1.2 };
    use Expectation::*;
    let (rho, pulse, expected) = match canonical {
        "4.1a" => (rho1, bh, Extinction),
        "4.1b" => (rho2, bh, Persistence),
        "4.2a" => (rho1, ricker, Extinction),
        "4.2b" => (rho2, ricker, Persistence),
        "4.3a" => (rho1, PulseFunction::Identity, Extinction),
        "4.3b" => (rho2, PulseFunction::Identity, Persistence),
        "4.3c" => (rho2, PulseFunction::BevertonHolt { a: 10.0, m: 5.0 }, Extinction),
        _ => (rho2, PulseFunction::Ricker { r: 0.05, b: 5.0 }, Persistence),
    };
    let grid = Grid::new(&params, DEFAULT_NY, DEFAULT_STEPS_PER_PERIOD).expect("default grid is valid");
    Some(Scenario {
        name: canonical.to_string(),
        params,
        rho,
        pulse,
        grid,
        initial: SineModes::reference(),
        n_periods: DEFAULT_PERIODS,
        snapshots_per_period: DEFAULT_SNAPSHOTS,
        expected,
    })
}

pub fn all_presets() -> Vec<Scenario> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("known preset")).collect()
}

pub(crate) fn rate_kind_name(rho: &EvolutionRate) -> &'static str {
    match rho.kind {
        RateKind::Constant => "constant",
        RateKind::ExpCosine { .. } => "exp-cosine",
    }
}
