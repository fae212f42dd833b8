use thiserror::Error;

/// Errors raised by the model, index, engine and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("pulse evaluated at negative density {0}")]
    NegativeDensity(f64),

    #[error("quadrature did not reach tolerance {requested:e} (achieved {achieved:e})")]
    QuadratureNonConvergence { requested: f64, achieved: f64 },

    #[error("no positive periodic solution: e^(alpha T) g'(0) = {growth} <= 1")]
    NoPositivePeriodicSolution { growth: f64 },

    #[error("envelopes undefined: reproduction index {r0} <= 1")]
    EnvelopeUndefined { r0: f64 },

    #[error("invalid initial condition: negative value {value} at node {node}")]
    InvalidInitialCondition { node: usize, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("numerical instability at step {step} (t = {time})")]
    Instability { step: usize, time: f64 },

    #[error("upper-solution inequality violated (margin {margin:e})")]
    NotAnUpperSolution { margin: f64 },

    #[error("lower-solution inequality violated (residual {residual:e})")]
    NotALowerSolution { residual: f64 },

    #[error("shift constant K* = {k_star} does not make K* v + f(v, t) monotone up to v = {v_max}")]
    ShiftTooSmall { k_star: f64, v_max: f64 },

    #[error("lower solution spec invalid: {0}")]
    InvalidLowerSpec(String),

    #[error("monotone iteration order broken at iteration {iteration}: violation {violation:e}")]
    IterationOrderBroken { iteration: usize, violation: f64 },

    #[error("period map did not converge after {periods} periods (last residual {residual:e})")]
    NonConvergence { periods: usize, residual: f64 },

    #[error("reproduction index undefined (denominator {denominator} <= 0)")]
    IndexUndefined { denominator: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
