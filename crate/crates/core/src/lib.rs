//! Diffusive logistic population with periodic impulsive harvesting on a
//! periodically evolving one-dimensional habitat.
//!
//! The evolving domain `(0, ρ(t) l0)` is mapped to the fixed interval
//! `(0, l0)`, where the density `v(t, y)` solves
//!
//! ```text
//! v_t = d/ρ² v_yy + (α − ρ̇/ρ) v − γ v²,   v(t, 0) = v(t, l0) = 0,
//! v(nT⁺, y) = g(v(nT, y)).
//! ```
//!
//! [`index`] computes the reproduction index, [`engine`] integrates the
//! problem, [`periodic`] constructs periodic solutions and brackets, and
//! [`experiments`] handles presets, configuration, artifacts and sweeps.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod index;
pub mod model;
pub mod ode;
pub mod periodic;
pub mod quadrature;

pub use error::{Error, Result};
pub use index::{compute_index, IndexReport};
pub use model::{build_envelopes, EnvelopePair, EvolutionRate, ModelParams, PulseFunction, PulseMap};
