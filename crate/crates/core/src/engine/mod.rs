//! Finite-difference engine for the fixed-domain impulsive problem.
//!
//! Diffusion is Crank–Nicolson with coefficient `d/ρ²` taken at both step
//! endpoints; reaction is an explicit two-stage midpoint evaluation. Each
//! period is `S` steps followed by a pointwise pulse.

mod grid;
mod orbit;
mod simulate;
mod state;
mod stepper;
mod tridiag;

pub use grid::{Grid, DEFAULT_NY, DEFAULT_STEPS_PER_PERIOD};
pub use orbit::{advance_period, PeriodOrbit};
pub use simulate::{apply_impulse, reconstruct_physical, simulate, step_interval, OutputSpec, PhysicalSnapshot, Trajectory};
pub use state::{initial_condition, Phase, SineModes, StateField};
pub use stepper::{Logistic, Reaction, Stage, Stepper};
pub use tridiag::solve_tridiagonal;
