//! Scenario presets, configuration, artifact emission, runs and sweeps.

mod analysis;
pub mod artifacts;
mod config;
mod run;
mod scenario;

use thiserror::Error;

pub use analysis::{
    classify, estimate_decay_rate, Classification, DecayEstimate, EXTINCTION_THRESHOLD, PERSISTENCE_FLOOR,
};
pub use config::{parse_config, ConfigError};
pub use run::{
    orbit_table, run_periodic, run_scenario, sweep, worker_count, OrbitSummary, PeriodicRecord, RunRecord, SweepRow,
    SweepTable, WORKERS_ENV,
};
pub use scenario::{all_presets, canonical_preset, preset, Expectation, Scenario, PRESET_NAMES, SWEEP_PATHS};

pub use crate::engine::reconstruct_physical;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("worker pool: {0}")]
    Pool(String),
}
