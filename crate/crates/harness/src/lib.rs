//! Experiment runner for `unipers`: TOML configs, seeded runs with
//! reproducible output directories, and parameter sweeps.

pub mod config;
pub mod error;
pub mod run;
pub mod sweep;

pub use config::{Analysis, ExperimentConfig};
pub use error::{HarnessError, HarnessResult};
pub use run::{run_experiment, RunSummary};
pub use sweep::{run_sweep, SweepCell, SweepSummary};
