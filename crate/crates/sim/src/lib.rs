//! Sweeps, bound curves, figure presets and file output for the relay
//! channel models in `marc-core`.

pub mod config;
pub mod engine;
pub mod figures;
pub mod output;
pub mod stats;
pub mod validate;

pub use config::{ConfigError, SchemeName, SweepConfig, Urc};
pub use engine::{run_bound, run_sweep, BerPoint, BoundPoint, SimError};
