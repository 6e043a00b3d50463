//! Command-level operations: config loading, CSV/JSON reports and the
//! built-in validation suite.

mod commands;
pub mod config;
pub mod output;
pub mod validate;

pub use commands::{
    approximations, cmd_amplitudes, cmd_purity, cmd_reflectmap, cmd_sweep, Approximations, Parameters, PurityOutput,
    SweepOutput, SweepRow,
};
pub use config::{Config, LoadedConfig, Point};
pub use validate::{cmd_validate, render_checks, Check};
