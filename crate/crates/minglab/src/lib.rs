//! Batch experiment harness for the cyclic-shift amplifier model.
//!
//! Each command reads an [`ExperimentConfig`], computes a [`Table`] and
//! writes it as CSV or JSON. Identical configuration and seed give
//! byte-identical output.

pub mod commands;
pub mod config;
pub mod table;
pub mod validate;

pub use commands::{run, Outcome, RunError};
pub use config::{Command, ConfigError, ConfigFile, ExperimentConfig, Format};
pub use table::{write_atomic, Cell, Table, VERSION};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION_FAILURE: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
}
