//! Survival, phase and spectrum tables and validation runs for `dampedwig`,
//! as CSV text.

pub mod commands;
pub mod config;
pub mod validate;

pub use commands::{cmd_phase_mean, cmd_spectrum, cmd_survival};
pub use config::{Cli, Command, ConfigError, Options, RunConfig};
pub use validate::{cmd_validate, Check, Status, ValidationReport};
