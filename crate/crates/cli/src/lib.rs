//! Configuration, sweeps and reporting for the `ocmsim` command.

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod presets;
pub mod report;
pub mod sweep;

pub use config::{RunConfig, WorkloadSource};
pub use error::CliError;
pub use presets::PresetStore;
