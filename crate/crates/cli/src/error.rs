use std::io;
use std::path::Path;

use ocmsim_core::photonic_link::LinkError;
use ocmsim_core::sim_core::SimError;
use ocmsim_core::workloads::WorkloadError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("trace error: {0}")]
    Trace(String),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
}

impl CliError {
    /// 2 for configuration problems, 3 for bad trace input, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Trace(_) => 3,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { context: path.display().to_string(), source }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::ConfigConflict(_) => CliError::Config(e.to_string()),
            SimError::Io(source) => CliError::Io { context: "reading trace".into(), source },
            SimError::MalformedTrace { .. } | SimError::InvalidRecord(_) | SimError::EmptyTrace => {
                CliError::Trace(e.to_string())
            }
        }
    }
}

impl From<WorkloadError> for CliError {
    fn from(e: WorkloadError) -> Self {
        SimError::from(e).into()
    }
}

impl From<LinkError> for CliError {
    fn from(e: LinkError) -> Self {
        CliError::Config(e.to_string())
    }
}
