//! Synthetic trace generation and trace-file ingestion.
//!
//! Every record is one memory instruction, preceded by `instruction_delta`
//! non-memory instructions. Text form, one record per line:
//!
//! ```text
//! # delta kind address size
//! 12 R 0x7f001040 64
//! 0 W 0x7f001080 8
//! ```

mod generate;
mod trace;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{generate, Generator, ReuseBin, SyntheticWorkloadSpec, WorkloadKind};
pub use trace::{format_record, open_trace, parse_line, write_trace, TraceReader};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccessKind {
    Read,
    Write,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceRecord {
    pub instruction_delta: u64,
    pub kind: AccessKind,
    pub address: u64,
    pub size_bytes: u32,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_record(self))
    }
}

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("malformed trace at line {line}: unexpected {token:?}")]
    MalformedTrace { line: u64, token: String },
    #[error("invalid workload spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
