//! Deterministic trace-driven simulation of a core, its caches and the path
//! to main memory.
//!
//! The core is in order. Non-memory instructions take one cycle. Cache hits
//! block for the summed lookup latency of every level down to the one that
//! hit. Reads that leave the hierarchy overlap up to `miss_window` deep;
//! writes are posted.

mod cache;
mod dram_cache;
mod engine;
mod oracle;
mod stats;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{Cache, CacheLevelConfig, Eviction};
pub use dram_cache::{DramCache, DramCacheConfig, DramCacheOutcome, DramCacheStats};
pub use engine::{run_lanes, run_records, run_simulation, Engine};
pub use oracle::{amat_oracle, HitProfile};
pub use stats::{slowdown, LevelStats, SimStats};

use crate::memory_timing::{DdrTimingParams, DramGeometry, InterconnectModel, LockstepGroup};
use crate::workloads::WorkloadError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("malformed trace at line {line}: unexpected {token:?}")]
    MalformedTrace { line: u64, token: String },
    #[error("configuration conflict: {0}")]
    ConfigConflict(String),
    #[error("invalid trace record: {0}")]
    InvalidRecord(String),
    #[error("trace contains no memory records")]
    EmptyTrace,
    #[error(transparent)]
    Io(std::io::Error),
}

impl From<WorkloadError> for SimError {
    fn from(e: WorkloadError) -> Self {
        match e {
            WorkloadError::MalformedTrace { line, token } => SimError::MalformedTrace { line, token },
            WorkloadError::InvalidSpec(m) => SimError::ConfigConflict(m),
            WorkloadError::Io(e) => SimError::Io(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HierarchyConfig {
    pub l1: CacheLevelConfig,
    pub l2: CacheLevelConfig,
    pub l3: CacheLevelConfig,
    pub core_ghz: f64,
    /// Outstanding reads past L3 before the core stalls; 1 is fully blocking.
    pub miss_window: u32,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        Self {
            l1: CacheLevelConfig::l1(),
            l2: CacheLevelConfig::l2(),
            l3: CacheLevelConfig::l3(),
            core_ghz: 3.0,
            miss_window: 4,
        }
    }
}

impl HierarchyConfig {
    pub fn line_bytes(&self) -> u32 {
        self.l1.line_bytes
    }
}

/// Everything one simulation needs besides the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub hierarchy: HierarchyConfig,
    pub interconnect: InterconnectModel,
    pub ddr: DdrTimingParams,
    pub lockstep: LockstepGroup,
    pub memory: DramGeometry,
    pub dram_cache: Option<DramCacheConfig>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            hierarchy: HierarchyConfig::default(),
            interconnect: InterconnectModel::Local,
            ddr: DdrTimingParams::default(),
            lockstep: LockstepGroup::default(),
            memory: DramGeometry::default(),
            dram_cache: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let h = &self.hierarchy;
        let conflict = |m: String| Err(SimError::ConfigConflict(m));
        for (name, level) in [("l1", &h.l1), ("l2", &h.l2), ("l3", &h.l3)] {
            level.validate(name)?;
        }
        let line = h.l1.line_bytes;
        if h.l2.line_bytes != line || h.l3.line_bytes != line {
            return conflict("all cache levels must share one line size".into());
        }
        if self.lockstep.cache_line_bytes != line {
            return conflict(format!(
                "lockstep group moves {} B lines but the caches use {} B",
                self.lockstep.cache_line_bytes, line
            ));
        }
        if !(h.l1.latency_cycles < h.l2.latency_cycles && h.l2.latency_cycles < h.l3.latency_cycles) {
            return conflict("cache latencies must increase from l1 to l3".into());
        }
        if !(h.core_ghz > 0.0 && h.core_ghz.is_finite()) {
            return conflict(format!("core_ghz must be positive, got {}", h.core_ghz));
        }
        if h.miss_window == 0 {
            return conflict("miss_window must be at least 1".into());
        }
        self.interconnect.validate().map_err(|e| SimError::ConfigConflict(e.to_string()))?;
        if let Some(ghz) = self.interconnect.core_ghz() {
            if ghz != h.core_ghz {
                return conflict(format!(
                    "interconnect counts cycles at {ghz} GHz but the core runs at {} GHz",
                    h.core_ghz
                ));
            }
        }
        self.ddr.validate().map_err(|e| SimError::ConfigConflict(e.to_string()))?;
        self.lockstep.validate().map_err(|e| SimError::ConfigConflict(e.to_string()))?;
        self.memory.validate(line).map_err(|e| SimError::ConfigConflict(e.to_string()))?;
        if let Some(dc) = &self.dram_cache {
            dc.validate(line)?;
        }
        Ok(())
    }
}
