use serde::{Deserialize, Serialize};

use super::dram_cache::DramCacheStats;
use crate::memory_timing::RowStats;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStats {
    pub hits: u64,
    pub misses: u64,
}

impl LevelStats {
    pub fn accesses(&self) -> u64 {
        self.hits + self.misses
    }

    pub fn miss_rate(&self) -> f64 {
        match self.accesses() {
            0 => 0.0,
            n => self.misses as f64 / n as f64,
        }
    }

    fn merge(&mut self, o: &Self) {
        self.hits += o.hits;
        self.misses += o.misses;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub instructions: u64,
    pub reads: u64,
    pub writes: u64,
    pub total_cycles: f64,
    pub core_ghz: f64,
    pub l1: LevelStats,
    pub l2: LevelStats,
    pub l3: LevelStats,
    /// Demand line fetches that left the cache hierarchy.
    pub memory_fetches: u64,
    /// Dirty L3 victims written back past the hierarchy.
    pub memory_writebacks: u64,
    pub dram_rows: RowStats,
    pub dram_cache: Option<DramCacheStats>,
    /// Sum over all accesses of the latency the access itself took, cycles.
    pub access_latency_cycles: f64,
}

impl SimStats {
    pub fn accesses(&self) -> u64 {
        self.reads + self.writes
    }

    /// Average memory access time, ns.
    pub fn amat_ns(&self) -> f64 {
        match self.accesses() {
            0 => 0.0,
            n => self.access_latency_cycles / n as f64 / self.core_ghz,
        }
    }

    pub fn total_ns(&self) -> f64 {
        self.total_cycles / self.core_ghz
    }

    pub fn ipc(&self) -> f64 {
        if self.total_cycles > 0.0 {
            self.instructions as f64 / self.total_cycles
        } else {
            0.0
        }
    }

    pub fn dram_cache_hit_rate(&self) -> Option<f64> {
        self.dram_cache.map(|d| d.hit_rate())
    }

    /// Combines independent lanes that ran side by side: counters add up and
    /// the run lasts as long as its slowest lane.
    pub fn merge(&mut self, o: &SimStats) {
        self.instructions += o.instructions;
        self.reads += o.reads;
        self.writes += o.writes;
        self.total_cycles = self.total_cycles.max(o.total_cycles);
        self.l1.merge(&o.l1);
        self.l2.merge(&o.l2);
        self.l3.merge(&o.l3);
        self.memory_fetches += o.memory_fetches;
        self.memory_writebacks += o.memory_writebacks;
        self.dram_rows.hits += o.dram_rows.hits;
        self.dram_rows.empty += o.dram_rows.empty;
        self.dram_rows.conflicts += o.dram_rows.conflicts;
        self.dram_cache = match (self.dram_cache, o.dram_cache) {
            (Some(a), Some(b)) => Some(DramCacheStats {
                hits: a.hits + b.hits,
                misses: a.misses + b.misses,
                installs: a.installs + b.installs,
                bypasses: a.bypasses + b.bypasses,
                dirty_evictions: a.dirty_evictions + b.dirty_evictions,
            }),
            (a, b) => a.or(b),
        };
        self.access_latency_cycles += o.access_latency_cycles;
    }
}

/// Run time of `a` relative to `b`.
pub fn slowdown(a: &SimStats, b: &SimStats) -> f64 {
    a.total_cycles / b.total_cycles
}
