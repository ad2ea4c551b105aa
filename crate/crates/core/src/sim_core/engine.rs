use rayon::prelude::*;

use super::cache::Cache;
use super::dram_cache::{DramCache, DramCacheOutcome};
use super::stats::SimStats;
use super::{SimConfig, SimError};
use crate::memory_timing::{DramGeometry, DramSystem, LockstepGroup};
use crate::workloads::{generate, AccessKind, SyntheticWorkloadSpec, TraceRecord, WorkloadError};

/// Single-threaded in-order core driving the cache and memory models.
pub struct Engine {
    cfg: SimConfig,
    l1: Cache,
    l2: Cache,
    l3: Cache,
    memory: DramSystem,
    dram_cache: Option<(DramCache, DramSystem)>,
    line_bytes: u64,
    page_bytes: u64,
    now: f64,
    in_flight: Vec<f64>,
    stats: SimStats,
}

enum Level {
    L1,
    L2,
    L3,
    Memory,
}

impl Engine {
    pub fn new(cfg: &SimConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        let h = &cfg.hierarchy;
        let memory = DramSystem::new(cfg.memory, &cfg.ddr, &cfg.lockstep).map_err(conflict)?;
        let dram_cache = match &cfg.dram_cache {
            Some(dc) => {
                let group = LockstepGroup { dimms_per_channel: 1, cache_line_bytes: h.l1.line_bytes };
                let local = DramSystem::new(DramGeometry::default(), &dc.ddr, &group).map_err(conflict)?;
                Some((DramCache::new(dc), local))
            }
            None => None,
        };
        Ok(Self {
            l1: Cache::new(&h.l1),
            l2: Cache::new(&h.l2),
            l3: Cache::new(&h.l3),
            memory,
            line_bytes: h.l1.line_bytes as u64,
            page_bytes: cfg.dram_cache.map_or(0, |d| d.page_bytes as u64),
            dram_cache,
            now: 0.0,
            in_flight: Vec::new(),
            stats: SimStats {
                instructions: 0,
                reads: 0,
                writes: 0,
                total_cycles: 0.0,
                core_ghz: h.core_ghz,
                l1: Default::default(),
                l2: Default::default(),
                l3: Default::default(),
                memory_fetches: 0,
                memory_writebacks: 0,
                dram_rows: Default::default(),
                dram_cache: cfg.dram_cache.map(|_| Default::default()),
                access_latency_cycles: 0.0,
            },
            cfg: cfg.clone(),
        })
    }

    /// Retires `n` non-memory instructions.
    pub fn advance(&mut self, n: u64) {
        self.now += n as f64;
        self.stats.instructions += n;
    }

    pub fn step(&mut self, r: &TraceRecord) -> Result<(), SimError> {
        if r.size_bytes == 0 || r.size_bytes as u64 > self.line_bytes {
            return Err(SimError::InvalidRecord(format!(
                "access of {} B at 0x{:x} does not fit a {} B line",
                r.size_bytes, r.address, self.line_bytes
            )));
        }
        self.advance(r.instruction_delta);
        self.stats.instructions += 1;
        let aligned = r.address & !(r.size_bytes.next_power_of_two() as u64 - 1);
        let line = aligned / self.line_bytes;
        let write = r.kind == AccessKind::Write;
        if write {
            self.stats.writes += 1;
        } else {
            self.stats.reads += 1;
        }

        let h = self.cfg.hierarchy;
        let (c1, c2, c3) = (
            h.l1.latency_cycles as f64,
            h.l2.latency_cycles as f64,
            h.l3.latency_cycles as f64,
        );
        let level = if self.l1.access(line, write) {
            self.stats.l1.hits += 1;
            Level::L1
        } else {
            self.stats.l1.misses += 1;
            if self.l2.access(line, false) {
                self.stats.l2.hits += 1;
                Level::L2
            } else {
                self.stats.l2.misses += 1;
                if self.l3.access(line, false) {
                    self.stats.l3.hits += 1;
                    Level::L3
                } else {
                    self.stats.l3.misses += 1;
                    Level::Memory
                }
            }
        };

        let latency = match level {
            Level::L1 => c1,
            Level::L2 => c1 + c2,
            Level::L3 => c1 + c2 + c3,
            Level::Memory => {
                let lookup = c1 + c2 + c3;
                if write {
                    // posted: the core only waits for the lookup
                    self.posted_write_miss(line);
                    lookup
                } else {
                    let issue = self.now + lookup;
                    let fetch = self.fetch(line, issue);
                    self.now = issue;
                    self.wait_for_window(issue + fetch);
                    self.stats.access_latency_cycles += lookup + fetch;
                    self.fill_from(&level, line, write);
                    return Ok(());
                }
            }
        };
        self.now += latency;
        self.stats.access_latency_cycles += latency;
        self.fill_from(&level, line, write);
        Ok(())
    }

    fn wait_for_window(&mut self, completion: f64) {
        let now = self.now;
        self.in_flight.retain(|&c| c > now);
        self.in_flight.push(completion);
        if self.in_flight.len() >= self.cfg.hierarchy.miss_window as usize {
            let (i, &earliest) = self
                .in_flight
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("window holds the request just issued");
            self.in_flight.swap_remove(i);
            self.now = self.now.max(earliest);
        }
    }

    /// Cycles from issuing a line read past L3 until its data returns.
    fn fetch(&mut self, line: u64, issue: f64) -> f64 {
        self.stats.memory_fetches += 1;
        let ghz = self.cfg.hierarchy.core_ghz;
        let addr = line * self.line_bytes;
        if let Some((dc, local)) = &mut self.dram_cache {
            let page = addr / self.page_bytes;
            match dc.access(page, false) {
                DramCacheOutcome::Hit { frame } => {
                    let local_addr = frame * self.page_bytes + addr % self.page_bytes;
                    return local.access(local_addr, issue / ghz).latency_ns * ghz;
                }
                DramCacheOutcome::Miss { dirty_victim, .. } => {
                    let t_mem = self.memory.access(addr, issue / ghz).latency_ns;
                    let trip = self.cfg.interconnect.round_trip(t_mem, ghz).total_cycles;
                    if dirty_victim {
                        self.stats.memory_writebacks += 1;
                        return 2.0 * trip;
                    }
                    return trip;
                }
            }
        }
        let t_mem = self.memory.access(addr, issue / ghz).latency_ns;
        self.cfg.interconnect.round_trip(t_mem, ghz).total_cycles
    }

    fn posted_write_miss(&mut self, line: u64) {
        self.stats.memory_fetches += 1;
        if let Some((dc, _)) = &mut self.dram_cache {
            let page = line * self.line_bytes / self.page_bytes;
            if let DramCacheOutcome::Miss { dirty_victim: true, .. } = dc.access(page, true) {
                self.stats.memory_writebacks += 1;
            }
        }
    }

    fn fill_from(&mut self, level: &Level, line: u64, write: bool) {
        if matches!(level, Level::Memory) {
            if let Some(v) = self.l3.fill(line, false) {
                self.evict_from_l3(v.line, v.dirty);
            }
        }
        if matches!(level, Level::Memory | Level::L3) {
            if let Some(v) = self.l2.fill(line, false) {
                self.evict_from_l2(v.line, v.dirty);
            }
        }
        if !matches!(level, Level::L1) {
            if let Some(v) = self.l1.fill(line, write) {
                if v.dirty {
                    if let Some(v2) = self.l2.fill(v.line, true) {
                        self.evict_from_l2(v2.line, v2.dirty);
                    }
                }
            }
        }
    }

    fn evict_from_l2(&mut self, line: u64, dirty: bool) {
        if dirty {
            if let Some(v) = self.l3.fill(line, true) {
                self.evict_from_l3(v.line, v.dirty);
            }
        }
    }

    fn evict_from_l3(&mut self, line: u64, dirty: bool) {
        if !dirty {
            return;
        }
        if let Some((dc, _)) = &mut self.dram_cache {
            if dc.write_back(line * self.line_bytes / self.page_bytes) {
                return;
            }
        }
        self.stats.memory_writebacks += 1;
    }

    pub fn finish(mut self) -> SimStats {
        let last = self.in_flight.iter().copied().fold(self.now, f64::max);
        self.stats.total_cycles = last;
        self.stats.dram_rows = self.memory.stats();
        if let Some((dc, _)) = &self.dram_cache {
            self.stats.dram_cache = Some(dc.stats());
        }
        self.stats
    }
}

fn conflict(e: impl std::fmt::Display) -> SimError {
    SimError::ConfigConflict(e.to_string())
}

/// Runs one trace to completion.
pub fn run_simulation<I>(trace: I, cfg: &SimConfig) -> Result<SimStats, SimError>
where
    I: IntoIterator<Item = Result<TraceRecord, WorkloadError>>,
{
    let mut engine = Engine::new(cfg)?;
    let mut any = false;
    for r in trace {
        engine.step(&r?)?;
        any = true;
    }
    if !any {
        return Err(SimError::EmptyTrace);
    }
    Ok(engine.finish())
}

/// [`run_simulation`] over records that cannot fail to parse.
pub fn run_records<I>(trace: I, cfg: &SimConfig) -> Result<SimStats, SimError>
where
    I: IntoIterator<Item = TraceRecord>,
{
    run_simulation(trace.into_iter().map(Ok), cfg)
}

/// Runs one engine per workload in parallel, as independent cores with
/// private memory paths, and merges the results in lane order.
pub fn run_lanes(lanes: &[SyntheticWorkloadSpec], cfg: &SimConfig) -> Result<SimStats, SimError> {
    let results: Vec<Result<SimStats, SimError>> = lanes
        .par_iter()
        .map(|spec| run_records(generate(spec)?, cfg))
        .collect();
    let mut merged: Option<SimStats> = None;
    for r in results {
        let s = r?;
        match &mut merged {
            Some(m) => m.merge(&s),
            None => merged = Some(s),
        }
    }
    merged.ok_or(SimError::EmptyTrace)
}
