use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CacheLevelConfig {
    pub capacity_bytes: u64,
    pub associativity: u32,
    pub line_bytes: u32,
    /// Lookup latency of this level alone; a hit here also paid every
    /// level above it.
    pub latency_cycles: u32,
}

impl Default for CacheLevelConfig {
    fn default() -> Self {
        Self::l1()
    }
}

impl CacheLevelConfig {
    pub fn l1() -> Self {
        Self { capacity_bytes: 32 << 10, associativity: 8, line_bytes: 128, latency_cycles: 4 }
    }

    pub fn l2() -> Self {
        Self { capacity_bytes: 256 << 10, associativity: 8, line_bytes: 128, latency_cycles: 12 }
    }

    pub fn l3() -> Self {
        Self { capacity_bytes: 8 << 20, associativity: 16, line_bytes: 128, latency_cycles: 40 }
    }

    pub fn sets(&self) -> u64 {
        self.capacity_bytes / (self.associativity as u64 * self.line_bytes as u64)
    }

    pub fn validate(&self, name: &str) -> Result<(), SimError> {
        let set_bytes = self.associativity as u64 * self.line_bytes as u64;
        if set_bytes == 0 || self.capacity_bytes == 0 || self.capacity_bytes % set_bytes != 0 {
            return Err(SimError::ConfigConflict(format!(
                "{name}: capacity {} B is not a multiple of associativity x line ({set_bytes} B)",
                self.capacity_bytes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Way {
    tag: u64,
    valid: bool,
    dirty: bool,
    last_use: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Eviction {
    pub line: u64,
    pub dirty: bool,
}

/// Set-associative LRU cache indexed by line number.
#[derive(Debug, Clone)]
pub struct Cache {
    sets: u64,
    ways: usize,
    slots: Vec<Way>,
    clock: u64,
}

impl Cache {
    pub fn new(cfg: &CacheLevelConfig) -> Self {
        let sets = cfg.sets();
        let ways = cfg.associativity as usize;
        Self { sets, ways, slots: vec![Way::default(); sets as usize * ways], clock: 0 }
    }

    fn set_of(&mut self, line: u64) -> &mut [Way] {
        let s = (line % self.sets) as usize;
        &mut self.slots[s * self.ways..(s + 1) * self.ways]
    }

    /// Looks `line` up, refreshing its recency on a hit.
    pub fn access(&mut self, line: u64, write: bool) -> bool {
        self.clock += 1;
        let now = self.clock;
        let tag = line / self.sets;
        match self.set_of(line).iter_mut().find(|w| w.valid && w.tag == tag) {
            Some(w) => {
                w.last_use = now;
                w.dirty |= write;
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, line: u64) -> bool {
        let s = (line % self.sets) as usize;
        let tag = line / self.sets;
        self.slots[s * self.ways..(s + 1) * self.ways].iter().any(|w| w.valid && w.tag == tag)
    }

    /// Installs `line` as most recently used and returns the LRU victim if the
    /// set was full. Installing a resident line only updates it.
    pub fn fill(&mut self, line: u64, dirty: bool) -> Option<Eviction> {
        self.clock += 1;
        let now = self.clock;
        let sets = self.sets;
        let tag = line / sets;
        let set_index = line % sets;
        let set = self.set_of(line);
        if let Some(w) = set.iter_mut().find(|w| w.valid && w.tag == tag) {
            w.last_use = now;
            w.dirty |= dirty;
            return None;
        }
        let slot = match set.iter().position(|w| !w.valid) {
            Some(i) => i,
            None => (0..set.len()).min_by_key(|&i| set[i].last_use).unwrap_or(0),
        };
        let old = set[slot];
        set[slot] = Way { tag, valid: true, dirty, last_use: now };
        old.valid.then_some(Eviction { line: old.tag * sets + set_index, dirty: old.dirty })
    }
}
