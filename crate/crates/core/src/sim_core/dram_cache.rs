//! Page-granular DRAM cache with frequency-based replacement.

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::memory_timing::DdrTimingParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DramCacheConfig {
    pub capacity_bytes: u64,
    pub ways: u32,
    pub page_bytes: u32,
    /// Frequency counters saturate here; the whole set is then halved.
    pub counter_max: u8,
    pub ddr: DdrTimingParams,
}

impl Default for DramCacheConfig {
    fn default() -> Self {
        Self {
            capacity_bytes: 4 << 30,
            ways: 4,
            page_bytes: 4096,
            counter_max: 31,
            ddr: DdrTimingParams::default(),
        }
    }
}

impl DramCacheConfig {
    pub fn sets(&self) -> u64 {
        self.capacity_bytes / (self.ways as u64 * self.page_bytes as u64)
    }

    pub fn validate(&self, line_bytes: u32) -> Result<(), SimError> {
        let set_bytes = self.ways as u64 * self.page_bytes as u64;
        if set_bytes == 0 || self.capacity_bytes == 0 || self.capacity_bytes % set_bytes != 0 {
            return Err(SimError::ConfigConflict(format!(
                "dram_cache: capacity {} B is not a multiple of ways x page ({set_bytes} B)",
                self.capacity_bytes
            )));
        }
        if self.page_bytes < line_bytes || self.page_bytes % line_bytes != 0 {
            return Err(SimError::ConfigConflict(format!(
                "dram_cache: page of {} B does not hold whole {line_bytes} B lines",
                self.page_bytes
            )));
        }
        if self.counter_max < 2 {
            return Err(SimError::ConfigConflict("dram_cache: counter_max must be at least 2".into()));
        }
        self.ddr.validate().map_err(|e| SimError::ConfigConflict(format!("dram_cache: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DramCacheOutcome {
    /// Resident; `frame` is the cache-local page slot.
    Hit { frame: u64 },
    /// Not resident. `installed` tells whether the page displaced a victim
    /// or took a free way; `dirty_victim` needs a remote writeback.
    Miss { installed: bool, dirty_victim: bool },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DramCacheStats {
    pub hits: u64,
    pub misses: u64,
    pub installs: u64,
    pub bypasses: u64,
    pub dirty_evictions: u64,
}

impl DramCacheStats {
    pub fn hit_rate(&self) -> f64 {
        let total = self.hits + self.misses;
        if total == 0 {
            0.0
        } else {
            self.hits as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Frame {
    page: u64,
    valid: bool,
    dirty: bool,
    count: u8,
}

/// Resident frames plus a shadow table of access counters for pages that
/// are not resident.
#[derive(Debug, Clone)]
pub struct DramCache {
    sets: u64,
    ways: usize,
    counter_max: u8,
    frames: Vec<Frame>,
    shadow: Vec<Vec<(u64, u8)>>,
    stats: DramCacheStats,
}

impl DramCache {
    pub fn new(cfg: &DramCacheConfig) -> Self {
        let sets = cfg.sets();
        Self {
            sets,
            ways: cfg.ways as usize,
            counter_max: cfg.counter_max,
            frames: vec![Frame::default(); sets as usize * cfg.ways as usize],
            shadow: vec![Vec::new(); sets as usize],
            stats: DramCacheStats::default(),
        }
    }

    pub fn stats(&self) -> DramCacheStats {
        self.stats
    }

    fn halve_set(&mut self, set: usize) {
        for f in &mut self.frames[set * self.ways..(set + 1) * self.ways] {
            f.count /= 2;
        }
        for entry in &mut self.shadow[set] {
            entry.1 /= 2;
        }
        self.shadow[set].retain(|e| e.1 > 0);
    }

    pub fn access(&mut self, page: u64, write: bool) -> DramCacheOutcome {
        let set = (page % self.sets) as usize;
        let base = set * self.ways;
        let max = self.counter_max;

        if let Some(i) = (0..self.ways).find(|&i| self.frames[base + i].valid && self.frames[base + i].page == page) {
            let f = &mut self.frames[base + i];
            f.dirty |= write;
            f.count += 1;
            let saturated = f.count >= max;
            if saturated {
                self.halve_set(set);
            }
            self.stats.hits += 1;
            return DramCacheOutcome::Hit { frame: (base + i) as u64 };
        }

        self.stats.misses += 1;
        let shadow = &mut self.shadow[set];
        let pos = match shadow.iter().position(|e| e.0 == page) {
            Some(p) => p,
            None => {
                shadow.push((page, 0));
                shadow.len() - 1
            }
        };
        shadow[pos].1 += 1;
        let incoming = shadow[pos].1;
        if incoming >= max {
            self.halve_set(set);
        }
        let incoming = self.shadow[set].iter().find(|e| e.0 == page).map_or(0, |e| e.1);

        let frames = &mut self.frames[base..base + self.ways];
        let slot = match frames.iter().position(|f| !f.valid) {
            Some(free) => free,
            None => {
                let victim = (0..self.ways).min_by_key(|&i| frames[i].count).unwrap_or(0);
                if incoming <= frames[victim].count {
                    self.stats.bypasses += 1;
                    return DramCacheOutcome::Miss { installed: false, dirty_victim: false };
                }
                victim
            }
        };
        let old = frames[slot];
        frames[slot] = Frame { page, valid: true, dirty: write, count: incoming.max(1) };
        let shadow = &mut self.shadow[set];
        shadow.retain(|e| e.0 != page);
        if old.valid && old.count > 0 {
            shadow.push((old.page, old.count));
        }
        self.stats.installs += 1;
        if old.valid && old.dirty {
            self.stats.dirty_evictions += 1;
        }
        DramCacheOutcome::Miss { installed: true, dirty_victim: old.valid && old.dirty }
    }

    /// Absorbs a line writeback if its page is resident.
    pub fn write_back(&mut self, page: u64) -> bool {
        let set = (page % self.sets) as usize;
        let base = set * self.ways;
        match self.frames[base..base + self.ways].iter_mut().find(|f| f.valid && f.page == page) {
            Some(f) => {
                f.dirty = true;
                true
            }
            None => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_way_two_sets() -> DramCache {
        DramCache::new(&DramCacheConfig { capacity_bytes: 2 * 4096, ways: 1, ..Default::default() })
    }

    #[test]
    fn repeated_page_misses_once() {
        let mut c = DramCache::new(&DramCacheConfig { capacity_bytes: 64 * 4096, ..Default::default() });
        assert!(matches!(c.access(9, false), DramCacheOutcome::Miss { installed: true, .. }));
        for _ in 0..100 {
            assert!(matches!(c.access(9, false), DramCacheOutcome::Hit { .. }));
        }
        assert_eq!(c.stats().misses, 1);
    }

    #[test]
    fn frequency_gate_on_single_way() {
        // pages 0 and 2 share set 0
        let mut c = one_way_two_sets();
        c.access(0, false); // A installed, count 1
        assert_eq!(c.access(2, false), DramCacheOutcome::Miss { installed: false, dirty_victim: false }); // B=1 vs A=1
        assert!(matches!(c.access(0, false), DramCacheOutcome::Hit { .. })); // A=2
        assert!(matches!(c.access(2, false), DramCacheOutcome::Miss { installed: false, .. })); // B=2 vs 2
        // strict alternation never displaces A
        for _ in 0..10 {
            assert!(matches!(c.access(0, false), DramCacheOutcome::Hit { .. }));
            assert!(matches!(c.access(2, false), DramCacheOutcome::Miss { installed: false, .. }));
        }
        // B pulls ahead: A=12, B=12 -> 13 > 12
        assert!(matches!(c.access(2, false), DramCacheOutcome::Miss { installed: true, .. }));
        assert!(matches!(c.access(2, false), DramCacheOutcome::Hit { .. }));
        assert!(matches!(c.access(0, false), DramCacheOutcome::Miss { installed: false, .. }));
    }

    #[test]
    fn dirty_victim_reported_and_shadow_keeps_count() {
        let mut c = one_way_two_sets();
        c.access(0, true);
        c.access(2, false);
        assert_eq!(c.access(2, false), DramCacheOutcome::Miss { installed: true, dirty_victim: true });
        // A left with count 1 in the shadow table; one more access ties it (2 vs 2)
        assert!(matches!(c.access(0, false), DramCacheOutcome::Miss { installed: false, .. }));
        assert_eq!(c.stats().dirty_evictions, 1);
    }

    #[test]
    fn counters_halve_at_saturation() {
        let mut c = DramCache::new(&DramCacheConfig { capacity_bytes: 2 * 4096, ways: 1, counter_max: 4, ..Default::default() });
        for _ in 0..4 {
            c.access(0, false); // 1,2,3,4 -> halves to 2
        }
        c.access(2, false); // B=1
        c.access(2, false); // B=2 vs A=2, bypass
        assert!(matches!(c.access(2, false), DramCacheOutcome::Miss { installed: true, .. }));
    }

    #[test]
    fn writeback_only_marks_resident_pages() {
        let mut c = one_way_two_sets();
        assert!(!c.write_back(0));
        c.access(0, false);
        assert!(c.write_back(0));
        c.access(2, false);
        assert_eq!(c.access(2, false), DramCacheOutcome::Miss { installed: true, dirty_victim: true });
    }

    #[test]
    fn config_validation() {
        assert!(DramCacheConfig::default().validate(128).is_ok());
        assert!(DramCacheConfig { page_bytes: 64, ..Default::default() }.validate(128).is_err());
        assert!(DramCacheConfig { capacity_bytes: 5000, ..Default::default() }.validate(128).is_err());
    }
}
