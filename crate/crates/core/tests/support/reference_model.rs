//! Straightforward reference for a read-only trace on a blocking core:
//! per-set MRU lists and an open-row table, no timing engine.

use ocmsim_core::sim_core::{HitProfile, SimConfig};
use ocmsim_core::workloads::TraceRecord;

struct Level {
    sets: Vec<Vec<u64>>,
    ways: usize,
}

impl Level {
    fn new(capacity: u64, ways: u32, line: u32) -> Self {
        let n = capacity / (ways as u64 * line as u64);
        Self { sets: vec![Vec::new(); n as usize], ways: ways as usize }
    }

    fn set(&mut self, line: u64) -> &mut Vec<u64> {
        let n = self.sets.len() as u64;
        &mut self.sets[(line % n) as usize]
    }

    /// Hit test; a hit becomes most recent.
    fn touch(&mut self, line: u64) -> bool {
        let set = self.set(line);
        match set.iter().position(|&l| l == line) {
            Some(i) => {
                set.remove(i);
                set.push(line);
                true
            }
            None => false,
        }
    }

    fn insert(&mut self, line: u64) {
        let ways = self.ways;
        let set = self.set(line);
        if set.len() == ways {
            set.remove(0);
        }
        set.push(line);
    }
}

/// Hit profile and mean DRAM service time of `trace` under `cfg`.
pub fn reference_profile(trace: &[TraceRecord], cfg: &SimConfig) -> HitProfile {
    let h = &cfg.hierarchy;
    let line_bytes = h.l1.line_bytes as u64;
    let mut l1 = Level::new(h.l1.capacity_bytes, h.l1.associativity, h.l1.line_bytes);
    let mut l2 = Level::new(h.l2.capacity_bytes, h.l2.associativity, h.l2.line_bytes);
    let mut l3 = Level::new(h.l3.capacity_bytes, h.l3.associativity, h.l3.line_bytes);

    let tck = 2000.0 / cfg.ddr.data_rate_mtps as f64;
    let slice = line_bytes / cfg.lockstep.dimms_per_channel as u64;
    let beats = (slice as f64 / (cfg.ddr.bus_width_bits as f64 / 8.0)).ceil().max(2.0);
    let t_bl = beats * tck / 2.0;
    let cas = cfg.ddr.t_cas as f64 * tck;
    let rcd = cfg.ddr.t_rcd as f64 * tck;
    let rp = cfg.ddr.t_rp as f64 * tck;
    let g = &cfg.memory;
    let mut open_rows = std::collections::HashMap::new();

    let mut counts = [0u64; 4];
    let mut t_mem_sum = 0.0;
    for r in trace {
        let line = r.address / line_bytes;
        let where_served = if l1.touch(line) {
            0
        } else if l2.touch(line) {
            l1.insert(line);
            1
        } else if l3.touch(line) {
            l2.insert(line);
            l1.insert(line);
            2
        } else {
            l3.insert(line);
            l2.insert(line);
            l1.insert(line);
            let channel = line % g.channels as u64;
            let in_channel = line / g.channels as u64;
            let row_seq = in_channel / (g.row_bytes as u64 / line_bytes);
            let bank = (channel, row_seq % g.banks_per_channel as u64);
            let row = row_seq / g.banks_per_channel as u64;
            t_mem_sum += match open_rows.insert(bank, row) {
                Some(open) if open == row => cas + t_bl,
                Some(_) => rp + rcd + cas + t_bl,
                None => rcd + cas + t_bl,
            };
            3
        };
        counts[where_served] += 1;
    }
    let n = trace.len() as f64;
    HitProfile {
        l1_hit: counts[0] as f64 / n,
        l2_hit: counts[1] as f64 / n,
        l3_hit: counts[2] as f64 / n,
        memory: counts[3] as f64 / n,
        t_mem_ns: if counts[3] > 0 { t_mem_sum / counts[3] as f64 } else { 0.0 },
    }
}
