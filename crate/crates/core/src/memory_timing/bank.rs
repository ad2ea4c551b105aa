//! Open-page bank model with per-bank FIFO service.

use serde::{Deserialize, Serialize};

use super::ddr::{bus_latency_tbl, DdrTimingParams, LockstepGroup};
use super::TimingError;

/// Channel/bank/row layout of a DRAM system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DramGeometry {
    pub channels: u32,
    pub banks_per_channel: u32,
    pub row_bytes: u32,
}

impl Default for DramGeometry {
    fn default() -> Self {
        Self { channels: 4, banks_per_channel: 16, row_bytes: 8192 }
    }
}

impl DramGeometry {
    pub fn validate(&self, line_bytes: u32) -> Result<(), TimingError> {
        if self.channels == 0 || self.banks_per_channel == 0 {
            return Err(TimingError::Invalid("channels and banks_per_channel must be positive".into()));
        }
        if self.row_bytes < line_bytes || self.row_bytes % line_bytes != 0 {
            return Err(TimingError::Invalid(format!(
                "row of {} B is not a multiple of the {} B line",
                self.row_bytes, line_bytes
            )));
        }
        Ok(())
    }

    pub fn bank_count(&self) -> usize {
        self.channels as usize * self.banks_per_channel as usize
    }

    /// Lines interleave across channels; each channel fills a row before
    /// moving to the next bank.
    pub fn locate(&self, addr: u64, line_bytes: u32) -> BankAddress {
        let line = addr / line_bytes as u64;
        let channel = line % self.channels as u64;
        let local = line / self.channels as u64;
        let lines_per_row = (self.row_bytes / line_bytes) as u64;
        let row_index = local / lines_per_row;
        let bank = row_index % self.banks_per_channel as u64;
        let row = row_index / self.banks_per_channel as u64;
        BankAddress {
            flat_bank: (channel * self.banks_per_channel as u64 + bank) as usize,
            row,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BankAddress {
    pub flat_bank: usize,
    pub row: u64,
}

/// DDR timings resolved to nanoseconds for one lockstep group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DramTiming {
    pub t_cas_ns: f64,
    pub t_rcd_ns: f64,
    pub t_rp_ns: f64,
    pub t_ras_ns: f64,
    pub t_bl_ns: f64,
}

impl DramTiming {
    pub fn new(ddr: &DdrTimingParams, group: &LockstepGroup) -> Self {
        let tck = ddr.tck_ns();
        Self {
            t_cas_ns: ddr.t_cas as f64 * tck,
            t_rcd_ns: ddr.t_rcd as f64 * tck,
            t_rp_ns: ddr.t_rp as f64 * tck,
            t_ras_ns: ddr.t_ras as f64 * tck,
            t_bl_ns: bus_latency_tbl(ddr, group),
        }
    }

    pub fn row_hit_ns(&self) -> f64 {
        self.t_cas_ns + self.t_bl_ns
    }

    pub fn row_conflict_ns(&self) -> f64 {
        self.t_rp_ns + self.t_rcd_ns + self.t_cas_ns + self.t_bl_ns
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowOutcome {
    Hit,
    /// Bank precharged; activate only.
    Empty,
    Conflict,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Bank {
    pub open_row: Option<u64>,
    pub activated_at_ns: f64,
    pub ready_at_ns: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DramAccess {
    /// From arrival to the last data beat, including queueing.
    pub latency_ns: f64,
    pub outcome: RowOutcome,
}

/// Serves one request on `bank`, arriving at `arrival_ns`, and updates the
/// bank's open row. Requests queue behind the bank's previous one, and a
/// precharge never starts earlier than tRAS after the row was activated.
pub fn dram_access_latency(bank: &mut Bank, row: u64, arrival_ns: f64, t: &DramTiming) -> DramAccess {
    let start = arrival_ns.max(bank.ready_at_ns);
    let (outcome, done) = match bank.open_row {
        Some(open) if open == row => (RowOutcome::Hit, start + t.t_cas_ns + t.t_bl_ns),
        None => {
            bank.activated_at_ns = start;
            (RowOutcome::Empty, start + t.t_rcd_ns + t.t_cas_ns + t.t_bl_ns)
        }
        Some(_) => {
            let precharge = start.max(bank.activated_at_ns + t.t_ras_ns);
            let activate = precharge + t.t_rp_ns;
            bank.activated_at_ns = activate;
            (RowOutcome::Conflict, activate + t.t_rcd_ns + t.t_cas_ns + t.t_bl_ns)
        }
    };
    bank.open_row = Some(row);
    bank.ready_at_ns = done;
    DramAccess { latency_ns: done - arrival_ns, outcome }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowStats {
    pub hits: u64,
    pub empty: u64,
    pub conflicts: u64,
}

/// All banks of a DRAM system, owned by one simulation engine.
#[derive(Debug, Clone)]
pub struct DramSystem {
    geometry: DramGeometry,
    line_bytes: u32,
    timing: DramTiming,
    banks: Vec<Bank>,
    stats: RowStats,
}

impl DramSystem {
    pub fn new(
        geometry: DramGeometry,
        ddr: &DdrTimingParams,
        group: &LockstepGroup,
    ) -> Result<Self, TimingError> {
        ddr.validate()?;
        group.validate()?;
        geometry.validate(group.cache_line_bytes)?;
        Ok(Self {
            geometry,
            line_bytes: group.cache_line_bytes,
            timing: DramTiming::new(ddr, group),
            banks: vec![Bank::default(); geometry.bank_count()],
            stats: RowStats::default(),
        })
    }

    pub fn timing(&self) -> &DramTiming {
        &self.timing
    }

    pub fn access(&mut self, addr: u64, arrival_ns: f64) -> DramAccess {
        let loc = self.geometry.locate(addr, self.line_bytes);
        let a = dram_access_latency(&mut self.banks[loc.flat_bank], loc.row, arrival_ns, &self.timing);
        match a.outcome {
            RowOutcome::Hit => self.stats.hits += 1,
            RowOutcome::Empty => self.stats.empty += 1,
            RowOutcome::Conflict => self.stats.conflicts += 1,
        }
        a
    }

    pub fn stats(&self) -> RowStats {
        self.stats
    }
}
