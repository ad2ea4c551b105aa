use serde::{Deserialize, Serialize};

use super::TimingError;

/// DDR4 channel timing. Command timings are in memory-clock cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdrTimingParams {
    pub data_rate_mtps: u32,
    pub bus_width_bits: u32,
    pub t_cas: u32,
    pub t_rcd: u32,
    pub t_rp: u32,
    pub t_ras: u32,
    pub burst_length: u32,
}

impl Default for DdrTimingParams {
    /// DDR4-2400, 16-16-16-39.
    fn default() -> Self {
        Self {
            data_rate_mtps: 2400,
            bus_width_bits: 64,
            t_cas: 16,
            t_rcd: 16,
            t_rp: 16,
            t_ras: 39,
            burst_length: 8,
        }
    }
}

impl DdrTimingParams {
    pub fn validate(&self) -> Result<(), TimingError> {
        let fields = [
            ("data_rate_mtps", self.data_rate_mtps),
            ("bus_width_bits", self.bus_width_bits),
            ("burst_length", self.burst_length),
        ];
        for (name, v) in fields {
            if v == 0 {
                return Err(TimingError::Invalid(format!("{name} must be positive")));
            }
        }
        if self.bus_width_bits % 8 != 0 {
            return Err(TimingError::Invalid("bus_width_bits must be a whole number of bytes".into()));
        }
        Ok(())
    }

    /// Memory clock period; two transfers per clock.
    pub fn tck_ns(&self) -> f64 {
        2000.0 / self.data_rate_mtps as f64
    }

    pub fn bus_bytes(&self) -> u32 {
        self.bus_width_bits / 8
    }

    pub fn peak_bandwidth_gbps(&self) -> f64 {
        self.data_rate_mtps as f64 * self.bus_width_bits as f64 / 1000.0
    }
}

/// X DIMMs in lockstep, each serving a slice of every cache line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LockstepGroup {
    pub dimms_per_channel: u32,
    pub cache_line_bytes: u32,
}

impl Default for LockstepGroup {
    fn default() -> Self {
        Self { dimms_per_channel: 2, cache_line_bytes: 128 }
    }
}

impl LockstepGroup {
    pub fn validate(&self) -> Result<(), TimingError> {
        if self.dimms_per_channel == 0 {
            return Err(TimingError::Invalid("dimms_per_channel must be at least 1".into()));
        }
        if self.cache_line_bytes == 0 || self.cache_line_bytes % self.dimms_per_channel != 0 {
            return Err(TimingError::Invalid(format!(
                "cache line of {} B cannot be split across {} DIMMs",
                self.cache_line_bytes, self.dimms_per_channel
            )));
        }
        Ok(())
    }

    pub fn per_dimm_slice_bytes(&self) -> u32 {
        self.cache_line_bytes / self.dimms_per_channel
    }

    /// Data beats each DIMM drives for one line, floored at one beat pair.
    pub fn beats(&self, ddr: &DdrTimingParams) -> u32 {
        self.per_dimm_slice_bytes().div_ceil(ddr.bus_bytes()).max(2)
    }
}

/// Data burst duration of one line, ns.
pub fn bus_latency_tbl(ddr: &DdrTimingParams, group: &LockstepGroup) -> f64 {
    group.beats(ddr) as f64 * ddr.tck_ns() / 2.0
}
