//! DDR4 timing, lockstep line splitting and end-to-end latency composition.

mod bank;
mod ddr;
mod flit;
mod interconnect;

use thiserror::Error;

pub use bank::{
    dram_access_latency, Bank, BankAddress, DramAccess, DramGeometry, DramSystem, DramTiming,
    RowOutcome, RowStats,
};
pub use ddr::{bus_latency_tbl, DdrTimingParams, LockstepGroup};
pub use flit::{flit_plan, FlitPlan};
pub use interconnect::{
    local_round_trip, nic_round_trip, ocm_round_trip, InterconnectModel, LatencyBreakdown,
    NicParams, OcmLatencyParams, SERDES_PRESETS_CYCLES, ROUNDTRIP_PRESETS_M, T_SETUP_CYCLES,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimingError {
    #[error("invalid timing configuration: {0}")]
    Invalid(String),
}
