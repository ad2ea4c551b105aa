use super::HierarchyConfig;
use crate::memory_timing::InterconnectModel;

/// Where each access of a trace was served, as fractions of all accesses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitProfile {
    pub l1_hit: f64,
    pub l2_hit: f64,
    pub l3_hit: f64,
    pub memory: f64,
    /// Mean DRAM service time of the accesses served by memory.
    pub t_mem_ns: f64,
}

/// Closed-form average access time for a blocking core, ns.
///
/// Every access pays L1; the fraction that misses also pays L2, and so on.
/// Memory accesses add one interconnect round trip on top of the lookups.
pub fn amat_oracle(p: &HitProfile, h: &HierarchyConfig, interconnect: &InterconnectModel) -> f64 {
    let reach_l2 = p.l2_hit + p.l3_hit + p.memory;
    let reach_l3 = p.l3_hit + p.memory;
    let lookups = h.l1.latency_cycles as f64
        + reach_l2 * h.l2.latency_cycles as f64
        + reach_l3 * h.l3.latency_cycles as f64;
    let trip = interconnect.round_trip(p.t_mem_ns, h.core_ghz).total_cycles;
    (lookups + p.memory * trip) / h.core_ghz
}
