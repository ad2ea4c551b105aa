//! Optically connected disaggregated memory: link design and system timing.
//!
//! * [`photonic_link`] sizes a WDM silicon-photonic link (loss budget,
//!   power penalties, energy per bit, area) and sweeps candidate designs.
//! * [`memory_timing`] holds DDR4 channel timing, lockstep line splitting and
//!   the end-to-end latency composition of local, optical and NIC paths.
//! * [`sim_core`] is a deterministic trace-driven cache/DRAM simulator.
//! * [`workloads`] generates synthetic traces and parses trace files.

pub mod fmt;
pub mod memory_timing;
pub mod photonic_link;
pub mod sim_core;
pub mod workloads;
