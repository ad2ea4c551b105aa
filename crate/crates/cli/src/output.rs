//! CSV output with `#` metadata lines.
//!
//! Run CSV columns: `config_hash,interconnect` followed by [`STATS_COLUMNS`].
//! Sweep CSV columns: [`SWEEP_KEY_COLUMNS`], [`STATS_COLUMNS`], `slowdown`.
//! `dram_cache_hit_rate` is always present and left empty when the
//! configuration has no DRAM cache.

use ocmsim_core::fmt::sig6;
use ocmsim_core::sim_core::SimStats;

use crate::CliError;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const STATS_COLUMNS: [&str; 16] = [
    "instructions",
    "reads",
    "writes",
    "total_cycles",
    "total_ns",
    "ipc",
    "amat_ns",
    "l1_miss_rate",
    "l2_miss_rate",
    "l3_miss_rate",
    "memory_fetches",
    "memory_writebacks",
    "dram_row_hits",
    "dram_row_empty",
    "dram_row_conflicts",
    "dram_cache_hit_rate",
];

pub const RUN_KEY_COLUMNS: [&str; 2] = ["config_hash", "interconnect"];
pub const SWEEP_KEY_COLUMNS: [&str; 5] = ["cell", "interconnect", "serdes_cycles", "roundtrip_m", "config_hash"];

pub fn metadata(command: &str, config_hash: &str) -> String {
    format!("# ocmsim {TOOL_VERSION}\n# command: {command}\n# config_sha256: {config_hash}\n")
}

pub fn stats_fields(s: &SimStats) -> Vec<String> {
    vec![
        s.instructions.to_string(),
        s.reads.to_string(),
        s.writes.to_string(),
        sig6(s.total_cycles),
        sig6(s.total_ns()),
        sig6(s.ipc()),
        sig6(s.amat_ns()),
        sig6(s.l1.miss_rate()),
        sig6(s.l2.miss_rate()),
        sig6(s.l3.miss_rate()),
        s.memory_fetches.to_string(),
        s.memory_writebacks.to_string(),
        s.dram_rows.hits.to_string(),
        s.dram_rows.empty.to_string(),
        s.dram_rows.conflicts.to_string(),
        s.dram_cache_hit_rate().map(sig6).unwrap_or_default(),
    ]
}

/// Serialises `header` and `rows` after the metadata block.
pub fn render<I, R>(meta: &str, header: &[&str], rows: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let body = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    Ok(format!("{meta}{}", String::from_utf8_lossy(&body)))
}
