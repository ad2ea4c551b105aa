//! The work behind each CLI verb; every function returns the text to emit.

use std::path::Path;

use ocmsim_core::fmt::sig6;
use ocmsim_core::photonic_link::{sweep_csv_row, SWEEP_CSV_HEADER};
use ocmsim_core::sim_core::{run_records, run_simulation, SimConfig};
use ocmsim_core::workloads::{generate, open_trace, write_trace, TraceRecord};

use crate::config::{sim_config_hash, RunConfig, WorkloadSource};
use crate::output::{metadata, render, stats_fields, RUN_KEY_COLUMNS, STATS_COLUMNS, SWEEP_KEY_COLUMNS};
use crate::sweep::run_grid;
use crate::CliError;

/// One simulation, one CSV data row.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    let sim = cfg.sim_config();
    let stats = match cfg.workload_source()? {
        WorkloadSource::Synthetic(spec) => run_records(generate(&spec)?, &sim)?,
        WorkloadSource::Trace(path) => run_simulation(open_trace(&path)?, &sim)?,
    };
    let header: Vec<&str> = RUN_KEY_COLUMNS.iter().chain(STATS_COLUMNS.iter()).copied().collect();
    let mut row = vec![sim_config_hash(&sim), sim.interconnect.label().to_string()];
    row.extend(stats_fields(&stats));
    render(&metadata("run", &cfg.hash()?), &header, [row])
}

/// Materialises the workload once so every sweep cell replays the same records.
pub fn load_trace(cfg: &RunConfig) -> Result<Vec<TraceRecord>, CliError> {
    Ok(match cfg.workload_source()? {
        WorkloadSource::Synthetic(spec) => generate(&spec)?.collect(),
        WorkloadSource::Trace(path) => open_trace(&path)?.collect::<Result<_, _>>()?,
    })
}

/// Baseline row first, then one row per cell in axis order.
pub fn sweep(cfg: &RunConfig, jobs: Option<usize>) -> Result<String, CliError> {
    let spec = cfg.sweep.clone().unwrap_or_default();
    let sim = cfg.sim_config();
    spec.cells(&sim.interconnect)?;
    let trace = load_trace(cfg)?;
    let grid = run_grid(&spec, &sim, &trace, jobs)?;

    let header: Vec<&str> =
        SWEEP_KEY_COLUMNS.iter().chain(STATS_COLUMNS.iter()).chain(["slowdown"].iter()).copied().collect();
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    let baseline_cfg = SimConfig { interconnect: spec.baseline.interconnect, ..sim.clone() };
    let mut rows = Vec::with_capacity(grid.cells.len() + 1);
    let mut base_row = vec![
        spec.baseline.name.clone(),
        spec.baseline.interconnect.label().to_string(),
        String::new(),
        String::new(),
        sim_config_hash(&baseline_cfg),
    ];
    base_row.extend(stats_fields(&grid.baseline));
    base_row.push(sig6(1.0));
    rows.push(base_row);
    for r in &grid.cells {
        let cfg = SimConfig { interconnect: r.cell.interconnect, ..sim.clone() };
        let mut row = vec![
            r.cell.label.clone(),
            r.cell.interconnect.label().to_string(),
            opt(r.cell.serdes_cycles),
            opt(r.cell.roundtrip_m),
            sim_config_hash(&cfg),
        ];
        row.extend(stats_fields(&r.stats));
        row.push(sig6(r.slowdown));
        rows.push(row);
    }
    render(&metadata("sweep", &cfg.hash()?), &header, rows)
}

/// Every evaluated design for each target bandwidth.
pub fn link_sweep(cfg: &RunConfig, jobs: Option<usize>) -> Result<String, CliError> {
    let spec = cfg.link_sweep.clone().unwrap_or_default();
    let sweeps = spec.run(&cfg.photonic, &cfg.calibration, jobs)?;
    let header: Vec<&str> = std::iter::once("target_gbps").chain(SWEEP_CSV_HEADER.split(',')).collect();
    let rows = sweeps.iter().flat_map(|s| {
        s.points.iter().map(move |p| {
            std::iter::once(sig6(s.target_bw_gbps))
                .chain(sweep_csv_row(p).split(',').map(str::to_string))
                .collect::<Vec<_>>()
        })
    });
    render(&metadata("link-sweep", &cfg.hash()?), &header, rows)
}

/// Writes the synthetic workload to `out`; returns the record count.
pub fn gen_trace(cfg: &RunConfig, out: &Path) -> Result<u64, CliError> {
    let spec = match cfg.workload_source()? {
        WorkloadSource::Synthetic(spec) => spec,
        WorkloadSource::Trace(_) => {
            return Err(CliError::Config("gen-trace needs a `[workload]` table, not `trace`".into()))
        }
    };
    write_trace(out, generate(&spec)?).map_err(|e| CliError::io(out, e))
}
