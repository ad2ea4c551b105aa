//! Grid sweeps over interconnect, SERDES latency and fiber length, and
//! link-design sweeps over wavelength count.

use std::cmp::Ordering;

use ocmsim_core::memory_timing::{InterconnectModel, NicParams, OcmLatencyParams, ROUNDTRIP_PRESETS_M, SERDES_PRESETS_CYCLES};
use ocmsim_core::photonic_link::{design_sweep, CalibrationParams, LinkSweep, PhotonicDeviceParams};
use ocmsim_core::sim_core::{run_records, slowdown, SimConfig, SimStats};
use ocmsim_core::workloads::TraceRecord;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_MAX_CELLS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisInterconnect {
    Local,
    Nic,
    Ocm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepAxes {
    pub serdes_cycles: Vec<f64>,
    pub roundtrip_m: Vec<f64>,
    pub interconnect: Vec<AxisInterconnect>,
}

impl Default for SweepAxes {
    fn default() -> Self {
        Self {
            serdes_cycles: SERDES_PRESETS_CYCLES.to_vec(),
            roundtrip_m: ROUNDTRIP_PRESETS_M.to_vec(),
            interconnect: vec![AxisInterconnect::Ocm],
        }
    }
}

/// The reference every slowdown is measured against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineCell {
    pub name: String,
    pub interconnect: InterconnectModel,
}

impl Default for BaselineCell {
    fn default() -> Self {
        Self { name: "baseline".into(), interconnect: InterconnectModel::Local }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: SweepAxes,
    pub baseline: BaselineCell,
    pub max_cells: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { axes: SweepAxes::default(), baseline: BaselineCell::default(), max_cells: DEFAULT_MAX_CELLS }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub label: String,
    pub kind: AxisInterconnect,
    pub serdes_cycles: Option<f64>,
    pub roundtrip_m: Option<f64>,
    pub interconnect: InterconnectModel,
}

impl Cell {
    fn key_cmp(&self, o: &Self) -> Ordering {
        let num = |x: Option<f64>| x.unwrap_or(f64::NEG_INFINITY);
        self.kind
            .cmp(&o.kind)
            .then(num(self.serdes_cycles).total_cmp(&num(o.serdes_cycles)))
            .then(num(self.roundtrip_m).total_cmp(&num(o.roundtrip_m)))
    }
}

impl SweepSpec {
    /// Expands the axes into cells sorted by (interconnect, SERDES, roundtrip).
    /// OCM params other than SERDES and distance come from `base` when it is
    /// an OCM model; likewise NIC params.
    pub fn cells(&self, base: &InterconnectModel) -> Result<Vec<Cell>, CliError> {
        let a = &self.axes;
        for (name, empty) in [
            ("serdes_cycles", a.serdes_cycles.is_empty()),
            ("roundtrip_m", a.roundtrip_m.is_empty()),
            ("interconnect", a.interconnect.is_empty()),
        ] {
            if empty {
                return Err(CliError::Config(format!("sweep axis `{name}` is empty")));
            }
        }
        let count: usize = a
            .interconnect
            .iter()
            .map(|k| match k {
                AxisInterconnect::Ocm => a.serdes_cycles.len() * a.roundtrip_m.len(),
                _ => 1,
            })
            .sum();
        if count > self.max_cells {
            return Err(CliError::Config(format!(
                "sweep has {count} cells, more than max_cells = {}",
                self.max_cells
            )));
        }

        let ocm_base = match base {
            InterconnectModel::Ocm(p) => *p,
            _ => OcmLatencyParams::default(),
        };
        let nic_base = match base {
            InterconnectModel::Nic(p) => *p,
            _ => NicParams::default(),
        };
        let mut cells = Vec::with_capacity(count);
        for &kind in &a.interconnect {
            match kind {
                AxisInterconnect::Local => cells.push(Cell {
                    label: "local".into(),
                    kind,
                    serdes_cycles: None,
                    roundtrip_m: None,
                    interconnect: InterconnectModel::Local,
                }),
                AxisInterconnect::Nic => cells.push(Cell {
                    label: "nic".into(),
                    kind,
                    serdes_cycles: None,
                    roundtrip_m: None,
                    interconnect: InterconnectModel::Nic(nic_base),
                }),
                AxisInterconnect::Ocm => {
                    for &s in &a.serdes_cycles {
                        for &d in &a.roundtrip_m {
                            let p = OcmLatencyParams { t_serdes_cycles: s, distance_m: d / 2.0, ..ocm_base };
                            p.validate().map_err(|e| CliError::Config(format!("sweep cell: {e}")))?;
                            cells.push(Cell {
                                label: format!("ocm-s{s}-d{d}"),
                                kind,
                                serdes_cycles: Some(s),
                                roundtrip_m: Some(d),
                                interconnect: InterconnectModel::Ocm(p),
                            });
                        }
                    }
                }
            }
        }
        cells.sort_by(Cell::key_cmp);
        cells.dedup_by(|a, b| a.key_cmp(b) == Ordering::Equal);
        Ok(cells)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub stats: SimStats,
    pub slowdown: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub baseline: SimStats,
    pub cells: Vec<CellResult>,
}

/// Runs the baseline, then every cell on a pool of `jobs` workers
/// (`None` for one per hardware thread). Results keep cell order.
pub fn run_grid(
    spec: &SweepSpec,
    base: &SimConfig,
    trace: &[TraceRecord],
    jobs: Option<usize>,
) -> Result<GridResult, CliError> {
    let cells = spec.cells(&base.interconnect)?;
    let baseline_cfg = SimConfig { interconnect: spec.baseline.interconnect, ..base.clone() };
    let baseline = run_records(trace.iter().copied(), &baseline_cfg)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    let results: Vec<Result<CellResult, CliError>> = pool.install(|| {
        cells
            .into_par_iter()
            .map(|cell| {
                let cfg = SimConfig { interconnect: cell.interconnect, ..base.clone() };
                let stats = run_records(trace.iter().copied(), &cfg)?;
                let slowdown = slowdown(&stats, &baseline);
                Ok(CellResult { cell, stats, slowdown })
            })
            .collect()
    });
    let cells = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(GridResult { baseline, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSweepSpec {
    pub target_bw_gbps: Vec<f64>,
    pub m_min: u32,
    pub m_max: u32,
}

impl Default for LinkSweepSpec {
    fn default() -> Self {
        Self { target_bw_gbps: vec![614.8], m_min: 10, m_max: 60 }
    }
}

impl LinkSweepSpec {
    pub fn run(
        &self,
        params: &PhotonicDeviceParams,
        calib: &CalibrationParams,
        jobs: Option<usize>,
    ) -> Result<Vec<LinkSweep>, CliError> {
        if self.target_bw_gbps.is_empty() {
            return Err(CliError::Config("link_sweep.target_bw_gbps is empty".into()));
        }
        if self.m_min == 0 || self.m_min > self.m_max {
            return Err(CliError::Config(format!("link_sweep m range {}..={} is empty", self.m_min, self.m_max)));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
        pool.install(|| {
            self.target_bw_gbps
                .iter()
                .map(|&t| design_sweep(t, params, calib, self.m_min..=self.m_max).map_err(CliError::from))
                .collect()
        })
    }
}
