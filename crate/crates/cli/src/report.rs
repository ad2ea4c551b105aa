//! Plot data for gnuplot: whitespace-separated columns under `#` comments.
//!
//! * `energy_curve`: one block per target bandwidth, columns
//!   `m energy_pj_per_bit is_min`, blocks separated by two blank lines.
//! * `slowdown_bars`: columns `index label slowdown`, baseline row omitted.
//! * `io_counts`: columns `channels electrical_io optical_io`.

use std::collections::HashMap;

use clap::ValueEnum;
use ocmsim_core::fmt::sig6;
use ocmsim_core::photonic_link::{io_counts, reference_optical_io};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    #[value(name = "energy_curve", alias = "energy-curve")]
    EnergyCurve,
    #[value(name = "slowdown_bars", alias = "slowdown-bars")]
    SlowdownBars,
    #[value(name = "io_counts", alias = "io-counts")]
    IoCounts,
}

/// Channel demand and link parameters for `io_counts`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IoSeries {
    pub max_channels: u32,
    pub per_channel_gbps: f64,
    pub per_fiber_gbps: f64,
    pub pins_per_channel: u32,
}

impl Default for IoSeries {
    /// DDR4-3200 modules (204.8 Gbps, 260 pins) over 800 Gbps fibers.
    fn default() -> Self {
        Self { max_channels: 32, per_channel_gbps: 204.8, per_fiber_gbps: 800.0, pins_per_channel: 260 }
    }
}

struct Table {
    columns: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read(csv_text: &str) -> Result<Self, CliError> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv_text.as_bytes());
        let columns = r
            .headers()
            .map_err(|e| CliError::Config(format!("report input: {e}")))?
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        let rows = r
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config(format!("report input: {e}")))?;
        Ok(Self { columns, rows })
    }

    fn col(&self, name: &str) -> Result<usize, CliError> {
        self.columns
            .get(name)
            .copied()
            .ok_or_else(|| CliError::Config(format!("report input has no `{name}` column")))
    }
}

fn num(row: &csv::StringRecord, i: usize) -> Result<f64, CliError> {
    row[i].parse().map_err(|_| CliError::Config(format!("report input: `{}` is not a number", &row[i])))
}

/// Minimum feasible energy per m for each target bandwidth in a
/// link-sweep CSV, with the overall minimum of each target marked.
pub fn energy_curve(csv_text: &str) -> Result<String, CliError> {
    let t = Table::read(csv_text)?;
    let (target, m, energy, feasible) =
        (t.col("target_gbps")?, t.col("m")?, t.col("energy_pj_per_bit")?, t.col("feasible")?);

    let mut series: Vec<(String, Vec<(u32, f64)>)> = Vec::new();
    for row in &t.rows {
        if &row[feasible] != "true" {
            continue;
        }
        let key = row[target].to_string();
        let mv: u32 = row[m].parse().map_err(|_| CliError::Config(format!("report input: bad m `{}`", &row[m])))?;
        let e = num(row, energy)?;
        let points = match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, p)) => p,
            None => {
                series.push((key, Vec::new()));
                &mut series.last_mut().expect("just pushed").1
            }
        };
        match points.iter_mut().find(|(pm, _)| *pm == mv) {
            Some(p) => p.1 = p.1.min(e),
            None => points.push((mv, e)),
        }
    }
    if series.is_empty() {
        return Err(CliError::Config("report input has no feasible link designs".into()));
    }

    let mut out = String::from("# energy per bit vs wavelengths per lane\n# x: m (wavelengths)  y: energy (pJ/bit)\n");
    for (i, (target, points)) in series.iter_mut().enumerate() {
        points.sort_by_key(|p| p.0);
        let best = points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
            .expect("series is nonempty");
        if i > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&format!(
            "# target {target} Gbps, minimum at m={} ({} pJ/bit)\n# m energy_pj_per_bit is_min\n",
            points[best].0,
            sig6(points[best].1)
        ));
        for (j, (m, e)) in points.iter().enumerate() {
            out.push_str(&format!("{m} {} {}\n", sig6(*e), u8::from(j == best)));
        }
    }
    Ok(out)
}

/// One labelled bar per sweep cell. The first data row is the baseline.
pub fn slowdown_bars(csv_text: &str) -> Result<String, CliError> {
    let t = Table::read(csv_text)?;
    let (cell, slow) = (t.col("cell")?, t.col("slowdown")?);
    let mut out = String::from("# slowdown relative to the baseline cell\n# x: cell  y: slowdown (x)\n");
    if let Some(base) = t.rows.first() {
        out.push_str(&format!("# baseline: {}\n", &base[cell]));
    }
    out.push_str("# index label slowdown\n");
    for (i, row) in t.rows.iter().skip(1).enumerate() {
        out.push_str(&format!("{i} {} {}\n", &row[cell], sig6(num(row, slow)?)));
    }
    Ok(out)
}

/// Electrical pins and optical fibers needed for 1..=max channels.
pub fn io_count_series(p: &IoSeries) -> Result<String, CliError> {
    if p.max_channels == 0 || !(p.per_fiber_gbps > 0.0) || !(p.per_channel_gbps > 0.0) {
        return Err(CliError::Config("io_counts needs positive channels and bandwidths".into()));
    }
    let mut out = format!(
        "# IO count vs memory channels ({} Gbps/channel, {} Gbps/fiber, {} pins/channel)\n\
         # x: channels  y: IOs (electrical wires, optical fibers)\n",
        p.per_channel_gbps, p.per_fiber_gbps, p.pins_per_channel
    );
    for ch in 1..=p.max_channels {
        if let Some(published) = reference_optical_io(ch) {
            out.push_str(&format!("# published optical IOs at {ch} channels: {published}\n"));
        }
    }
    out.push_str("# channels electrical_io optical_io\n");
    for ch in 1..=p.max_channels {
        let c = io_counts(ch, p.per_channel_gbps, p.per_fiber_gbps, p.pins_per_channel);
        out.push_str(&format!("{ch} {} {}\n", c.electrical, c.optical));
    }
    Ok(out)
}
