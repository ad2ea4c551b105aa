//! Unidirectional SiP WDM link: budget, energy per bit, area and design sweeps.
//!
//! One lane carries `m` wavelengths at `b_r` Gbps each. A design serving `N`
//! memory channels places `N * m` wavelengths on the fiber; every lane has a
//! modulator bank and a demux bank on each side of both unidirectional links,
//! hence `8 * N * m` rings.

mod params;
mod penalties;

use std::io::{self, Write};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use params::{
    CalibrationParams, LinkDesign, PhotonicDeviceParams, RING_AREAS_UM2, SPEED_OF_LIGHT_M_PER_S,
};
pub use penalties::{
    channel_spacing_hz, crosstalk_penalty_db, crosstalk_sum, er_penalty_db, loss_stack_db,
    lorentzian_leakage, receiver_sensitivity_dbm, ring_fsr_hz, sensitivity_steps,
    through_ring_loss_db,
};

use crate::fmt::sig6;

/// Pitch reserved around each modulator ring.
pub const RING_PADDING_PITCH_UM: f64 = 100.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("invalid link design: {0}")]
    InvalidDesign(String),
    #[error("crosstalk leakage {leakage:.4} >= 1 with {m} wavelengths: channels cannot be resolved")]
    InfeasibleCrosstalk { m: u32, leakage: f64 },
    #[error("no feasible design for {target_gbps} Gbps in the requested range")]
    NoFeasibleDesign { target_gbps: f64 },
}

/// Energy per bit by source, pJ/bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub laser: f64,
    pub thermal: f64,
    pub modulator: f64,
    pub serdes: f64,
    pub receiver: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.laser + self.thermal + self.modulator + self.serdes + self.receiver
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkEvaluation {
    pub design: LinkDesign,
    pub aggregate_bandwidth_gbps: f64,
    pub channel_spacing_ghz: f64,
    /// Laser output needed per wavelength.
    pub per_lambda_laser_dbm: f64,
    /// Aggregate laser output on the fiber; compared against the budget.
    pub laser_power_required_dbm: f64,
    pub total_loss_db: f64,
    pub crosstalk_penalty_db: f64,
    pub er_penalty_db: f64,
    pub receiver_sensitivity_dbm: f64,
    pub energy_pj_per_bit: f64,
    pub energy: EnergyBreakdown,
    pub mrr_count_total: u64,
    pub area_mm2: f64,
    /// Modulator padding, `mrr_count * 100 µm`; metadata only, not in `area_mm2`.
    pub padding_length_mm: f64,
    pub feasible: bool,
}

/// Link rate needed by `channels` lockstep channels.
pub fn required_link_bandwidth(channels: u32, per_module_gbps: f64) -> f64 {
    channels as f64 * per_module_gbps
}

pub fn mrr_count(design: &LinkDesign) -> u64 {
    8 * design.channel_count() as u64 * design.wavelength_count() as u64
}

/// Ring area only.
pub fn link_area_mm2(design: &LinkDesign) -> f64 {
    mrr_count(design) as f64 * design.ring_area_um2() * 1e-6
}

pub fn evaluate_link(
    design: &LinkDesign,
    params: &PhotonicDeviceParams,
    calib: &CalibrationParams,
) -> Result<LinkEvaluation, LinkError> {
    params.validate()?;
    calib.validate(params)?;

    let lambdas = design.wavelength_count() * design.channel_count();
    let comb = LinkDesign::new(
        lambdas,
        design.bitrate_per_lambda_gbps(),
        design.ring_area_um2(),
        1,
    )?;
    let f0 = params.center_frequency_hz();
    let spacing = channel_spacing_hz(&comb, calib);
    let b_r = design.bitrate_per_lambda_gbps();

    let sensitivity = receiver_sensitivity_dbm(b_r, params, calib);
    let loss = loss_stack_db(params, calib, &comb);
    let crosstalk = crosstalk_penalty_db(lambdas, spacing, params.ring_q_factor, f0)?;
    let er = er_penalty_db(params.extinction_ratio_db)?;

    let per_lambda_dbm = sensitivity + loss + crosstalk + er;
    let aggregate_mw = lambdas as f64 * dbm_to_mw(per_lambda_dbm);
    let aggregate_dbm = mw_to_dbm(aggregate_mw);

    // mW / Gbps == pJ/bit
    let aggregate_gbps = lambdas as f64 * b_r;
    let laser = aggregate_mw / params.laser_wallplug_efficiency / aggregate_gbps;
    let thermal = 2.0 * lambdas as f64 * params.thermal_tuning_w_per_ring * 1e3 / aggregate_gbps;
    let modulator =
        0.25 * params.junction_capacitance_f * calib.drive_voltage_swing_v.powi(2) * 1e12;
    let serdes = calib.serdes_energy_pj_per_bit
        * (b_r / calib.serdes_reference_rate_gbps).powf(calib.serdes_rate_exponent);
    let receiver = calib.receiver_analog_energy_pj_per_bit;
    let energy = EnergyBreakdown { laser, thermal, modulator, serdes, receiver };

    let mrrs = mrr_count(design);
    Ok(LinkEvaluation {
        design: *design,
        aggregate_bandwidth_gbps: aggregate_gbps,
        channel_spacing_ghz: spacing / 1e9,
        per_lambda_laser_dbm: per_lambda_dbm,
        laser_power_required_dbm: aggregate_dbm,
        total_loss_db: loss,
        crosstalk_penalty_db: crosstalk,
        er_penalty_db: er,
        receiver_sensitivity_dbm: sensitivity,
        energy_pj_per_bit: energy.total(),
        energy,
        mrr_count_total: mrrs,
        area_mm2: link_area_mm2(design),
        padding_length_mm: mrrs as f64 * RING_PADDING_PITCH_UM * 1e-3,
        feasible: aggregate_dbm <= params.max_aggregate_optical_power_dbm,
    })
}

/// Placeholder row for a point whose channels cannot be resolved.
fn unresolvable(design: &LinkDesign, params: &PhotonicDeviceParams, calib: &CalibrationParams) -> LinkEvaluation {
    let inf = f64::INFINITY;
    let mrrs = mrr_count(design);
    LinkEvaluation {
        design: *design,
        aggregate_bandwidth_gbps: design.lane_rate_gbps() * design.channel_count() as f64,
        channel_spacing_ghz: channel_spacing_hz(design, calib) / 1e9,
        per_lambda_laser_dbm: inf,
        laser_power_required_dbm: inf,
        total_loss_db: loss_stack_db(params, calib, design),
        crosstalk_penalty_db: inf,
        er_penalty_db: er_penalty_db(params.extinction_ratio_db).unwrap_or(inf),
        receiver_sensitivity_dbm: receiver_sensitivity_dbm(design.bitrate_per_lambda_gbps(), params, calib),
        energy_pj_per_bit: inf,
        energy: EnergyBreakdown { laser: inf, thermal: 0.0, modulator: 0.0, serdes: 0.0, receiver: 0.0 },
        mrr_count_total: mrrs,
        area_mm2: link_area_mm2(design),
        padding_length_mm: mrrs as f64 * RING_PADDING_PITCH_UM * 1e-3,
        feasible: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkSweep {
    pub target_bw_gbps: f64,
    /// Ordered by (m, ring area).
    pub points: Vec<LinkEvaluation>,
    /// Index into `points` of the feasible minimum-energy design.
    pub best: usize,
}

impl LinkSweep {
    pub fn best(&self) -> &LinkEvaluation {
        &self.points[self.best]
    }

    /// Minimum energy over ring geometries for each m, feasible points only.
    pub fn energy_by_m(&self) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = Vec::new();
        for p in self.points.iter().filter(|p| p.feasible) {
            let m = p.design.wavelength_count();
            match out.last_mut() {
                Some((lm, e)) if *lm == m => *e = e.min(p.energy_pj_per_bit),
                _ => out.push((m, p.energy_pj_per_bit)),
            }
        }
        out
    }
}

/// Evaluates every (m, ring area) with `b_r = target / m` and picks the
/// feasible minimum-energy point. Ties go to lower m, then smaller ring.
pub fn design_sweep(
    target_bw_gbps: f64,
    params: &PhotonicDeviceParams,
    calib: &CalibrationParams,
    m_range: RangeInclusive<u32>,
) -> Result<LinkSweep, LinkError> {
    if !(target_bw_gbps > 0.0 && target_bw_gbps.is_finite()) {
        return Err(LinkError::InvalidParameter { name: "target_bw_gbps", value: target_bw_gbps });
    }
    if m_range.is_empty() || *m_range.start() == 0 {
        return Err(LinkError::InvalidDesign(format!("empty or zero wavelength range {m_range:?}")));
    }
    params.validate()?;
    calib.validate(params)?;

    let grid: Vec<(u32, f64)> = m_range
        .flat_map(|m| RING_AREAS_UM2.iter().map(move |&a| (m, a)))
        .collect();
    let points = grid
        .par_iter()
        .map(|&(m, area)| {
            let design = LinkDesign::new(m, target_bw_gbps / m as f64, area, 1)?;
            match evaluate_link(&design, params, calib) {
                Err(LinkError::InfeasibleCrosstalk { .. }) => Ok(unresolvable(&design, params, calib)),
                other => other,
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut best: Option<usize> = None;
    for (i, p) in points.iter().enumerate() {
        if !p.feasible {
            continue;
        }
        // points are already in (m, area) order, so strict < keeps the tie-break
        if best.is_none_or(|b| p.energy_pj_per_bit < points[b].energy_pj_per_bit) {
            best = Some(i);
        }
    }
    let best = best.ok_or(LinkError::NoFeasibleDesign { target_gbps: target_bw_gbps })?;
    Ok(LinkSweep { target_bw_gbps, points, best })
}

pub const SWEEP_CSV_HEADER: &str =
    "m,bitrate_gbps,ring_area_um2,energy_pj_per_bit,laser_pj,thermal_pj,mod_pj,serdes_pj,rx_pj,laser_dbm,feasible";

pub fn sweep_csv_row(p: &LinkEvaluation) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        p.design.wavelength_count(),
        sig6(p.design.bitrate_per_lambda_gbps()),
        sig6(p.design.ring_area_um2()),
        sig6(p.energy_pj_per_bit),
        sig6(p.energy.laser),
        sig6(p.energy.thermal),
        sig6(p.energy.modulator),
        sig6(p.energy.serdes),
        sig6(p.energy.receiver),
        sig6(p.laser_power_required_dbm),
        p.feasible,
    )
}

/// Writes the header and one row per point; no metadata lines.
pub fn write_sweep_csv<W: Write>(mut out: W, sweep: &LinkSweep) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for p in &sweep.points {
        writeln!(out, "{}", sweep_csv_row(p))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IoCounts {
    pub electrical: u64,
    pub optical: u64,
}

/// Electrical pins vs. fibers (one per direction) to carry `channels` channels.
pub fn io_counts(channels: u32, per_channel_gbps: f64, per_fiber_gbps: f64, pins_per_channel: u32) -> IoCounts {
    let demand = channels as f64 * per_channel_gbps;
    let fibers_per_direction = (demand / per_fiber_gbps).ceil() as u64;
    IoCounts {
        electrical: channels as u64 * pins_per_channel as u64,
        optical: 2 * fibers_per_direction,
    }
}

/// Published optical IO counts for the channel counts where one is stated.
pub fn reference_optical_io(channels: u32) -> Option<u64> {
    match channels {
        4 => Some(2),
        32 => Some(10),
        _ => None,
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> (PhotonicDeviceParams, CalibrationParams) {
        (PhotonicDeviceParams::default(), CalibrationParams::default())
    }

    #[test]
    fn bandwidth_examples() {
        assert!((required_link_bandwidth(4, 153.7) - 614.8).abs() < 1e-9);
        assert_eq!(required_link_bandwidth(1, 153.7), 153.7);
        assert!((required_link_bandwidth(32, 204.8) - 6553.6).abs() < 1e-9);
    }

    #[test]
    fn mrr_counts() {
        let d = |n, m| LinkDesign::new(m, 10.0, 183.5, n).unwrap();
        assert_eq!(mrr_count(&d(1, 35)), 280);
        assert_eq!(mrr_count(&d(1, 1)), 8);
        assert_eq!(mrr_count(&d(4, 35)), 1120);
    }

    #[test]
    fn area_examples() {
        let a35 = link_area_mm2(&LinkDesign::new(35, 17.57, 183.5, 1).unwrap());
        assert!((a35 - 51.38e-3).abs() < 1e-12);
        let a39 = link_area_mm2(&LinkDesign::new(39, 20.56, 183.5, 1).unwrap());
        assert!((a39 - 57.252e-3).abs() < 1e-12);
    }

    #[test]
    fn full_evaluation_matches_frozen_oracle() {
        let (p, c) = defaults();
        let d = LinkDesign::new(35, 17.57, 183.5, 1).unwrap();
        let e = evaluate_link(&d, &p, &c).unwrap();
        assert!((e.energy.thermal - 0.113_830_392_715).abs() < 1e-9);
        assert!((e.energy.modulator - 0.065).abs() < 1e-12);
        assert!((e.energy.laser - 0.424_817_707_762).abs() < 1e-9);
        assert!((e.energy.serdes - 0.303_009_005_997).abs() < 1e-9);
        assert!((e.energy_pj_per_bit - 1.106_657_106_474).abs() < 1e-9);
        assert!((e.per_lambda_laser_dbm - 3.500_956_274_498).abs() < 1e-9);
        assert!((e.laser_power_required_dbm - 18.941_636_718).abs() < 1e-8);
        assert!(e.feasible);
        assert_eq!(e.mrr_count_total, 280);
        assert!((e.padding_length_mm - 28.0).abs() < 1e-12);
    }

    #[test]
    fn breakdown_sums_to_total() {
        let (p, c) = defaults();
        for m in [1, 5, 20, 35] {
            let d = LinkDesign::new(m, 600.0 / m as f64, 156.4, 1).unwrap();
            let e = evaluate_link(&d, &p, &c).unwrap();
            assert!((e.energy.total() - e.energy_pj_per_bit).abs() < 1e-9);
        }
    }

    #[test]
    fn infeasible_power_is_data_not_error() {
        let (mut p, c) = defaults();
        p.max_aggregate_optical_power_dbm = 0.0;
        let d = LinkDesign::new(35, 17.57, 183.5, 1).unwrap();
        let e = evaluate_link(&d, &p, &c).unwrap();
        assert!(!e.feasible);
    }

    #[test]
    fn evaluate_propagates_crosstalk_error() {
        let (p, c) = defaults();
        let d = LinkDesign::new(60, 10.0, 218.4, 1).unwrap();
        assert!(matches!(evaluate_link(&d, &p, &c), Err(LinkError::InfeasibleCrosstalk { .. })));
    }

    #[test]
    fn singleton_sweep() {
        let (p, c) = defaults();
        let s = design_sweep(100.0, &p, &c, 1..=1).unwrap();
        assert_eq!(s.points.len(), 3);
        assert_eq!(s.best().design.wavelength_count(), 1);
    }

    #[test]
    fn sweep_rejects_bad_input() {
        let (p, c) = defaults();
        assert!(design_sweep(0.0, &p, &c, 1..=4).is_err());
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=4;
        assert!(design_sweep(100.0, &p, &c, empty).is_err());
        let mut tight = p;
        tight.max_aggregate_optical_power_dbm = -30.0;
        assert!(matches!(
            design_sweep(614.8, &tight, &c, 10..=60),
            Err(LinkError::NoFeasibleDesign { .. })
        ));
    }

    #[test]
    fn sweep_tie_breaks_on_lower_m_then_smaller_ring() {
        // With a fixed spacing the ring footprint drops out of the energy,
        // so every m has a three-way tie across ring areas.
        let (p, c) = defaults();
        let c = CalibrationParams { channel_spacing_override_ghz: Some(100.0), ..c };
        let s = design_sweep(100.0, &p, &c, 10..=10).unwrap();
        assert_eq!(s.best().design.ring_area_um2(), 156.4);
    }

    #[test]
    fn io_count_examples() {
        assert_eq!(io_counts(4, 204.8, 800.0, 260), IoCounts { electrical: 1040, optical: 4 });
        assert_eq!(io_counts(1, 204.8, 800.0, 260), IoCounts { electrical: 260, optical: 2 });
        assert_eq!(io_counts(32, 204.8, 800.0, 260), IoCounts { electrical: 8320, optical: 18 });
        assert_eq!(reference_optical_io(4), Some(2));
        assert_eq!(reference_optical_io(32), Some(10));
        assert_eq!(reference_optical_io(8), None);
    }

    #[test]
    fn csv_row_layout() {
        let (p, c) = defaults();
        let e = evaluate_link(&LinkDesign::new(35, 17.57, 183.5, 1).unwrap(), &p, &c).unwrap();
        let row = sweep_csv_row(&e);
        assert_eq!(row.split(',').count(), SWEEP_CSV_HEADER.split(',').count());
        assert!(row.starts_with("35,17.5700,183.500,1.10666,"));
        assert!(row.ends_with(",true"));
    }
}
