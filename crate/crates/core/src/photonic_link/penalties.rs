//! Loss stack and power penalties of one WDM lane.

use super::params::{CalibrationParams, LinkDesign, PhotonicDeviceParams, SPEED_OF_LIGHT_M_PER_S};
use super::LinkError;

/// Fraction of a neighbour's power leaking through a ring detuned by
/// `offset_hz` (first-order Lorentzian, FWHM = f0/Q).
pub fn lorentzian_leakage(offset_hz: f64, q: f64, center_frequency_hz: f64) -> f64 {
    let x = 2.0 * q * offset_hz / center_frequency_hz;
    1.0 / (1.0 + x * x)
}

/// Free spectral range of a ring of the design's footprint, Hz.
pub fn ring_fsr_hz(design: &LinkDesign, calib: &CalibrationParams) -> f64 {
    let circumference = 2.0 * std::f64::consts::PI * design.ring_radius_m();
    SPEED_OF_LIGHT_M_PER_S / (calib.ring_group_index * circumference)
}

/// WDM grid spacing: the usable band (capped by the ring FSR) split over m.
pub fn channel_spacing_hz(design: &LinkDesign, calib: &CalibrationParams) -> f64 {
    if let Some(ghz) = calib.channel_spacing_override_ghz {
        return ghz * 1e9;
    }
    let band = (calib.usable_band_thz * 1e12).min(ring_fsr_hz(design, calib));
    band / design.wavelength_count() as f64
}

/// Accumulated through-port loss of the off-resonance rings one λ passes on
/// the modulator bank and again on the demux bank.
pub fn through_ring_loss_db(m: u32, spacing_hz: f64, q: f64, center_frequency_hz: f64) -> f64 {
    let per_bank: f64 = (1..m)
        .map(|k| {
            let leak = lorentzian_leakage(k as f64 * spacing_hz, q, center_frequency_hz);
            -10.0 * (1.0 - leak).log10()
        })
        .sum();
    2.0 * per_bank
}

/// Couplers, on-chip waveguide and bends on both chips, plus through-ring loss.
pub fn loss_stack_db(
    params: &PhotonicDeviceParams,
    calib: &CalibrationParams,
    design: &LinkDesign,
) -> f64 {
    let passive = 2.0 * params.coupler_loss_db
        + 2.0 * calib.on_chip_waveguide_length_cm * params.waveguide_loss_db_per_cm
        + 2.0 * calib.bend_count as f64 * params.bend_loss_db;
    passive
        + through_ring_loss_db(
            design.wavelength_count(),
            channel_spacing_hz(design, calib),
            params.ring_q_factor,
            params.center_frequency_hz(),
        )
}

/// Total crosstalk X seen by a channel from its m-1 neighbours on both banks.
pub fn crosstalk_sum(m: u32, spacing_hz: f64, q: f64, center_frequency_hz: f64) -> f64 {
    (1..m)
        .map(|k| 2.0 * lorentzian_leakage(k as f64 * spacing_hz, q, center_frequency_hz))
        .sum()
}

/// Crosstalk power penalty `-10 log10(1 - X)`.
pub fn crosstalk_penalty_db(
    m: u32,
    spacing_hz: f64,
    q: f64,
    center_frequency_hz: f64,
) -> Result<f64, LinkError> {
    if m == 0 {
        return Err(LinkError::InvalidDesign("wavelength count must be at least 1".into()));
    }
    if !(spacing_hz > 0.0) {
        return Err(LinkError::InvalidParameter { name: "channel_spacing", value: spacing_hz });
    }
    if m == 1 {
        return Ok(0.0);
    }
    let x = crosstalk_sum(m, spacing_hz, q, center_frequency_hz);
    if x >= 1.0 {
        return Err(LinkError::InfeasibleCrosstalk { m, leakage: x });
    }
    Ok(-10.0 * (1.0 - x).log10())
}

/// Penalty of a finite extinction ratio: `10 log10((r+1)/(r-1))`.
pub fn er_penalty_db(er_db: f64) -> Result<f64, LinkError> {
    if !(er_db > 0.0) {
        return Err(LinkError::InvalidParameter { name: "extinction_ratio_db", value: er_db });
    }
    if er_db.is_infinite() {
        return Ok(0.0);
    }
    let r = 10f64.powf(er_db / 10.0);
    Ok(10.0 * ((r + 1.0) / (r - 1.0)).log10())
}

/// Number of photocurrent steps required at `bitrate_gbps`; never below one.
pub fn sensitivity_steps(bitrate_gbps: f64, calib: &CalibrationParams) -> u64 {
    ((bitrate_gbps / calib.rate_step_gbps).ceil() as u64).max(1)
}

/// Receiver sensitivity from the quantized minimum photocurrent.
///
/// Piecewise constant in the bitrate; each multiple of `rate_step_gbps`
/// closes a bracket, and the next rate up needs one more current step.
pub fn receiver_sensitivity_dbm(
    bitrate_gbps: f64,
    params: &PhotonicDeviceParams,
    calib: &CalibrationParams,
) -> f64 {
    let i_min = calib.photocurrent_step_a * sensitivity_steps(bitrate_gbps, calib) as f64;
    let p_watts = i_min / params.pd_responsivity_a_per_w;
    10.0 * (p_watts / 1e-3).log10()
}
