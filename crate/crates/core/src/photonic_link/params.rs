use serde::{Deserialize, Serialize};

use super::LinkError;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

/// Ring footprints available to a design, in µm².
pub const RING_AREAS_UM2: [f64; 3] = [156.4, 183.5, 218.4];

/// Device constants of the SiP link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhotonicDeviceParams {
    pub max_aggregate_optical_power_dbm: f64,
    pub laser_wallplug_efficiency: f64,
    pub waveguide_loss_db_per_cm: f64,
    pub bend_loss_db: f64,
    pub coupler_loss_db: f64,
    pub ring_q_factor: f64,
    pub extinction_ratio_db: f64,
    pub junction_capacitance_f: f64,
    /// Magnitude of the maximum (reverse) drive voltage.
    pub max_drive_voltage_v: f64,
    pub thermal_tuning_w_per_ring: f64,
    pub pd_responsivity_a_per_w: f64,
    pub center_wavelength_m: f64,
}

impl Default for PhotonicDeviceParams {
    fn default() -> Self {
        Self {
            max_aggregate_optical_power_dbm: 20.0,
            laser_wallplug_efficiency: 0.30,
            waveguide_loss_db_per_cm: 5.0,
            bend_loss_db: 0.02,
            coupler_loss_db: 1.0,
            ring_q_factor: 6500.0,
            extinction_ratio_db: 10.0,
            junction_capacitance_f: 65e-15,
            max_drive_voltage_v: 5.0,
            thermal_tuning_w_per_ring: 1e-3,
            pd_responsivity_a_per_w: 1.0,
            center_wavelength_m: 1.55e-6,
        }
    }
}

impl PhotonicDeviceParams {
    pub fn validate(&self) -> Result<(), LinkError> {
        let non_negative = [
            ("waveguide_loss_db_per_cm", self.waveguide_loss_db_per_cm),
            ("bend_loss_db", self.bend_loss_db),
            ("coupler_loss_db", self.coupler_loss_db),
            ("thermal_tuning_w_per_ring", self.thermal_tuning_w_per_ring),
            ("junction_capacitance_f", self.junction_capacitance_f),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(LinkError::InvalidParameter { name, value: v });
            }
        }
        let eta = self.laser_wallplug_efficiency;
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(LinkError::InvalidParameter {
                name: "laser_wallplug_efficiency",
                value: eta,
            });
        }
        let positive = [
            ("ring_q_factor", self.ring_q_factor),
            ("pd_responsivity_a_per_w", self.pd_responsivity_a_per_w),
            ("center_wavelength_m", self.center_wavelength_m),
            ("max_drive_voltage_v", self.max_drive_voltage_v),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LinkError::InvalidParameter { name, value: v });
            }
        }
        Ok(())
    }

    /// Optical carrier frequency at the center wavelength, Hz.
    pub fn center_frequency_hz(&self) -> f64 {
        SPEED_OF_LIGHT_M_PER_S / self.center_wavelength_m
    }
}

/// Model constants that the device table leaves to external circuit models.
///
/// The SERDES term scales with the per-wavelength rate as
/// `serdes_energy_pj_per_bit * (b_r / serdes_reference_rate_gbps)^serdes_rate_exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationParams {
    pub drive_voltage_swing_v: f64,
    pub serdes_energy_pj_per_bit: f64,
    pub serdes_reference_rate_gbps: f64,
    pub serdes_rate_exponent: f64,
    pub receiver_analog_energy_pj_per_bit: f64,
    pub photocurrent_step_a: f64,
    pub rate_step_gbps: f64,
    pub on_chip_waveguide_length_cm: f64,
    pub bend_count: u32,
    /// Usable optical band shared by the WDM grid, THz.
    pub usable_band_thz: f64,
    /// Group index of the ring waveguide; sets the ring FSR.
    pub ring_group_index: f64,
    /// Fixed channel spacing; when set it replaces the band/FSR rule.
    pub channel_spacing_override_ghz: Option<f64>,
}

impl Default for CalibrationParams {
    fn default() -> Self {
        Self {
            drive_voltage_swing_v: 2.0,
            serdes_energy_pj_per_bit: 0.30,
            serdes_reference_rate_gbps: 17.5,
            serdes_rate_exponent: 2.5,
            receiver_analog_energy_pj_per_bit: 0.20,
            photocurrent_step_a: 10e-6,
            rate_step_gbps: 5.0,
            on_chip_waveguide_length_cm: 1.0,
            bend_count: 4,
            usable_band_thz: 4.0,
            ring_group_index: 4.6,
            channel_spacing_override_ghz: None,
        }
    }
}

impl CalibrationParams {
    pub fn validate(&self, device: &PhotonicDeviceParams) -> Result<(), LinkError> {
        let positive = [
            ("drive_voltage_swing_v", self.drive_voltage_swing_v),
            ("serdes_energy_pj_per_bit", self.serdes_energy_pj_per_bit),
            ("serdes_reference_rate_gbps", self.serdes_reference_rate_gbps),
            ("receiver_analog_energy_pj_per_bit", self.receiver_analog_energy_pj_per_bit),
            ("photocurrent_step_a", self.photocurrent_step_a),
            ("rate_step_gbps", self.rate_step_gbps),
            ("on_chip_waveguide_length_cm", self.on_chip_waveguide_length_cm),
            ("usable_band_thz", self.usable_band_thz),
            ("ring_group_index", self.ring_group_index),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LinkError::InvalidParameter { name, value: v });
            }
        }
        if !(self.serdes_rate_exponent >= 0.0) {
            return Err(LinkError::InvalidParameter {
                name: "serdes_rate_exponent",
                value: self.serdes_rate_exponent,
            });
        }
        if self.bend_count == 0 {
            return Err(LinkError::InvalidParameter { name: "bend_count", value: 0.0 });
        }
        if let Some(s) = self.channel_spacing_override_ghz {
            if !(s > 0.0 && s.is_finite()) {
                return Err(LinkError::InvalidParameter {
                    name: "channel_spacing_override_ghz",
                    value: s,
                });
            }
        }
        if self.drive_voltage_swing_v > device.max_drive_voltage_v {
            return Err(LinkError::InvalidParameter {
                name: "drive_voltage_swing_v",
                value: self.drive_voltage_swing_v,
            });
        }
        Ok(())
    }
}

/// One candidate point: λ count, per-λ rate, ring footprint and channels served.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkDesign {
    wavelength_count_m: u32,
    bitrate_per_lambda_gbps: f64,
    ring_area_um2: f64,
    channel_count_n: u32,
}

impl LinkDesign {
    pub fn new(
        wavelength_count_m: u32,
        bitrate_per_lambda_gbps: f64,
        ring_area_um2: f64,
        channel_count_n: u32,
    ) -> Result<Self, LinkError> {
        if wavelength_count_m == 0 {
            return Err(LinkError::InvalidDesign("wavelength count must be at least 1".into()));
        }
        if channel_count_n == 0 {
            return Err(LinkError::InvalidDesign("channel count must be at least 1".into()));
        }
        if !(bitrate_per_lambda_gbps > 0.0 && bitrate_per_lambda_gbps.is_finite()) {
            return Err(LinkError::InvalidDesign(format!(
                "bitrate per wavelength must be positive, got {bitrate_per_lambda_gbps}"
            )));
        }
        if !RING_AREAS_UM2.contains(&ring_area_um2) {
            return Err(LinkError::InvalidDesign(format!(
                "ring area {ring_area_um2} um^2 is not one of {RING_AREAS_UM2:?}"
            )));
        }
        Ok(Self {
            wavelength_count_m,
            bitrate_per_lambda_gbps,
            ring_area_um2,
            channel_count_n,
        })
    }

    pub fn wavelength_count(&self) -> u32 {
        self.wavelength_count_m
    }

    pub fn bitrate_per_lambda_gbps(&self) -> f64 {
        self.bitrate_per_lambda_gbps
    }

    pub fn ring_area_um2(&self) -> f64 {
        self.ring_area_um2
    }

    pub fn channel_count(&self) -> u32 {
        self.channel_count_n
    }

    /// `m * b_r`, the rate carried by one lane.
    pub fn lane_rate_gbps(&self) -> f64 {
        self.wavelength_count_m as f64 * self.bitrate_per_lambda_gbps
    }

    /// Ring radius, treating the footprint as a disk.
    pub fn ring_radius_m(&self) -> f64 {
        (self.ring_area_um2 / std::f64::consts::PI).sqrt() * 1e-6
    }
}
