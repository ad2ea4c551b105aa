//! Round-trip latency of a remote line fetch, term by term.

use serde::{Deserialize, Serialize};

use super::TimingError;

/// Link setup is paid once at configuration time, never per access.
pub const T_SETUP_CYCLES: f64 = 0.0;

/// SERDES latency presets, core cycles.
pub const SERDES_PRESETS_CYCLES: [f64; 3] = [10.0, 150.0, 340.0];

/// Fiber length presets, meters travelled per round trip.
pub const ROUNDTRIP_PRESETS_M: [f64; 3] = [2.0, 4.0, 6.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OcmLatencyParams {
    pub t_contr_cycles: f64,
    pub t_serdes_cycles: f64,
    pub t_mod_cycles: f64,
    pub t_demod_cycles: f64,
    /// One-way fiber length.
    pub distance_m: f64,
    pub propagation_ns_per_m: f64,
    pub core_ghz: f64,
}

impl Default for OcmLatencyParams {
    fn default() -> Self {
        Self {
            t_contr_cycles: 0.0,
            t_serdes_cycles: 10.0,
            t_mod_cycles: 0.0,
            t_demod_cycles: 0.0,
            distance_m: 1.0,
            propagation_ns_per_m: 5.0,
            core_ghz: 3.0,
        }
    }
}

impl OcmLatencyParams {
    /// A SERDES preset over a fiber quoted as round-trip meters.
    pub fn preset(serdes_cycles: f64, roundtrip_m: f64) -> Self {
        Self {
            t_serdes_cycles: serdes_cycles,
            distance_m: roundtrip_m / 2.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), TimingError> {
        let nonneg = [
            ("t_contr_cycles", self.t_contr_cycles),
            ("t_serdes_cycles", self.t_serdes_cycles),
            ("t_mod_cycles", self.t_mod_cycles),
            ("t_demod_cycles", self.t_demod_cycles),
            ("distance_m", self.distance_m),
            ("propagation_ns_per_m", self.propagation_ns_per_m),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(TimingError::Invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        validate_clock(self.core_ghz)
    }

    pub fn roundtrip_m(&self) -> f64 {
        2.0 * self.distance_m
    }

    pub fn t_dist_cycles(&self) -> f64 {
        self.roundtrip_m() * self.propagation_ns_per_m * self.core_ghz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NicParams {
    pub fixed_cycles: f64,
    pub core_ghz: f64,
}

impl Default for NicParams {
    /// 40G PCIe NIC.
    fn default() -> Self {
        Self { fixed_cycles: 1050.0, core_ghz: 3.0 }
    }
}

impl NicParams {
    pub fn validate(&self) -> Result<(), TimingError> {
        if !(self.fixed_cycles > 0.0 && self.fixed_cycles.is_finite()) {
            return Err(TimingError::Invalid(format!(
                "nic fixed_cycles must be positive, got {}",
                self.fixed_cycles
            )));
        }
        validate_clock(self.core_ghz)
    }
}

fn validate_clock(ghz: f64) -> Result<(), TimingError> {
    if ghz > 0.0 && ghz.is_finite() {
        Ok(())
    } else {
        Err(TimingError::Invalid(format!("core_ghz must be positive, got {ghz}")))
    }
}

/// How an L3 miss reaches main memory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterconnectModel {
    #[serde(alias = "local_electrical")]
    Local,
    #[serde(alias = "ocm_optical")]
    Ocm(OcmLatencyParams),
    Nic(NicParams),
}

impl InterconnectModel {
    pub fn validate(&self) -> Result<(), TimingError> {
        match self {
            Self::Local => Ok(()),
            Self::Ocm(p) => p.validate(),
            Self::Nic(p) => p.validate(),
        }
    }

    /// Clock the model's cycle counts refer to; `None` for a local path.
    pub fn core_ghz(&self) -> Option<f64> {
        match self {
            Self::Local => None,
            Self::Ocm(p) => Some(p.core_ghz),
            Self::Nic(p) => Some(p.core_ghz),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Local => "local",
            Self::Ocm(_) => "ocm",
            Self::Nic(_) => "nic",
        }
    }

    pub fn round_trip(&self, t_mem_ns: f64, core_ghz: f64) -> LatencyBreakdown {
        match self {
            Self::Local => local_round_trip(t_mem_ns, core_ghz),
            Self::Ocm(p) => ocm_round_trip(p, t_mem_ns),
            Self::Nic(p) => nic_round_trip(p, t_mem_ns),
        }
    }
}

/// Latency terms of one round trip, core cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyBreakdown {
    pub core_ghz: f64,
    pub setup: f64,
    pub contr: f64,
    pub mem: f64,
    pub serdes: f64,
    pub modulation: f64,
    pub demodulation: f64,
    pub dist: f64,
    pub nic: f64,
    /// Sum of the terms, in the order of [`LatencyBreakdown::terms`].
    pub total_cycles: f64,
}

impl LatencyBreakdown {
    fn from_terms(core_ghz: f64, t: [f64; 8]) -> Self {
        let total_cycles = t.iter().sum();
        Self {
            core_ghz,
            setup: t[0],
            contr: t[1],
            mem: t[2],
            serdes: t[3],
            modulation: t[4],
            demodulation: t[5],
            dist: t[6],
            nic: t[7],
            total_cycles,
        }
    }

    pub fn terms(&self) -> [(&'static str, f64); 8] {
        [
            ("setup", self.setup),
            ("contr", self.contr),
            ("mem", self.mem),
            ("serdes", self.serdes),
            ("mod", self.modulation),
            ("demod", self.demodulation),
            ("dist", self.dist),
            ("nic", self.nic),
        ]
    }

    pub fn total_ns(&self) -> f64 {
        self.total_cycles / self.core_ghz
    }

    pub fn term_ns(&self, cycles: f64) -> f64 {
        cycles / self.core_ghz
    }
}

pub fn local_round_trip(t_mem_ns: f64, core_ghz: f64) -> LatencyBreakdown {
    LatencyBreakdown::from_terms(core_ghz, [0.0, 0.0, t_mem_ns * core_ghz, 0.0, 0.0, 0.0, 0.0, 0.0])
}

/// `T_setup + T_contr + T_mem + T_serdes + T_mod + T_demod + T_dist`.
pub fn ocm_round_trip(p: &OcmLatencyParams, t_mem_ns: f64) -> LatencyBreakdown {
    LatencyBreakdown::from_terms(
        p.core_ghz,
        [
            T_SETUP_CYCLES,
            p.t_contr_cycles,
            t_mem_ns * p.core_ghz,
            p.t_serdes_cycles,
            p.t_mod_cycles,
            p.t_demod_cycles,
            p.t_dist_cycles(),
            0.0,
        ],
    )
}

pub fn nic_round_trip(p: &NicParams, t_mem_ns: f64) -> LatencyBreakdown {
    LatencyBreakdown::from_terms(
        p.core_ghz,
        [0.0, 0.0, t_mem_ns * p.core_ghz, 0.0, 0.0, 0.0, 0.0, p.fixed_cycles],
    )
}
