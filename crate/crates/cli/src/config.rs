//! Run configuration: one TOML file with a table per simulator module.
//!
//! ```toml
//! presets = ["memconf1", "ocm-min"]
//!
//! [workload]
//! kind = "pointer_chase"
//! footprint_bytes = 268435456
//! ```
//!
//! Presets are deep-merged in list order, then the file's own keys on top.
//! An `interconnect` table whose `kind` differs from the one underneath
//! replaces it instead of merging.

use std::fs;
use std::path::{Path, PathBuf};

use ocmsim_core::memory_timing::{DdrTimingParams, DramGeometry, InterconnectModel, LockstepGroup};
use ocmsim_core::photonic_link::{CalibrationParams, PhotonicDeviceParams};
use ocmsim_core::sim_core::{DramCacheConfig, HierarchyConfig, SimConfig};
use ocmsim_core::workloads::SyntheticWorkloadSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::presets::PresetStore;
use crate::sweep::{LinkSweepSpec, SweepSpec};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Trace file to replay; exclusive with `workload`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    /// CSV destination when `--out` is not given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub hierarchy: HierarchyConfig,
    pub interconnect: InterconnectModel,
    pub ddr: DdrTimingParams,
    pub lockstep: LockstepGroup,
    pub memory: DramGeometry,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dram_cache: Option<DramCacheConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workload: Option<SyntheticWorkloadSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link_sweep: Option<LinkSweepSpec>,
    pub photonic: PhotonicDeviceParams,
    pub calibration: CalibrationParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self {
            trace: None,
            output: None,
            hierarchy: sim.hierarchy,
            interconnect: sim.interconnect,
            ddr: sim.ddr,
            lockstep: sim.lockstep,
            memory: sim.memory,
            dram_cache: sim.dram_cache,
            workload: None,
            sweep: None,
            link_sweep: None,
            photonic: PhotonicDeviceParams::default(),
            calibration: CalibrationParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WorkloadSource {
    Synthetic(SyntheticWorkloadSpec),
    Trace(PathBuf),
}

impl RunConfig {
    /// Reads `path`, resolving presets through `store` and a relative
    /// `trace` against the config file's directory.
    pub fn load(path: &Path, store: &PresetStore) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::parse(&text, store)?;
        if let (Some(trace), Some(dir)) = (&cfg.trace, path.parent()) {
            if trace.is_relative() {
                cfg.trace = Some(dir.join(trace));
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str, store: &PresetStore) -> Result<Self, CliError> {
        let mut doc: Table = text.parse().map_err(|e| CliError::Config(format!("{e}")))?;
        let mut merged = Table::new();
        for name in preset_names(doc.remove("presets"))? {
            let preset: Table = store
                .load(&name)?
                .parse()
                .map_err(|e| CliError::Config(format!("preset `{name}`: {e}")))?;
            if preset.contains_key("presets") {
                return Err(CliError::Config(format!("preset `{name}` may not list further presets")));
            }
            deep_merge(&mut merged, preset);
        }
        deep_merge(&mut merged, doc);
        let cfg: RunConfig = Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trace.is_some() && self.workload.is_some() {
            return Err(CliError::Config(
                "both `workload` and `trace` are set; give exactly one workload source".into(),
            ));
        }
        if let Some(spec) = &self.workload {
            spec.validate()?;
        }
        self.sim_config().validate()?;
        Ok(())
    }

    pub fn workload_source(&self) -> Result<WorkloadSource, CliError> {
        match (&self.workload, &self.trace) {
            (Some(spec), None) => Ok(WorkloadSource::Synthetic(spec.clone())),
            (None, Some(path)) => Ok(WorkloadSource::Trace(path.clone())),
            (Some(_), Some(_)) => Err(CliError::Config(
                "both `workload` and `trace` are set; give exactly one workload source".into(),
            )),
            (None, None) => Err(CliError::Config("no workload source: set a `[workload]` table or `trace`".into())),
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            hierarchy: self.hierarchy,
            interconnect: self.interconnect,
            ddr: self.ddr,
            lockstep: self.lockstep,
            memory: self.memory,
            dram_cache: self.dram_cache,
        }
    }

    /// Replaces the synthetic workload seed; trace sources are unaffected.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let (Some(seed), Some(spec)) = (seed, &mut self.workload) {
            spec.seed = seed;
        }
        self
    }

    /// The fully resolved config as TOML, presets already applied.
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("cannot serialise config: {e}")))
    }

    /// SHA-256 of [`RunConfig::to_toml`], hex encoded.
    pub fn hash(&self) -> Result<String, CliError> {
        Ok(sha256_hex(self.to_toml()?.as_bytes()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Short hash of one simulator configuration, used to key CSV rows.
pub fn sim_config_hash(cfg: &SimConfig) -> String {
    let text = toml::to_string(cfg).unwrap_or_else(|_| format!("{cfg:?}"));
    sha256_hex(text.as_bytes())[..16].to_string()
}

fn preset_names(v: Option<Value>) -> Result<Vec<String>, CliError> {
    let bad = || CliError::Config("`presets` must be a list of preset names".into());
    match v {
        None => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .into_iter()
            .map(|i| match i {
                Value::String(s) => Ok(s),
                _ => Err(bad()),
            })
            .collect(),
        Some(_) => Err(bad()),
    }
}

pub fn deep_merge(base: &mut Table, top: Table) {
    for (key, value) in top {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(t)) if b.get("kind") == t.get("kind") || t.get("kind").is_none() => {
                deep_merge(b, t)
            }
            (_, value) => {
                base.insert(key, value);
            }
        }
    }
}
