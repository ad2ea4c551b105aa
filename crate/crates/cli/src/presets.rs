//! Named configuration fragments merged under a config file.
//!
//! The built-in set is compiled into the binary. Setting
//! [`PRESET_DIR_ENV`] replaces it with `<dir>/<name>.toml` lookups.

use std::env;
use std::fs;
use std::path::PathBuf;

use crate::CliError;

pub const PRESET_DIR_ENV: &str = "OCMSIM_PRESET_DIR";

macro_rules! preset {
    ($name:literal) => {
        ($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets/", $name, ".toml")))
    };
}

const BUILTIN: &[(&str, &str)] = &[
    preset!("memconf1"),
    preset!("memconf2"),
    preset!("ocm-min"),
    preset!("ocm-mid"),
    preset!("ocm-max"),
    preset!("nic40g"),
];

#[derive(Debug, Clone, Default)]
pub struct PresetStore {
    dir: Option<PathBuf>,
}

impl PresetStore {
    pub fn builtin() -> Self {
        Self { dir: None }
    }

    pub fn from_dir(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    /// Honours `OCMSIM_PRESET_DIR` when it is set.
    pub fn from_env() -> Self {
        Self { dir: env::var_os(PRESET_DIR_ENV).map(PathBuf::from) }
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(n, _)| *n)
    }

    pub fn load(&self, name: &str) -> Result<String, CliError> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(format!("{name}.toml"));
                fs::read_to_string(&path).map_err(|e| {
                    CliError::Config(format!("preset `{name}` not found at {}: {e}", path.display()))
                })
            }
            None => BUILTIN
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, text)| text.to_string())
                .ok_or_else(|| {
                    let known: Vec<_> = Self::builtin_names().collect();
                    CliError::Config(format!("unknown preset `{name}` (known: {})", known.join(", ")))
                }),
        }
    }
}
