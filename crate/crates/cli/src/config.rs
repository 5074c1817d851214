use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use stiefel_core::Tolerances;

use crate::error::CliError;

pub const CONFIG_ENV: &str = "STIEFEL_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tolerances: Tolerances,
    pub n: usize,
    pub p: usize,
    pub samples: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub format: Format,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            n: 4,
            p: 2,
            samples: 1000,
            seed: 42,
            output_dir: PathBuf::from("."),
            format: Format::Json,
        }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let cfg = match path {
            None => Config::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.tolerances
            .validate()
            .map_err(|e| CliError::Precondition(format!("config: {e}")))?;
        if self.p == 0 || self.p > self.n {
            return Err(CliError::Precondition(format!(
                "config: need 1 <= p <= n, got n = {}, p = {}",
                self.n, self.p
            )));
        }
        Ok(())
    }
}
