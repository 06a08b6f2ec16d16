use std::time::Instant;

use serde::de::DeserializeOwned;

use crate::error::CliError;
use crate::output::OutDir;

pub mod hessian;
pub mod minimize;
pub mod report;
pub mod sample;
pub mod simulate;
pub mod stationary;
mod table;

/// Shared state handed to every command.
pub struct Ctx {
    pub out: OutDir,
    pub seed: Option<u64>,
    pub started: Instant,
    /// Seed actually used, recorded in the manifest.
    pub seed_used: u64,
}

impl Ctx {
    /// Exit 4 once the wall-clock budget is spent. Checked after each stage,
    /// so outputs written so far stay on disk.
    pub fn check_budget(&self, budget: Option<f64>) -> Result<(), CliError> {
        match budget {
            Some(b) => {
                let elapsed = self.started.elapsed().as_secs_f64();
                if elapsed > b {
                    Err(CliError::Budget { elapsed, budget: b })
                } else {
                    Ok(())
                }
            }
            None => Ok(()),
        }
    }

    pub fn pick_seed(&mut self, from_config: Option<u64>) -> u64 {
        self.seed_used = self.seed.or(from_config).unwrap_or(0);
        self.seed_used
    }
}

pub fn parse<T: DeserializeOwned>(value: &serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(value.clone()).map_err(|e| CliError::Invalid(e.to_string()))
}

pub fn check_budget_field(b: Option<f64>) -> Result<(), CliError> {
    match b {
        Some(v) if !(v > 0.0 && v.is_finite()) => Err(CliError::Invalid("max_seconds must be positive".into())),
        _ => Ok(()),
    }
}
