//! Optional JSON configuration file. Every key is optional; a value given on
//! the command line replaces the file's value.
//!
//! ```json
//! { "hurst": 0.7, "ah": 1.0, "mass": 1.0, "friction": 2.0, "sigma": 0.5,
//!   "v0": 1.0, "horizon": 1.0, "steps": 1024, "paths": 1, "seed": 42,
//!   "t_min": 16, "method": "exact", "out": "path.csv", "increments": true }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Cholesky factor of the exact covariance matrix.
    #[default]
    Exact,
    /// Volterra-kernel quadrature against Brownian increments.
    Kernel,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub hurst: Option<f64>,
    #[serde(alias = "a_h")]
    pub ah: Option<f64>,
    pub mass: Option<f64>,
    pub friction: Option<f64>,
    pub sigma: Option<f64>,
    pub v0: Option<f64>,
    #[serde(alias = "T")]
    pub horizon: Option<f64>,
    #[serde(alias = "n")]
    pub steps: Option<usize>,
    pub paths: Option<usize>,
    pub seed: Option<u64>,
    pub t_min: Option<usize>,
    pub method: Option<Method>,
    pub out: Option<PathBuf>,
    pub increments: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The flag if given, else the file value, else `default`.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
