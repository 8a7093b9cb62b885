//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Method;

#[derive(Debug, Parser)]
#[command(name = "fraclangevin", version, about = "Fractional Brownian motion, fractional Langevin velocities and Hurst estimation")]
pub struct Cli {
    /// JSON file with parameter values; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample fractional Brownian motion paths on a uniform grid (CSV: t, BH...).
    SimulateFbm(SimulateFbmArgs),
    /// Sample an Ornstein-Uhlenbeck velocity and its fractional transform (CSV: t, V, VH).
    SimulateVelocity(SimulateVelocityArgs),
    /// Estimate the Hurst index of every data column of a CSV file by R/S analysis.
    EstimateHurst(EstimateHurstArgs),
    /// Estimate the amplitude A_H from observed fractional velocities and a velocity path.
    EstimateAh(EstimateAhArgs),
    /// Run the built-in numerical diagnostics and report pass/fail per check.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    /// Time horizon T of the grid [0, T] (default 1).
    #[arg(long, alias = "T", value_name = "T", value_parser = positive)]
    pub horizon: Option<f64>,

    /// Number of grid cells n (default 1024).
    #[arg(long, alias = "n", value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: Option<u64>,

    /// Number of independent paths, one CSV column each (default 1).
    #[arg(long, value_name = "M", value_parser = clap::value_parser!(u64).range(1..))]
    pub paths: Option<u64>,

    /// Seed of the random streams; path k uses stream k. Required.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output CSV file (default: standard output).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Report {
    /// Sample variance of B^H(T) across paths, with its standard error.
    Variance,
}

#[derive(Debug, Args)]
pub struct SimulateFbmArgs {
    /// Hurst index in (0, 1).
    #[arg(long, value_name = "H", value_parser = hurst)]
    pub hurst: Option<f64>,

    #[command(flatten)]
    pub grid: GridArgs,

    /// Sampling method (default exact).
    #[arg(long, value_enum)]
    pub method: Option<Method>,

    /// Print a summary statistic to standard error.
    #[arg(long, value_enum)]
    pub report: Option<Report>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Hurst index in (0, 1); 0.5 emits the velocity only.
    #[arg(long, value_name = "H", value_parser = hurst)]
    pub hurst: Option<f64>,

    /// Amplitude A_H of the normalization t^(1/2-H) (default 1).
    #[arg(long, value_name = "A", value_parser = finite)]
    pub ah: Option<f64>,

    /// Mass m > 0 (default 1).
    #[arg(long, value_parser = positive)]
    pub mass: Option<f64>,

    /// Friction b >= 0 (default 1).
    #[arg(long, value_parser = nonnegative)]
    pub friction: Option<f64>,

    /// Noise intensity sigma >= 0 (default 1).
    #[arg(long, value_parser = nonnegative)]
    pub sigma: Option<f64>,

    /// Initial velocity V0 (default 1).
    #[arg(long, allow_hyphen_values = true, value_parser = finite)]
    pub v0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateVelocityArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct EstimateHurstArgs {
    /// Input CSV ('-' for standard input). A leading `t` column is ignored.
    #[arg(value_name = "INPUT")]
    pub input: PathBuf,

    /// Smallest prefix length t kept in the regression (default 16, at least 2).
    #[arg(long, value_name = "T", value_parser = clap::value_parser!(u64).range(2..))]
    pub t_min: Option<u64>,

    /// Difference each column first (use this for fBm paths: R/S is meant for
    /// the stationary increment series).
    #[arg(long)]
    pub increments: bool,

    /// Analyse only this column.
    #[arg(long, value_name = "NAME")]
    pub column: Option<String>,

    /// Mean used to center each prefix (default prefix).
    #[arg(long, value_enum, value_name = "CONVENTION")]
    pub mean: Option<MeanArg>,

    /// Treat INPUT as precomputed R/S points with columns `t` and `rs` and only
    /// run the log-log regression.
    #[arg(long, conflicts_with_all = ["increments", "column", "mean", "rs_points"])]
    pub rs_table: bool,

    /// Write the R/S points (t, rs) of the first analysed column to this CSV.
    #[arg(long, value_name = "FILE")]
    pub rs_points: Option<PathBuf>,

    /// Also write the JSON report to this file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeanArg {
    /// Each prefix X_1..X_t is centered by its own mean.
    Prefix,
    /// Every prefix is centered by the mean of the whole series.
    Full,
}

#[derive(Debug, Args)]
pub struct EstimateAhArgs {
    /// CSV with the observed fractional velocity (column `VH`, else the last column).
    #[arg(value_name = "OBSERVED")]
    pub observed: PathBuf,

    /// CSV with the velocity path (column `V`, else the first data column).
    #[arg(value_name = "VELOCITY")]
    pub velocity: PathBuf,

    /// Hurst index in (0, 1), not 1/2.
    #[arg(long, value_name = "H", value_parser = hurst)]
    pub hurst: Option<f64>,

    /// Also write the JSON report to this file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Kernel covariance identity residuals for H in {0.25, 0.3, 0.7, 0.75}.
    Covariance,
    /// Quadratic variation of one Brownian path against T.
    Qv,
    /// KS distance of the Rademacher random walk at T to N(0, T).
    Donsker,
    /// Residual of the kernel-transformed Langevin equation.
    Residual,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Checks to run (repeatable; default all).
    #[arg(long, value_enum)]
    pub check: Vec<Check>,

    /// Grid size for every selected check (default per check).
    #[arg(long, alias = "n", value_name = "N", value_parser = clap::value_parser!(u64).range(16..))]
    pub steps: Option<u64>,

    /// Horizon for the qv, donsker and residual checks (default per check).
    #[arg(long, alias = "T", value_name = "T", value_parser = positive)]
    pub horizon: Option<f64>,

    /// Sample count of the donsker check (default 2000).
    #[arg(long, value_name = "M", value_parser = clap::value_parser!(u64).range(2..))]
    pub paths: Option<u64>,

    /// Seed of the random checks (default 1).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Hurst index of the residual check (default 0.7).
    #[arg(long, value_name = "H", value_parser = hurst)]
    pub hurst: Option<f64>,
}

fn number(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("'{s}' is not a number"))
}

fn finite(s: &str) -> Result<f64, String> {
    let x = number(s)?;
    if x.is_finite() { Ok(x) } else { Err("the value must be finite".into()) }
}

pub fn hurst(s: &str) -> Result<f64, String> {
    let h = number(s)?;
    if h > 0.0 && h < 1.0 {
        Ok(h)
    } else {
        Err(format!("the Hurst index must lie in the open interval (0, 1), got {h}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x = finite(s)?;
    if x > 0.0 { Ok(x) } else { Err(format!("must be positive, got {x}")) }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    let x = finite(s)?;
    if x >= 0.0 { Ok(x) } else { Err(format!("must be nonnegative, got {x}")) }
}
