//! Built-in diagnostics run by `validate`.

use anyhow::Result;
use serde::Serialize;

use fraclangevin_core::fractional::transformed_langevin_residual;
use fraclangevin_core::kernels::verify_covariance_identity;
use fraclangevin_core::langevin::{simulate_ou_em, LangevinParams};
use fraclangevin_core::noise::{brownian_path, donsker_path, gaussian_increments, quadratic_variation, StepDistribution};
use fraclangevin_core::stats::ks_distance_normal;
use fraclangevin_core::{KernelSpec, NoiseStream, Regime, TimeGrid};

use crate::args::Check;

/// Stream indices at or above this value are reserved for single-path checks,
/// below it for the Donsker samples.
const SINGLE_PATH_STREAMS: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSettings {
    pub steps: Option<usize>,
    pub horizon: Option<f64>,
    pub paths: usize,
    pub seed: u64,
    pub hurst: f64,
}

pub fn run_check(check: Check, s: &CheckSettings) -> Result<CheckOutcome> {
    match check {
        Check::Covariance => covariance(s.steps.unwrap_or(4096)),
        Check::Qv => qv(s.steps.unwrap_or(100_000), s.horizon.unwrap_or(2.0), s.seed),
        Check::Donsker => donsker(s.steps.unwrap_or(10_000), s.horizon.unwrap_or(1.0), s.paths, s.seed),
        Check::Residual => residual(s.hurst, s.steps.unwrap_or(4096), s.horizon.unwrap_or(1.0), s.seed),
    }
}

/// Residuals at `n` and `4n` cells for every (H, s, t) pair; passes when all
/// residuals at `n` are within tolerance and all shrink at `4n`.
fn covariance(n: usize) -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut passed = true;
    for &h in &[0.25, 0.3, 0.7, 0.75] {
        let spec = KernelSpec::new(h)?;
        let tol = if spec.regime() == Regime::AboveHalf { 1e-2 } else { 2e-2 };
        for &(s, t) in &[(1.0, 1.0), (0.5, 1.0), (1.0, 2.0)] {
            let coarse = verify_covariance_identity(&spec, s, t, n)?;
            let fine = verify_covariance_identity(&spec, s, t, 4 * n)?;
            passed &= coarse <= tol && fine < coarse;
            worst = worst.max(coarse / tol);
            worst_ratio = worst_ratio.max(fine / coarse);
        }
    }
    Ok(CheckOutcome {
        name: "covariance",
        passed,
        value: worst,
        tolerance: 1.0,
        detail: format!(
            "largest residual/tolerance {worst:.3e} at n = {n}; largest residual ratio (4n vs n) {worst_ratio:.3}"
        ),
    })
}

fn qv(n: usize, horizon: f64, seed: u64) -> Result<CheckOutcome> {
    let grid = TimeGrid::uniform(horizon, n)?;
    let path = brownian_path(&grid, NoiseStream::new(seed, SINGLE_PATH_STREAMS));
    let q = quadratic_variation(&path);
    let tolerance = 0.025 * horizon;
    Ok(CheckOutcome {
        name: "qv",
        passed: (q - horizon).abs() <= tolerance,
        value: (q - horizon).abs(),
        tolerance,
        detail: format!("QV = {q:.6} against T = {horizon} with n = {n}"),
    })
}

fn donsker(n: usize, horizon: f64, samples: usize, seed: u64) -> Result<CheckOutcome> {
    let mut ends = Vec::with_capacity(samples);
    let mut reached = horizon;
    for k in 0..samples {
        let path = donsker_path(n, horizon, StepDistribution::rademacher(), NoiseStream::new(seed, k as u64))?;
        reached = path.grid().horizon();
        ends.push(*path.values().last().expect("nonempty path"));
    }
    let ks = ks_distance_normal(&ends, 0.0, reached);
    Ok(CheckOutcome {
        name: "donsker",
        passed: ks <= 0.05,
        value: ks,
        tolerance: 0.05,
        detail: format!("KS distance of X^n({reached}) to N(0, {reached}) over {samples} samples, n = {n}"),
    })
}

fn residual(hurst: f64, n: usize, horizon: f64, seed: u64) -> Result<CheckOutcome> {
    let spec = KernelSpec::new(hurst)?;
    let params = LangevinParams::new(1.0, 2.0, 0.5, 1.0)?;
    let grid = TimeGrid::uniform(horizon, n)?;
    let incs = gaussian_increments(&grid, NoiseStream::new(seed, SINGLE_PATH_STREAMS + 1));
    let v = simulate_ou_em(&params, &grid, &incs)?;
    let r = transformed_langevin_residual(&spec, &params, &v, &incs)?.normalized_max(params.sigma);
    Ok(CheckOutcome {
        name: "residual",
        passed: r <= 0.05,
        value: r,
        tolerance: 0.05,
        detail: format!("max |r(t)| / (sigma max |B^H|) with H = {hurst}, m = 1, b = 2, sigma = 0.5, n = {n}"),
    })
}
