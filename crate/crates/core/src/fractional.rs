//! Fractional velocity `V^H_t = V_0 + Φ_H(t) ∫_0^t K_H(t,s) V_s ds` with
//! `Φ_H(t) = A_H t^(1/2-H)`, the estimator of the amplitude `A_H`, and a
//! pathwise check of the kernel-transformed Langevin equation
//! `m ∫ K_H(t,s) dV_s = -b ∫ K_H(t,s) V_s ds + σ B^H_t`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::grid::{Path, TimeGrid};
use crate::kernels::{dot, kernel_weights, row_weights, KernelMatrix, KernelSpec};
use crate::langevin::LangevinParams;

/// Kernel regime plus the amplitude `A_H` of the normalization `Φ_H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalConfig {
    pub spec: KernelSpec,
    pub amplitude: f64,
}

impl FractionalConfig {
    pub fn new(spec: KernelSpec, amplitude: f64) -> Result<Self> {
        if spec.is_standard() {
            return Err(invalid("the fractional velocity needs H != 1/2"));
        }
        if !amplitude.is_finite() {
            return Err(invalid(format!("amplitude must be finite, got {amplitude}")));
        }
        Ok(Self { spec, amplitude })
    }
}

/// `Φ_H(t) = A_H t^(1/2-H)` for `t > 0`.
pub fn phi(config: &FractionalConfig, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("Φ_H needs t > 0, got {t}")));
    }
    Ok(config.amplitude * libm::pow(t, 0.5 - config.spec.hurst()))
}

/// An ordinary velocity path and its fractional transform on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalPath {
    pub base: Path,
    pub transformed: Path,
}

fn same_grid(a: &TimeGrid, b: &TimeGrid) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let tol = 1e-12 * a.horizon();
    a.points().iter().zip(b.points()).all(|(x, y)| (x - y).abs() <= tol)
}

/// Fractional transform with the quadrature weights of one grid precomputed,
/// for repeated use over many paths.
#[derive(Debug, Clone)]
pub struct FractionalTransform {
    config: FractionalConfig,
    matrix: KernelMatrix,
}

impl FractionalTransform {
    pub fn new(config: FractionalConfig, grid: &TimeGrid) -> Self {
        Self { config, matrix: KernelMatrix::new(&config.spec, grid) }
    }

    pub fn config(&self) -> &FractionalConfig {
        &self.config
    }

    pub fn matrix(&self) -> &KernelMatrix {
        &self.matrix
    }

    fn check(&self, v: &Path) -> Result<()> {
        if !same_grid(v.grid(), self.matrix.grid()) {
            return Err(invalid("velocity path is not sampled on the transform grid"));
        }
        Ok(())
    }

    /// `f_H(t_i) = ∫_0^{t_i} K_H(t_i, s) V_s ds` with `V` linearly interpolated
    /// at the cell midpoints. The entry for `t_0 = 0` is 0.
    pub fn kernel_integrals(&self, v: &Path) -> Result<Vec<f64>> {
        self.check(v)?;
        Ok(self.matrix.integrate(&v.cell_midvalues()))
    }

    pub fn apply(&self, v: &Path) -> Result<FractionalPath> {
        let integrals = self.kernel_integrals(v)?;
        let v0 = v.values()[0];
        let points = v.grid().points();
        let mut transformed = Vec::with_capacity(points.len());
        transformed.push(v0);
        for i in 1..points.len() {
            transformed.push(v0 + phi(&self.config, points[i])? * integrals[i]);
        }
        Ok(FractionalPath { base: v.clone(), transformed: Path::new(v.grid().clone(), transformed)? })
    }
}

/// `V^H` at every grid point; `V^H(0) = V_0` by continuity.
pub fn fractional_velocity(config: &FractionalConfig, v: &Path) -> Result<FractionalPath> {
    FractionalTransform::new(*config, v.grid()).apply(v)
}

/// `E V^H_t = E V_0 (1 + Φ_H(t) ∫_0^t K_H(t,s) e^{-(b/m)s} ds)` with the kernel
/// quadrature on `n` uniform cells of `[0, t]`.
pub fn expected_fractional_velocity(
    config: &FractionalConfig,
    params: &LangevinParams,
    t: f64,
    n: usize,
) -> Result<f64> {
    params.validate()?;
    if n < 16 {
        return Err(invalid(format!("expected fractional velocity needs n >= 16 cells, got {n}")));
    }
    let scale = phi(config, t)?;
    let grid = TimeGrid::uniform(t, n)?;
    let rule = kernel_weights(&config.spec, t, &grid)?;
    let k = params.rate();
    let decay: Vec<f64> = rule.nodes.iter().map(|&s| libm::exp(-k * s)).collect();
    Ok(params.v0_mean * (1.0 + scale * rule.apply(&decay)))
}

/// Residual of the transformed Langevin equation along one path, together
/// with the fBm `B^H` synthesized from the same increments.
#[derive(Debug, Clone, PartialEq)]
pub struct LangevinResidual {
    pub residual: Path,
    pub fbm: Path,
}

impl LangevinResidual {
    /// `max_t |r(t)| / (σ max_t |B^H_t|)`.
    pub fn normalized_max(&self, sigma: f64) -> f64 {
        let r = self.residual.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let b = self.fbm.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        r / (sigma * b)
    }
}

/// `r(t) = m Σ_j k_j ΔV_j + b Σ_j w_j V(m_j) - σ Σ_j k_j ΔB_j` at every grid point,
/// where `w_j` are the kernel weights and `k_j = w_j / Δ_j` the per-cell kernel
/// values, the same discretization [`crate::fbm::KernelSampler`] uses for `B^H`.
///
/// For a velocity path from [`crate::langevin::simulate_ou_em`] on the same
/// increments the residual is a pure discretization error.
pub fn transformed_langevin_residual(
    spec: &KernelSpec,
    params: &LangevinParams,
    v: &Path,
    brownian_increments: &[f64],
) -> Result<LangevinResidual> {
    let mut out = transformed_langevin_residuals(spec, params, &[(v, brownian_increments)])?;
    Ok(out.pop().expect("one run in, one residual out"))
}

/// Batch version of [`transformed_langevin_residual`] for runs sharing one grid.
/// Each quadrature row is computed once and applied to every run, so memory
/// stays linear in the grid size.
pub fn transformed_langevin_residuals(
    spec: &KernelSpec,
    params: &LangevinParams,
    runs: &[(&Path, &[f64])],
) -> Result<Vec<LangevinResidual>> {
    params.validate()?;
    let Some((first, _)) = runs.first() else {
        return Ok(Vec::new());
    };
    let grid = first.grid().clone();
    let cells = grid.cells();
    for (v, incs) in runs {
        if !same_grid(v.grid(), &grid) {
            return Err(invalid("all runs must share one grid"));
        }
        if incs.len() != cells {
            return Err(invalid(format!(
                "{} increments supplied for a path with {} cells",
                incs.len(),
                cells
            )));
        }
    }
    let widths: Vec<f64> = (1..=cells).map(|j| grid.width(j)).collect();
    let prepared: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = runs
        .iter()
        .map(|(v, incs)| {
            let dv: Vec<f64> = v.increments().iter().zip(&widths).map(|(d, w)| d / w).collect();
            let db: Vec<f64> = incs.iter().zip(&widths).map(|(d, w)| d / w).collect();
            (dv, db, v.cell_midvalues())
        })
        .collect();

    let mut residuals: Vec<Vec<f64>> = runs.iter().map(|_| alloc::vec![0.0]).collect();
    let mut fbms: Vec<Vec<f64>> = runs.iter().map(|_| alloc::vec![0.0]).collect();
    let mut row = Vec::with_capacity(cells);
    for i in 1..=cells {
        row_weights(spec, &grid, i, &mut row);
        for (k, (dv, db, mid)) in prepared.iter().enumerate() {
            let lhs = params.mass * dot(&row, &dv[..i]);
            let bh = dot(&row, &db[..i]);
            let rhs = -params.friction * dot(&row, &mid[..i]) + params.sigma * bh;
            residuals[k].push(lhs - rhs);
            fbms[k].push(bh);
        }
    }
    residuals
        .into_iter()
        .zip(fbms)
        .map(|(r, b)| {
            Ok(LangevinResidual { residual: Path::new(grid.clone(), r)?, fbm: Path::new(grid.clone(), b)? })
        })
        .collect()
}

/// Amplitude estimate with the per-time ratios it averages.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeEstimate {
    pub amplitude: f64,
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// `Â_H = (1/n) Σ_i t_i^(H-1/2) (V̂^H_{t_i} - V_0) / ∫_0^{t_i} K_H(t_i,s) V_s ds`
/// over the positive grid points, with `V_0 = v(0)`.
///
/// A denominator whose magnitude is below `1e-12` times the quadrature of
/// `|K_H| |V|` at the same time is rejected as degenerate.
pub fn estimate_ah(spec: &KernelSpec, observed: &Path, v: &Path) -> Result<AmplitudeEstimate> {
    if spec.is_standard() {
        return Err(invalid("amplitude estimation needs H != 1/2"));
    }
    if !same_grid(observed.grid(), v.grid()) {
        return Err(invalid("observed and velocity paths must share one grid"));
    }
    let grid = v.grid();
    let v0 = v.values()[0];
    let mid = v.cell_midvalues();
    let abs_mid: Vec<f64> = mid.iter().map(|x| x.abs()).collect();
    let exponent = spec.hurst() - 0.5;
    let mut row = Vec::with_capacity(grid.cells());
    let mut times = Vec::with_capacity(grid.cells());
    let mut ratios = Vec::with_capacity(grid.cells());
    for i in 1..=grid.cells() {
        let t = grid.points()[i];
        row_weights(spec, grid, i, &mut row);
        let denom = dot(&row, &mid[..i]);
        let scale: f64 = row.iter().zip(&abs_mid[..i]).map(|(w, x)| w.abs() * x).sum();
        if !(denom.abs() > 1e-12 * scale) {
            return Err(Error::DegenerateDenominator { time: t });
        }
        times.push(t);
        ratios.push(libm::pow(t, exponent) * (observed.values()[i] - v0) / denom);
    }
    let amplitude = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(AmplitudeEstimate { amplitude, times, ratios })
}
