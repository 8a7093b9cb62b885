//! Brownian increments, Donsker random walks and piecewise-constant
//! approximations of white noise.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::grid::{Path, TimeGrid};
use crate::kernels::{KernelMatrix, KernelSpec};
use crate::rng::NoiseStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Gaussian,
    /// `±σ` with probability 1/2 each; bounded, so every moment is finite.
    Rademacher,
}

/// Law of the i.i.d. steps `ξ_k`: mean 0, variance `σ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDistribution {
    pub kind: StepKind,
    pub sigma: f64,
}

impl StepDistribution {
    pub const fn gaussian() -> Self {
        Self { kind: StepKind::Gaussian, sigma: 1.0 }
    }

    pub const fn rademacher() -> Self {
        Self { kind: StepKind::Rademacher, sigma: 1.0 }
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        Self { sigma, ..self }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let unit: f64 = match self.kind {
            StepKind::Gaussian => StandardNormal.sample(rng),
            StepKind::Rademacher => {
                if rng.next_u32() & 1 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        self.sigma * unit
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(invalid(format!("step standard deviation must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Independent `N(0, t_i - t_{i-1})` variates, one per grid cell.
pub fn gaussian_increments(grid: &TimeGrid, stream: NoiseStream) -> Vec<f64> {
    let mut rng = stream.rng();
    (1..=grid.cells())
        .map(|j| {
            let z: f64 = StandardNormal.sample(&mut rng);
            libm::sqrt(grid.width(j)) * z
        })
        .collect()
}

/// Brownian path on `grid` driven by [`gaussian_increments`].
pub fn brownian_path(grid: &TimeGrid, stream: NoiseStream) -> Path {
    let incs = gaussian_increments(grid, stream);
    Path::from_increments(grid.clone(), 0.0, &incs).expect("increments match the grid")
}

/// `Σ (x_i - x_{i-1})²`.
pub fn quadratic_variation(path: &Path) -> f64 {
    path.values().windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum()
}

/// Polygonal rescaled random walk `X^n(t) = (Σ_{i≤[nt]} ξ_i + (nt-[nt]) ξ_{[nt]+1}) / (σ√n)`
/// sampled at its kinks `k/n`.
///
/// The grid has `⌈nT⌉` cells of width `1/n`, so when `nT` is not an integer the
/// horizon is rounded up to the next kink. Between grid points the path is
/// exactly the linear interpolation of its kink values.
pub fn donsker_path(n: usize, horizon: f64, dist: StepDistribution, stream: NoiseStream) -> Result<Path> {
    if n == 0 {
        return Err(invalid("the Donsker walk needs n >= 1"));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    dist.validate()?;
    let nf = n as f64;
    let steps = libm::ceil(nf * horizon - 1e-9).max(1.0) as usize;
    let grid = TimeGrid::new((0..=steps).map(|k| k as f64 / nf).collect())?;
    let scale = 1.0 / (dist.sigma * libm::sqrt(nf));
    let mut rng = stream.rng();
    let mut values = Vec::with_capacity(steps + 1);
    let mut sum = 0.0;
    values.push(0.0);
    for _ in 0..steps {
        sum += dist.sample(&mut rng);
        values.push(sum * scale);
    }
    Path::new(grid, values)
}

/// Right-continuous step function on `[0, end)`: level `levels[k]` on
/// `[breakpoints[k], breakpoints[k+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    /// `levels.len() + 1` increasing points starting at 0.
    pub breakpoints: Vec<f64>,
    pub levels: Vec<f64>,
    pub end: f64,
}

impl StepFunction {
    pub fn value_at(&self, s: f64) -> f64 {
        if s < 0.0 || s >= self.end {
            return 0.0;
        }
        let k = self.breakpoints.partition_point(|&b| b <= s);
        self.levels.get(k.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    /// `∫_a^b θ(s) ds` for `0 ≤ a ≤ b`, treating the function as 0 past `end`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(0.0), b.min(self.end));
        if b <= a {
            return 0.0;
        }
        let mut k = self.breakpoints.partition_point(|&p| p <= a).saturating_sub(1);
        let mut total = 0.0;
        while k < self.levels.len() && self.breakpoints[k] < b {
            let lo = self.breakpoints[k].max(a);
            let hi = self.breakpoints[k + 1].min(b);
            if hi > lo {
                total += self.levels[k] * (hi - lo);
            }
            k += 1;
        }
        total
    }

    /// Average of the function over every cell of `grid`.
    pub fn cell_averages(&self, grid: &TimeGrid) -> Vec<f64> {
        let p = grid.points();
        (1..=grid.cells())
            .map(|j| self.integral(p[j - 1], p[j]) / grid.width(j))
            .collect()
    }
}

/// Piecewise-constant white-noise approximation on `[0, T]`: level `ξ_k / ε`
/// on `[(k-1)ε², kε²)`.
///
/// The `1/ε` amplitude gives `Var ∫_0^{kε²} θ_ε = kε²`, so the running
/// integral is a rescaled random walk converging to Brownian motion.
pub fn theta_epsilon_path(
    epsilon: f64,
    horizon: f64,
    dist: StepDistribution,
    stream: NoiseStream,
) -> Result<StepFunction> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(invalid(format!("horizon must be positive, got {horizon}")));
    }
    dist.validate()?;
    let width = epsilon * epsilon;
    let count = libm::ceil(horizon / width - 1e-9).max(1.0) as usize;
    let mut rng = stream.rng();
    let levels = (0..count).map(|_| dist.sample(&mut rng) / epsilon).collect();
    let breakpoints = (0..=count).map(|k| k as f64 * width).collect();
    Ok(StepFunction { breakpoints, levels, end: horizon })
}

/// `t ↦ ∫_0^t K_H(t,s) θ(s) ds` on every grid point for a given step function,
/// using the kernel quadrature applied to the exact cell averages of `θ`.
pub fn volterra_of_step(matrix: &KernelMatrix, theta: &StepFunction) -> Path {
    let grid = matrix.grid();
    let values = matrix.integrate(&theta.cell_averages(grid));
    Path::new(grid.clone(), values).expect("finite quadrature of finite levels")
}

/// Smoothed fBm `t ↦ ∫_0^t K_H(t,s) θ_ε(s) ds` with Rademacher steps.
pub fn smoothed_fbm(spec: &KernelSpec, epsilon: f64, grid: &TimeGrid, stream: NoiseStream) -> Result<Path> {
    let theta = theta_epsilon_path(epsilon, grid.horizon(), StepDistribution::rademacher(), stream)?;
    Ok(volterra_of_step(&KernelMatrix::new(spec, grid), &theta))
}
