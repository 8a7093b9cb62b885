//! The velocity Langevin equation `m dV = -b V dt + σ dB` and its
//! Ornstein-Uhlenbeck solution `V_t = e^{-(b/m)t} V_0 + (σ/m) ∫_0^t e^{-(b/m)(t-s)} dB_s`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::{Path, TimeGrid};
use crate::rng::NoiseStream;

/// Mass `m`, friction `b`, noise intensity `σ` and the initial velocity law.
///
/// Simulations start from `v0_mean`; `v0_var` only enters the variance
/// bookkeeping of [`ou_variance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinParams {
    pub mass: f64,
    pub friction: f64,
    pub sigma: f64,
    pub v0_mean: f64,
    pub v0_var: f64,
}

impl LangevinParams {
    pub fn new(mass: f64, friction: f64, sigma: f64, v0: f64) -> Result<Self> {
        let p = Self { mass, friction, sigma, v0_mean: v0, v0_var: 0.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn with_initial_variance(self, v0_var: f64) -> Result<Self> {
        let p = Self { v0_var, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(invalid(format!("mass must be positive, got {}", self.mass)));
        }
        // b = 0 is admitted (free diffusion).
        if !(self.friction >= 0.0) || !self.friction.is_finite() {
            return Err(invalid(format!("friction must be nonnegative, got {}", self.friction)));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(invalid(format!("sigma must be nonnegative, got {}", self.sigma)));
        }
        if !self.v0_mean.is_finite() {
            return Err(invalid("initial velocity must be finite"));
        }
        if !(self.v0_var >= 0.0) || !self.v0_var.is_finite() {
            return Err(invalid(format!("initial variance must be nonnegative, got {}", self.v0_var)));
        }
        Ok(())
    }

    /// Relaxation rate `b / m`.
    pub fn rate(&self) -> f64 {
        self.friction / self.mass
    }

    /// Stationary variance `σ² / (2 b m)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.friction * self.mass)
    }

    /// Variance of the noise part accumulated over a step `dt`.
    fn transition_variance(&self, dt: f64) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        let k = self.rate();
        if k == 0.0 {
            return (self.sigma / self.mass) * (self.sigma / self.mass) * dt;
        }
        -self.stationary_variance() * libm::expm1(-2.0 * k * dt)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("time must be nonnegative, got {t}")));
    }
    Ok(())
}

/// `E V_t = e^{-(b/m)t} E V_0`.
pub fn ou_mean(params: &LangevinParams, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(libm::exp(-params.rate() * t) * params.v0_mean)
}

/// `Var V_t = e^{-2bt/m} Var V_0 + σ² (1 - e^{-2bt/m}) / (2bm)`.
pub fn ou_variance(params: &LangevinParams, t: f64) -> Result<f64> {
    check_time(t)?;
    let decay = libm::exp(-2.0 * params.rate() * t);
    Ok(decay * params.v0_var + params.transition_variance(t))
}

/// Exact simulation at the grid points through the Gaussian transition
/// `V_i = e^{-(b/m)Δ_i} V_{i-1} + η_i`, `η_i ~ N(0, σ²(1 - e^{-2bΔ_i/m})/(2bm))`.
///
/// The deterministic part is evaluated in closed form, so with `σ = 0` the path
/// is `e^{-(b/m)t_i} V_0` to rounding.
pub fn simulate_ou_exact(params: &LangevinParams, grid: &TimeGrid, stream: NoiseStream) -> Result<Path> {
    params.validate()?;
    let k = params.rate();
    let z = stream.standard_normals(grid.cells());
    let mut values = Vec::with_capacity(grid.len());
    let mut noise = 0.0;
    values.push(params.v0_mean);
    for j in 1..=grid.cells() {
        let dt = grid.width(j);
        noise = libm::exp(-k * dt) * noise + libm::sqrt(params.transition_variance(dt)) * z[j - 1];
        values.push(libm::exp(-k * grid.points()[j]) * params.v0_mean + noise);
    }
    Path::new(grid.clone(), values)
}

fn check_increments(grid: &TimeGrid, increments: &[f64]) -> Result<()> {
    if increments.len() != grid.cells() {
        return Err(invalid(format!(
            "{} Brownian increments supplied for a grid with {} cells",
            increments.len(),
            grid.cells()
        )));
    }
    Ok(())
}

/// Explicit Euler-Maruyama: `V_i = V_{i-1} - (b/m) V_{i-1} Δ_i + (σ/m) ΔB_i`.
pub fn simulate_ou_em(params: &LangevinParams, grid: &TimeGrid, increments: &[f64]) -> Result<Path> {
    params.validate()?;
    check_increments(grid, increments)?;
    let k = params.rate();
    let kick = params.sigma / params.mass;
    let mut values = Vec::with_capacity(grid.len());
    let mut v = params.v0_mean;
    values.push(v);
    for (j, db) in increments.iter().enumerate() {
        v = v - k * v * grid.width(j + 1) + kick * db;
        values.push(v);
    }
    Path::new(grid.clone(), values)
}

/// Exponential scheme driven by given increments:
/// `V_i = e^{-(b/m)Δ_i} V_{i-1} + (σ/m) ΔB_i (1 - e^{-(b/m)Δ_i}) / ((b/m)Δ_i)`.
///
/// Each step adds the conditional expectation of `(σ/m)∫ e^{-(b/m)(t_i-s)} dB_s`
/// over the cell given the cell's increment, so the path is the exact solution
/// averaged over the Brownian bridges between grid points. It serves as the
/// reference for strong-error studies of [`simulate_ou_em`].
pub fn simulate_ou_conditional(params: &LangevinParams, grid: &TimeGrid, increments: &[f64]) -> Result<Path> {
    params.validate()?;
    check_increments(grid, increments)?;
    let k = params.rate();
    let kick = params.sigma / params.mass;
    let mut values = Vec::with_capacity(grid.len());
    let mut v = params.v0_mean;
    values.push(v);
    for (j, db) in increments.iter().enumerate() {
        let x = k * grid.width(j + 1);
        let gain = if x == 0.0 { 1.0 } else { -libm::expm1(-x) / x };
        v = libm::exp(-x) * v + kick * gain * db;
        values.push(v);
    }
    Path::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::uniform_grid;
    use approx::assert_relative_eq;

    #[test]
    fn mean_examples() {
        let p = LangevinParams::new(1.0, 1.0, 0.3, 1.0).unwrap();
        assert_eq!(ou_mean(&p, 0.0).unwrap(), 1.0);
        assert_relative_eq!(ou_mean(&p, core::f64::consts::LN_2).unwrap(), 0.5, max_relative = 1e-15);
        let p = LangevinParams::new(2.0, 1.0, 0.3, 3.0).unwrap();
        assert_relative_eq!(ou_mean(&p, 2.0).unwrap(), 1.10364, epsilon = 5e-6);
        assert!(ou_mean(&p, -1.0).is_err());
    }

    #[test]
    fn variance_examples() {
        let p = LangevinParams::new(1.0, 2.0, 0.5, 1.0).unwrap().with_initial_variance(0.2).unwrap();
        assert_relative_eq!(ou_variance(&p, 0.0).unwrap(), 0.2, max_relative = 1e-15);
        assert_relative_eq!(ou_variance(&p, 1e3).unwrap(), 0.0625, max_relative = 1e-12);
        let p = LangevinParams::new(1.0, 2.0, 0.5, 1.0).unwrap();
        assert_relative_eq!(ou_variance(&p, 1.0).unwrap(), 0.061355, epsilon = 5e-7);
        assert!(ou_variance(&p, -0.5).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(LangevinParams::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(LangevinParams::new(1.0, -1.0, 1.0, 0.0).is_err());
        assert!(LangevinParams::new(1.0, 1.0, -1.0, 0.0).is_err());
        assert!(LangevinParams::new(1.0, 1.0, 1.0, 0.0).unwrap().with_initial_variance(-1.0).is_err());
    }

    #[test]
    fn noiseless_exact_path_is_decay() {
        let p = LangevinParams::new(1.5, 0.7, 0.0, 2.0).unwrap();
        let g = uniform_grid(3.0, 50).unwrap();
        let path = simulate_ou_exact(&p, &g, NoiseStream::new(1, 0)).unwrap();
        for (i, &t) in g.points().iter().enumerate() {
            let expected = ou_mean(&p, t).unwrap();
            assert_relative_eq!(path.values()[i], expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn overdamped_noiseless_path_vanishes() {
        let p = LangevinParams::new(1.0, 1e4, 0.0, 1.0).unwrap();
        let g = uniform_grid(1.0, 10).unwrap();
        let path = simulate_ou_exact(&p, &g, NoiseStream::new(1, 0)).unwrap();
        assert!(path.values()[1..].iter().all(|v| v.abs() < 1e-300));
    }

    #[test]
    fn em_deterministic_cases() {
        let g = uniform_grid(1.0, 10).unwrap();
        let zero = [0.0; 10];
        let frozen = LangevinParams::new(1.0, 0.0, 0.4, 1.3).unwrap();
        let path = simulate_ou_em(&frozen, &g, &zero).unwrap();
        assert!(path.values().iter().all(|&v| v == 1.3));
        let p = LangevinParams::new(2.0, 1.0, 0.4, 1.0).unwrap();
        let path = simulate_ou_em(&p, &g, &zero).unwrap();
        for (i, v) in path.values().iter().enumerate() {
            assert_relative_eq!(*v, libm::pow(1.0 - 0.05, i as f64), max_relative = 1e-13);
        }
        assert!(simulate_ou_em(&p, &g, &zero[..9]).is_err());
    }

    #[test]
    fn exact_sampler_is_linear_in_sigma_and_v0() {
        let g = uniform_grid(1.0, 32).unwrap();
        let s = NoiseStream::new(4, 4);
        let base = simulate_ou_exact(&LangevinParams::new(1.0, 2.0, 0.5, 1.0).unwrap(), &g, s).unwrap();
        let scaled = simulate_ou_exact(&LangevinParams::new(1.0, 2.0, 1.5, 3.0).unwrap(), &g, s).unwrap();
        for (a, b) in base.values().iter().zip(scaled.values()) {
            assert_relative_eq!(3.0 * a, *b, max_relative = 1e-14, epsilon = 1e-15);
        }
    }
}
