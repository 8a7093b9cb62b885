//! Volterra kernels `K_H` of the representation `B^H_t = ∫_0^t K_H(t,s) dB_s`.
//!
//! Two regimes are supported:
//!
//! * `H > 1/2`: `K_H(t,s) = c_H s^(1/2-H) ∫_s^t (u-s)^(H-3/2) u^(H-1/2) du`,
//! * `H < 1/2`: `K_H(t,s) = c_H [ (t/s)^(H-1/2) (t-s)^(H-1/2)
//!   - (H-1/2) s^(1/2-H) ∫_s^t u^(H-3/2) (u-s)^(H-1/2) du ]`,
//!
//! and `H = 1/2` is the standard Brownian case `K ≡ 1`.
//!
//! The substitution `v = s/u` turns both inner integrals into
//! `s^(2H-1) ∫_{s/t}^1 v^(-2H) (1-v)^(β-1) dv` with `β = H ∓ 1/2`, which is
//! evaluated by [`BetaTail`] to near machine precision. The kernels are
//! therefore homogeneous: `K_H(at, as) = a^(H-1/2) K_H(t, s)`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::TimeGrid;
use crate::special::{beta_fn, BetaTail};

/// Hurst indices closer than this to 1/2 are treated as standard Brownian motion.
pub const HALF_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `H > 1/2`, persistent increments.
    AboveHalf,
    /// `H < 1/2`, anti-persistent increments.
    BelowHalf,
    /// `H = 1/2`, Brownian motion.
    Standard,
}

/// Hurst index with its regime and normalizing constant `c_H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    hurst: f64,
    regime: Regime,
    c_h: f64,
    tail: Option<BetaTail>,
}

impl KernelSpec {
    pub fn new(hurst: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(invalid(format!(
                "Hurst index must lie in the open interval (0, 1), got {hurst}"
            )));
        }
        if (hurst - 0.5).abs() < HALF_GUARD {
            return Ok(Self { hurst: 0.5, regime: Regime::Standard, c_h: 1.0, tail: None });
        }
        let h = hurst;
        let (regime, c_h, tail) = if h > 0.5 {
            let c = libm::sqrt(h * (2.0 * h - 1.0) / beta_fn(2.0 - 2.0 * h, h - 0.5)?);
            (Regime::AboveHalf, c, BetaTail::new(1.0 - 2.0 * h, h - 0.5)?)
        } else {
            let c = libm::sqrt(2.0 * h / ((1.0 - 2.0 * h) * beta_fn(1.0 - 2.0 * h, h + 0.5)?));
            (Regime::BelowHalf, c, BetaTail::new(1.0 - 2.0 * h, h + 0.5)?)
        };
        Ok(Self { hurst: h, regime, c_h, tail: Some(tail) })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `c_H`, undefined for the standard regime.
    pub fn c_h(&self) -> Option<f64> {
        match self.regime {
            Regime::Standard => None,
            _ => Some(self.c_h),
        }
    }

    pub fn is_standard(&self) -> bool {
        self.regime == Regime::Standard
    }

    /// Kernel value without domain checks; requires `0 < s < t`.
    pub(crate) fn eval(&self, t: f64, s: f64) -> f64 {
        let h = self.hurst;
        match (self.regime, &self.tail) {
            (Regime::AboveHalf, Some(tail)) => {
                self.c_h * libm::pow(s, h - 0.5) * tail.eval(s / t)
            }
            (Regime::BelowHalf, Some(tail)) => {
                let e = h - 0.5;
                let head = libm::pow((t - s) * t / s, e);
                let inner = e * libm::pow(s, e) * tail.eval(s / t);
                self.c_h * (head - inner)
            }
            _ => 1.0,
        }
    }

    /// Exponent of the singular factor `(t-s)^e` that the quadrature integrates
    /// exactly in the cell touching `s = t`.
    fn upper_singular_exponent(&self) -> Option<f64> {
        (self.regime == Regime::BelowHalf).then_some(self.hurst - 0.5)
    }
}

pub fn make_kernel_spec(hurst: f64) -> Result<KernelSpec> {
    KernelSpec::new(hurst)
}

fn check_open_triangle(t: f64, s: f64) -> Result<()> {
    if !(s > 0.0 && s < t) || !t.is_finite() {
        return Err(invalid(format!("kernel needs 0 < s < t, got t = {t}, s = {s}")));
    }
    Ok(())
}

/// `K_H(t, s)` for `0 < s < t`.
pub fn kernel_value(spec: &KernelSpec, t: f64, s: f64) -> Result<f64> {
    check_open_triangle(t, s)?;
    Ok(spec.eval(t, s))
}

/// `∂K_H/∂t (t, s) = c_H (H-1/2)^[H<1/2] (t/s)^(H-1/2) (t-s)^(H-3/2)`.
///
/// The standard kernel does not depend on `t`, so its derivative is 0.
pub fn kernel_dt(spec: &KernelSpec, t: f64, s: f64) -> Result<f64> {
    check_open_triangle(t, s)?;
    let h = spec.hurst;
    let core = libm::pow(t / s, h - 0.5) * libm::pow(t - s, h - 1.5);
    Ok(match spec.regime {
        Regime::AboveHalf => spec.c_h * core,
        Regime::BelowHalf => spec.c_h * (h - 0.5) * core,
        Regime::Standard => 0.0,
    })
}

/// fBm covariance `R_H(t, s) = (t^2H + s^2H - |t-s|^2H) / 2`.
pub fn fbm_covariance(hurst: f64, s: f64, t: f64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(invalid(format!(
            "Hurst index must lie in the open interval (0, 1), got {hurst}"
        )));
    }
    if !(s >= 0.0 && t >= 0.0) {
        return Err(invalid(format!("covariance needs s, t >= 0, got ({s}, {t})")));
    }
    let e = 2.0 * hurst;
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    Ok(0.5 * (libm::pow(hi, e) + libm::pow(lo, e) - libm::pow(hi - lo, e)))
}

/// Quadrature rule for `∫_0^t K_H(t,s) f(s) ds` on midpoint nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub target_time: f64,
}

impl QuadratureRule {
    /// `Σ w_j f_j` for values `f_j` given at the nodes.
    pub fn apply(&self, values: &[f64]) -> f64 {
        dot(&self.weights, values)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Correction factor for a cell of width `δ` whose integrand behaves like
/// `(t-s)^e` near its right end: `∫_{t-δ}^t (t-s)^e ds / (δ (δ/2)^e)`.
#[inline]
fn singular_cell_factor(e: f64) -> f64 {
    libm::pow(2.0, e) / (1.0 + e)
}

/// Weights of grid point `i` (cells `1..=i`), appended to `out`.
pub(crate) fn row_weights(spec: &KernelSpec, grid: &TimeGrid, i: usize, out: &mut Vec<f64>) {
    out.clear();
    let t = grid.points()[i];
    out.extend((1..=i).map(|j| spec.eval(t, grid.midpoint(j)) * grid.width(j)));
    if let (Some(e), Some(last)) = (spec.upper_singular_exponent(), out.last_mut()) {
        *last *= singular_cell_factor(e);
    }
}

/// Midpoint quadrature of `∫_0^t K_H(t,s) f(s) ds` over the grid cells in `[0, t]`.
///
/// The weight of cell `j` is `K_H(t, m_j)` times its width. For `H < 1/2` the
/// cell touching `s = t` instead integrates the singular factor `(t-s)^(H-1/2)`
/// exactly and multiplies it by the rest of the kernel at the midpoint. The
/// standard regime yields plain cell widths.
pub fn kernel_weights(spec: &KernelSpec, t: f64, grid: &TimeGrid) -> Result<QuadratureRule> {
    let i = grid
        .index_of(t)
        .ok_or_else(|| invalid(format!("t = {t} is not a point of the grid")))?;
    if i == 0 {
        return Err(invalid("kernel weights need t > 0"));
    }
    let mut weights = Vec::with_capacity(i);
    row_weights(spec, grid, i, &mut weights);
    Ok(QuadratureRule {
        nodes: (1..=i).map(|j| grid.midpoint(j)).collect(),
        weights,
        target_time: grid.points()[i],
    })
}

/// Relative residual of the product quadrature of
/// `∫_0^{s∧t} K_H(t,u) K_H(s,u) du` against `R_H(t, s)` on `n` uniform cells.
pub fn verify_covariance_identity(spec: &KernelSpec, s: f64, t: f64, n: usize) -> Result<f64> {
    if spec.is_standard() {
        return Err(invalid("the covariance identity check needs H != 1/2"));
    }
    if !(s > 0.0 && t > 0.0) || !s.is_finite() || !t.is_finite() {
        return Err(invalid(format!("covariance identity needs s, t > 0, got ({s}, {t})")));
    }
    if n < 16 {
        return Err(invalid(format!("covariance identity needs n >= 16 cells, got {n}")));
    }
    let lo = s.min(t);
    let delta = lo / n as f64;
    let kernel = |time: f64, u: f64| if u < time { spec.eval(time, u) } else { 0.0 };
    let mut q = 0.0;
    for j in 0..n {
        let u = (j as f64 + 0.5) * delta;
        q += kernel(t, u) * kernel(s, u);
    }
    // Undo the plain midpoint contribution of the last cell and integrate
    // its singular factor exactly.
    if let Some(e) = spec.upper_singular_exponent() {
        let touching = (s == lo) as u8 + (t == lo) as u8;
        let e = e * f64::from(touching);
        let u = lo - 0.5 * delta;
        let last = kernel(t, u) * kernel(s, u);
        q += last * (singular_cell_factor(e) - 1.0);
    }
    q *= delta;
    let exact = fbm_covariance(spec.hurst, s, t)?;
    Ok((q - exact).abs() / exact)
}

/// All quadrature rows `kernel_weights(spec, t_i, grid)` of a grid, stored as a
/// packed lower triangle. Row `i` holds the `i` weights of grid point `t_i`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    spec: KernelSpec,
    grid: TimeGrid,
    weights: Vec<f64>,
}

impl KernelMatrix {
    pub fn new(spec: &KernelSpec, grid: &TimeGrid) -> Self {
        let n = grid.cells();
        let mut weights = Vec::with_capacity(n * (n + 1) / 2);
        let mut row = Vec::with_capacity(n);
        for i in 1..=n {
            row_weights(spec, grid, i, &mut row);
            weights.extend_from_slice(&row);
        }
        Self { spec: *spec, grid: grid.clone(), weights }
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Weights of grid point `i >= 1`.
    pub fn row(&self, i: usize) -> &[f64] {
        let start = (i - 1) * i / 2;
        &self.weights[start..start + i]
    }

    /// `∫_0^{t_i} K_H(t_i, s) f(s) ds` for every grid point, from per-cell values
    /// of `f` (midpoint values or cell averages). The entry for `t_0 = 0` is 0.
    pub fn integrate(&self, cell_values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(cell_values.len(), self.grid.cells());
        let mut out = Vec::with_capacity(self.grid.len());
        out.push(0.0);
        out.extend((1..=self.grid.cells()).map(|i| dot(self.row(i), &cell_values[..i])));
        out
    }

    /// `Σ_j (w_ij / Δ_j) ΔB_j`: the Volterra stochastic integral against
    /// per-cell increments, with each cell's coefficient equal to the cell
    /// average of the kernel implied by the weights.
    pub fn stochastic_integral(&self, increments: &[f64]) -> Vec<f64> {
        debug_assert_eq!(increments.len(), self.grid.cells());
        let scaled: Vec<f64> = increments
            .iter()
            .enumerate()
            .map(|(j, db)| db / self.grid.width(j + 1))
            .collect();
        self.integrate(&scaled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::uniform_grid;
    use approx::assert_relative_eq;

    #[test]
    fn regimes_and_constants() {
        let s = make_kernel_spec(0.75).unwrap();
        assert_eq!(s.regime(), Regime::AboveHalf);
        assert_relative_eq!(s.c_h().unwrap(), 0.26741, epsilon = 5e-6);
        let s = make_kernel_spec(0.25).unwrap();
        assert_eq!(s.regime(), Regime::BelowHalf);
        assert_relative_eq!(s.c_h().unwrap(), 0.64600, epsilon = 5e-6);
        let s = make_kernel_spec(0.5).unwrap();
        assert_eq!(s.regime(), Regime::Standard);
        assert_eq!(s.c_h(), None);
        assert_eq!(make_kernel_spec(0.5 + 5e-7).unwrap().regime(), Regime::Standard);
        assert_eq!(make_kernel_spec(0.5 + 2e-6).unwrap().regime(), Regime::AboveHalf);
    }

    #[test]
    fn invalid_hurst_rejected() {
        for h in [0.0, 1.0, -0.3, 1.2, f64::NAN] {
            assert!(make_kernel_spec(h).is_err());
        }
    }

    #[test]
    fn standard_kernel_is_one() {
        let s = make_kernel_spec(0.5).unwrap();
        assert_eq!(kernel_value(&s, 1.0, 0.3).unwrap(), 1.0);
        assert_eq!(kernel_dt(&s, 1.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn kernel_domain_errors() {
        let s = make_kernel_spec(0.7).unwrap();
        assert!(kernel_value(&s, 1.0, 0.0).is_err());
        assert!(kernel_value(&s, 1.0, 1.0).is_err());
        assert!(kernel_value(&s, 1.0, 1.5).is_err());
        assert!(kernel_dt(&s, 1.0, 1.0).is_err());
        assert!(kernel_dt(&s, 1.0, -0.1).is_err());
    }

    #[test]
    fn above_half_kernel_vanishes_at_diagonal() {
        let s = make_kernel_spec(0.75).unwrap();
        // K(t, s) ~ c_H (t - s)^(H - 1/2) / (H - 1/2) as s -> t.
        let gap: f64 = libm::ldexp(1.0, -40);
        let near = kernel_value(&s, 1.0, 1.0 - gap).unwrap();
        let leading = s.c_h().unwrap() * libm::pow(gap, 0.25) / 0.25;
        assert!((near / leading - 1.0).abs() < 1e-9, "{near} vs {leading}");
    }

    #[test]
    fn dt_signs() {
        let up = make_kernel_spec(0.75).unwrap();
        let down = make_kernel_spec(0.25).unwrap();
        for &(t, s) in &[(1.0, 0.5), (2.0, 0.01), (0.3, 0.29)] {
            assert!(kernel_dt(&up, t, s).unwrap() > 0.0);
            assert!(kernel_dt(&down, t, s).unwrap() < 0.0);
        }
        let expected = up.c_h().unwrap() * libm::pow(2.0, 0.25) * libm::pow(0.5, -0.75);
        assert_relative_eq!(kernel_dt(&up, 1.0, 0.5).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn covariance_examples() {
        assert_eq!(fbm_covariance(0.5, 1.0, 2.0).unwrap(), 1.0);
        assert_relative_eq!(
            fbm_covariance(0.7, 1.0, 2.0).unwrap(),
            libm::pow(2.0, 0.4),
            max_relative = 1e-15
        );
        assert_relative_eq!(fbm_covariance(0.3, 0.0, 2.0).unwrap(), 0.0);
        assert_relative_eq!(
            fbm_covariance(0.3, 2.0, 2.0).unwrap(),
            libm::pow(2.0, 0.6),
            max_relative = 1e-15
        );
        assert!(fbm_covariance(0.3, -1.0, 2.0).is_err());
    }

    #[test]
    fn standard_weights_are_cell_widths() {
        let s = make_kernel_spec(0.5).unwrap();
        let g = uniform_grid(1.0, 4).unwrap();
        let rule = kernel_weights(&s, 1.0, &g).unwrap();
        assert_eq!(rule.weights, [0.25; 4]);
        assert_eq!(rule.nodes, [0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn weights_need_grid_point() {
        let s = make_kernel_spec(0.7).unwrap();
        let g = uniform_grid(1.0, 4).unwrap();
        assert!(kernel_weights(&s, 0.3, &g).is_err());
        assert!(kernel_weights(&s, 0.0, &g).is_err());
        assert_eq!(kernel_weights(&s, 0.5, &g).unwrap().weights.len(), 2);
    }

    #[test]
    fn matrix_rows_match_weights() {
        let s = make_kernel_spec(0.3).unwrap();
        let g = uniform_grid(2.0, 8).unwrap();
        let m = KernelMatrix::new(&s, &g);
        for i in 1..=8 {
            let rule = kernel_weights(&s, g.points()[i], &g).unwrap();
            assert_eq!(m.row(i), rule.weights.as_slice());
        }
    }

    #[test]
    fn covariance_identity_is_symmetric() {
        let s = make_kernel_spec(0.7).unwrap();
        let a = verify_covariance_identity(&s, 2.0, 1.0, 256).unwrap();
        let b = verify_covariance_identity(&s, 1.0, 2.0, 256).unwrap();
        assert_eq!(a, b);
        assert!(verify_covariance_identity(&s, 1.0, 1.0, 8).is_err());
        let std = make_kernel_spec(0.5).unwrap();
        assert!(verify_covariance_identity(&std, 1.0, 1.0, 64).is_err());
    }
}
