//! Rescaled-range (R/S) analysis.
//!
//! For a series `X_1..X_n` and every prefix length `t`:
//!
//! 1. mean `m`, 2. adjusted series `Y_i = X_i - m`, 3. cumulative deviation
//!    `Z_k = Σ_{i≤k} Y_i`, 4. range `R_t = max Z - min Z` over `k ≤ t`,
//! 5. population standard deviation `S_t` of `X_1..X_t` about their mean,
//! 6. `(R/S)_t = R_t / S_t`.
//!
//! The Hurst index is the slope of the least-squares line of `ln (R/S)_t`
//! against `ln t`, from the model `(R/S)_t ≈ λ t^H` for large `t`.
//!
//! [`MeanConvention`] selects which mean steps 1-2 use. `FullSeries` centers
//! every prefix with the mean of the whole series. `Prefix` centers prefix `t`
//! with its own mean, i.e. applies all six steps to `X_1..X_t`; the resulting
//! ranges are computed in `O(n log n)` from convex hulls of the partial sums.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Smallest prefix length used by [`estimate_hurst`] when none is given.
pub const DEFAULT_T_MIN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MeanConvention {
    /// Every prefix is analysed as a series of its own.
    #[default]
    Prefix,
    /// Steps 1-3 use the mean of the full series for every prefix.
    FullSeries,
}

/// `(t, (R/S)_t)` pairs with `t` strictly increasing and `(R/S)_t > 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RsSeries {
    pub entries: Vec<(usize, f64)>,
}

impl RsSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstEstimate {
    pub hurst: f64,
    pub lambda: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

/// R/S series with the full-series mean in steps 1-3.
pub fn rs_series(series: &[f64]) -> Result<RsSeries> {
    rs_series_with(series, MeanConvention::FullSeries)
}

pub fn rs_series_with(series: &[f64], convention: MeanConvention) -> Result<RsSeries> {
    let n = series.len();
    if n < 2 {
        return Err(invalid(format!("R/S analysis needs at least 2 values, got {n}")));
    }
    if let Some(i) = series.iter().position(|x| !x.is_finite()) {
        return Err(invalid(format!("series value at index {i} is not finite")));
    }
    let spread = series.iter().map(|x| (x - series[0]).abs()).fold(0.0, f64::max);
    if spread == 0.0 {
        return Err(Error::DegenerateSeries);
    }
    // Centering is exact in both conventions and keeps the partial sums small.
    let mean = series.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = series.iter().map(|v| v - mean).collect();

    let ranges = match convention {
        MeanConvention::FullSeries => running_ranges(&x),
        MeanConvention::Prefix => prefix_mean_ranges(&x),
    };

    let floor = 1e-14 * spread;
    let mut entries = Vec::with_capacity(n - 1);
    let (mut mu, mut m2) = (0.0, 0.0);
    for (k, &xk) in x.iter().enumerate() {
        let t = k + 1;
        let d = xk - mu;
        mu += d / t as f64;
        m2 += d * (xk - mu);
        if t < 2 {
            continue;
        }
        let s = libm::sqrt(m2.max(0.0) / t as f64);
        if s > floor && ranges[k] > 0.0 {
            entries.push((t, ranges[k] / s));
        }
    }
    if entries.is_empty() {
        return Err(Error::DegenerateSeries);
    }
    Ok(RsSeries { entries })
}

/// `max - min` of the running partial sums.
fn running_ranges(x: &[f64]) -> Vec<f64> {
    let (mut z, mut hi, mut lo) = (0.0, f64::NEG_INFINITY, f64::INFINITY);
    x.iter()
        .map(|v| {
            z += v;
            hi = hi.max(z);
            lo = lo.min(z);
            hi - lo
        })
        .collect()
}

/// For every `t`, the range over `k ≤ t` of `P_k - k μ_t` with `P_k` the partial
/// sums and `μ_t = P_t / t`.
///
/// The maximum of `P_k - μ k` over the points `(k, P_k)` is attained on their
/// upper convex hull, the minimum on the lower hull. Both hulls grow by one point
/// per step (monotone chain) and are queried by binary search on edge slopes.
fn prefix_mean_ranges(x: &[f64]) -> Vec<f64> {
    let mut sums = Vec::with_capacity(x.len() + 1);
    let mut acc = 0.0;
    sums.push(0.0);
    for v in x {
        acc += v;
        sums.push(acc);
    }
    // (k, P_k) for k = 1..t; `cross > 0` means a left turn o -> a -> b.
    let cross = |o: usize, a: usize, b: usize| {
        (a - o) as f64 * (sums[b] - sums[o]) - (sums[a] - sums[o]) * (b - o) as f64
    };
    let mut upper: Vec<usize> = Vec::new();
    let mut lower: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(x.len());
    for t in 1..=x.len() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], t) >= 0.0 {
            upper.pop();
        }
        upper.push(t);
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], t) <= 0.0 {
            lower.pop();
        }
        lower.push(t);

        let mu = sums[t] / t as f64;
        let value = |k: usize| sums[k] - mu * k as f64;
        // Upper hull slopes decrease: first vertex whose outgoing slope is <= μ.
        let top = upper[first_index(upper.len() - 1, |i| {
            let (a, b) = (upper[i], upper[i + 1]);
            sums[b] - sums[a] <= mu * (b - a) as f64
        })];
        // Lower hull slopes increase: first vertex whose outgoing slope is >= μ.
        let bottom = lower[first_index(lower.len() - 1, |i| {
            let (a, b) = (lower[i], lower[i + 1]);
            sums[b] - sums[a] >= mu * (b - a) as f64
        })];
        out.push(value(top) - value(bottom));
    }
    out
}

/// Smallest `i` in `0..len` with `pred(i)`, or `len` when none holds;
/// `pred` must be monotone (false...false true...true).
fn first_index(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Ordinary least squares of `ln rs` on `ln t`.
pub fn loglog_regression(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 2 {
        return Err(invalid(format!("regression needs at least 2 points, got {}", points.len())));
    }
    for &(t, rs) in points {
        if !(t >= 1.0) || !t.is_finite() || !(rs > 0.0) || !rs.is_finite() {
            return Err(invalid(format!("regression needs t >= 1 and rs > 0, got ({t}, {rs})")));
        }
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| libm::log(p.0)).collect();
    let ly: Vec<f64> = points.iter().map(|p| libm::log(p.1)).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(invalid("regression needs at least two distinct t values"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(LogLogFit { slope, intercept, r_squared })
}

/// Hurst index from the R/S entries with `t >= t_min` (prefix-mean convention).
pub fn estimate_hurst(series: &[f64], t_min: usize) -> Result<HurstEstimate> {
    estimate_hurst_with(series, t_min, MeanConvention::Prefix)
}

pub fn estimate_hurst_with(series: &[f64], t_min: usize, convention: MeanConvention) -> Result<HurstEstimate> {
    if t_min < 2 {
        return Err(invalid(format!("t_min must be at least 2, got {t_min}")));
    }
    let rs = rs_series_with(series, convention)?;
    let points: Vec<(f64, f64)> = rs
        .entries
        .iter()
        .filter(|(t, _)| *t >= t_min)
        .map(|&(t, v)| (t as f64, v))
        .collect();
    if points.len() < 2 {
        return Err(invalid(format!(
            "only {} R/S points with t >= {t_min}; the series is too short",
            points.len()
        )));
    }
    let fit = loglog_regression(&points)?;
    Ok(HurstEstimate {
        hurst: fit.slope,
        lambda: libm::exp(fit.intercept),
        r_squared: fit.r_squared,
        points_used: points.len(),
    })
}
