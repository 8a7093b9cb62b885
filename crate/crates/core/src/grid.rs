//! Time meshes on `[0, T]` and real-valued sample paths aligned to them.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// A strictly increasing time mesh `0 = t_0 < t_1 < ... < t_n = T`.
///
/// The points are reference counted so that paths sampled on the same grid
/// share one allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Arc<[f64]>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("a time grid needs at least two points"));
        }
        if points[0] != 0.0 {
            return Err(invalid(format!("a time grid must start at 0, got {}", points[0])));
        }
        for (i, pair) in points.windows(2).enumerate() {
            if !pair[1].is_finite() || pair[1] <= pair[0] {
                return Err(invalid(format!(
                    "time grid points must be finite and strictly increasing (index {})",
                    i + 1
                )));
            }
        }
        Ok(Self { points: points.into() })
    }

    /// `steps + 1` equispaced points on `[0, horizon]`.
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(invalid(format!("horizon must be positive and finite, got {horizon}")));
        }
        if steps == 0 {
            return Err(invalid("a uniform grid needs at least one step"));
        }
        let n = steps as f64;
        let mut points: Vec<f64> = (0..=steps).map(|i| horizon * (i as f64 / n)).collect();
        points[steps] = horizon;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of grid points (cells + 1).
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells(&self) -> usize {
        self.points.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Largest cell width `Δ = max(t_i - t_{i-1})`.
    pub fn mesh(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Width of cell `j`, the interval `[t_{j-1}, t_j]`, for `j` in `1..=cells`.
    pub fn width(&self, j: usize) -> f64 {
        self.points[j] - self.points[j - 1]
    }

    /// Midpoint of cell `j`.
    pub fn midpoint(&self, j: usize) -> f64 {
        0.5 * (self.points[j - 1] + self.points[j])
    }

    /// Index of the grid point equal to `t`, allowing a relative slack of
    /// `1e-12 * T` for values that went through decimal text.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * self.horizon();
        let idx = self.points.partition_point(|&p| p < t - tol);
        (idx < self.points.len() && (self.points[idx] - t).abs() <= tol).then_some(idx)
    }

    /// True when every cell has the width `T / n` up to rounding.
    pub fn is_uniform(&self) -> bool {
        let h = self.horizon() / self.cells() as f64;
        self.points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
    }
}

/// Equispaced grid `0, T/n, ..., T`.
pub fn uniform_grid(horizon: f64, steps: usize) -> Result<TimeGrid> {
    TimeGrid::uniform(horizon, steps)
}

/// A finite real-valued path sampled on a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl Path {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "path has {} values but the grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("path value at index {i} is not finite")));
        }
        Ok(Self { grid, values })
    }

    /// Path starting at `start` whose consecutive differences are `increments`.
    pub fn from_increments(grid: TimeGrid, start: f64, increments: &[f64]) -> Result<Self> {
        if increments.len() != grid.cells() {
            return Err(invalid(format!(
                "{} increments supplied for a grid with {} cells",
                increments.len(),
                grid.cells()
            )));
        }
        let mut values = Vec::with_capacity(grid.len());
        let mut acc = start;
        values.push(acc);
        for dx in increments {
            acc += dx;
            values.push(acc);
        }
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Value at the grid point `t` (see [`TimeGrid::index_of`]).
    pub fn value_at(&self, t: f64) -> Option<f64> {
        self.grid.index_of(t).map(|i| self.values[i])
    }

    /// Linear interpolation at the midpoint of every cell.
    pub fn cell_midvalues(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn increments(&self) -> Vec<f64> {
        increments(self)
    }
}

/// `values[i] - values[i-1]` for `i = 1..n`.
pub fn increments(path: &Path) -> Vec<f64> {
    path.values.windows(2).map(|w| w[1] - w[0]).collect()
}
