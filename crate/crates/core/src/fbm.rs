//! Fractional Brownian motion synthesis.
//!
//! Two samplers are provided. [`ExactSampler`] draws the exact finite-dimensional
//! law `N(0, R_H)` through a Cholesky factor of the covariance matrix and is the
//! reference. [`KernelSampler`] discretizes the Volterra representation
//! `B^H_t = ∫_0^t K_H(t,s) dB_s` against Brownian increments on the grid.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::grid::{Path, TimeGrid};
use crate::kernels::{fbm_covariance, KernelMatrix, KernelSpec};
use crate::noise::gaussian_increments;
use crate::rng::NoiseStream;

/// Covariance matrix `M[i][j] = R_H(t_i, t_j)` over the positive grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    pub grid: TimeGrid,
    pub hurst: f64,
    pub entries: DMatrix<f64>,
}

pub fn covariance_matrix(hurst: f64, grid: &TimeGrid) -> Result<CovMatrix> {
    let times = &grid.points()[1..];
    let n = times.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let r = fbm_covariance(hurst, times[i], times[j])?;
            entries[(i, j)] = r;
            entries[(j, i)] = r;
        }
    }
    Ok(CovMatrix { grid: grid.clone(), hurst, entries })
}

/// Lower-triangular `L` with positive diagonal and `L Lᵀ = M`.
pub fn cholesky_factor(cov: &CovMatrix) -> Result<DMatrix<f64>> {
    factorize(&cov.entries)
}

pub(crate) fn factorize(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(invalid(format!("cannot factor a {}x{} matrix", m.nrows(), m.ncols())));
    }
    match m.clone().cholesky() {
        Some(c) => Ok(c.unpack()),
        None => {
            // Locate the failing pivot for the error message.
            let n = m.nrows();
            let mut l = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                let mut d = m[(j, j)];
                for k in 0..j {
                    d -= l[(j, k)] * l[(j, k)];
                }
                if !(d > 0.0) {
                    return Err(Error::Decomposition { row: j, pivot: d });
                }
                l[(j, j)] = libm::sqrt(d);
                for i in j + 1..n {
                    let mut s = m[(i, j)];
                    for k in 0..j {
                        s -= l[(i, k)] * l[(j, k)];
                    }
                    l[(i, j)] = s / l[(j, j)];
                }
            }
            Err(Error::Decomposition { row: n, pivot: f64::NAN })
        }
    }
}

/// Exact Gaussian sampler with a cached Cholesky factor. `O(n³)` to build,
/// `O(n²)` per path.
#[derive(Debug, Clone)]
pub struct ExactSampler {
    grid: TimeGrid,
    factor: DMatrix<f64>,
}

impl ExactSampler {
    pub fn new(hurst: f64, grid: &TimeGrid) -> Result<Self> {
        let factor = cholesky_factor(&covariance_matrix(hurst, grid)?)?;
        Ok(Self { grid: grid.clone(), factor })
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn sample(&self, stream: NoiseStream) -> Path {
        let n = self.grid.cells();
        let z = stream.standard_normals(n);
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        for i in 0..n {
            let row = self.factor.row(i);
            values.push((0..=i).map(|k| row[k] * z[k]).sum());
        }
        Path::new(self.grid.clone(), values).expect("finite Gaussian sample")
    }
}

/// One exact fBm path: `B^H(0) = 0` and `L z` at the positive grid points.
pub fn sample_fbm_exact(hurst: f64, grid: &TimeGrid, stream: NoiseStream) -> Result<Path> {
    Ok(ExactSampler::new(hurst, grid)?.sample(stream))
}

/// Volterra-kernel sampler with cached quadrature weights.
#[derive(Debug, Clone)]
pub struct KernelSampler {
    matrix: KernelMatrix,
}

impl KernelSampler {
    pub fn new(spec: &KernelSpec, grid: &TimeGrid) -> Self {
        Self { matrix: KernelMatrix::new(spec, grid) }
    }

    pub fn matrix(&self) -> &KernelMatrix {
        &self.matrix
    }

    /// Path driven by the Gaussian increments of `stream` on the grid.
    pub fn sample(&self, stream: NoiseStream) -> Path {
        let incs = gaussian_increments(self.matrix.grid(), stream);
        self.from_increments(&incs)
    }

    /// `B^H(t_i) = Σ_{j ≤ i} k_ij ΔB_j` where `k_ij` is the kernel at the
    /// midpoint of cell `j` (cell average for the singular cell). The standard
    /// regime returns the plain partial sums.
    pub fn from_increments(&self, increments: &[f64]) -> Path {
        let grid = self.matrix.grid().clone();
        if self.matrix.spec().is_standard() {
            return Path::from_increments(grid, 0.0, increments).expect("increments match the grid");
        }
        let values = self.matrix.stochastic_integral(increments);
        Path::new(grid, values).expect("finite stochastic integral")
    }
}

/// One kernel-synthesized fBm path driven by `gaussian_increments(grid, stream)`.
pub fn sample_fbm_kernel(spec: &KernelSpec, grid: &TimeGrid, stream: NoiseStream) -> Result<Path> {
    Ok(KernelSampler::new(spec, grid).sample(stream))
}
