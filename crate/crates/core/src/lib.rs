//! Simulation and estimation primitives for one-dimensional Langevin dynamics
//! regularized by fractional Brownian motion.
//!
//! The crate is `no_std` and only needs an allocator. It provides
//!
//! * time grids, sample paths and reproducible noise streams ([`grid`], [`rng`]),
//! * the Volterra kernels `K_H` of the fBm representation `B^H_t = ∫ K_H(t,s) dB_s`
//!   together with their quadrature ([`kernels`]),
//! * Brownian, Donsker and smoothed white-noise generators ([`noise`]),
//! * exact (Cholesky) and kernel-based fBm samplers ([`fbm`]),
//! * the Ornstein-Uhlenbeck velocity process ([`langevin`]),
//! * the fractional velocity transform and its amplitude estimator ([`fractional`]),
//! * rescaled-range (R/S) estimation of the Hurst index ([`hurst`]).
//!
//! File formats and the command line front end live in the `fraclangevin` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod fbm;
pub mod fractional;
pub mod grid;
pub mod hurst;
pub mod kernels;
pub mod langevin;
pub mod noise;
pub mod rng;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use grid::{increments, uniform_grid, Path, TimeGrid};
pub use kernels::{KernelSpec, Regime};
pub use rng::NoiseStream;
