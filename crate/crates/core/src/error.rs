use alloc::string::String;

use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Cholesky found a pivot that is not strictly positive.
    #[error("decomposition failed: nonpositive pivot {pivot:e} at row {row}")]
    Decomposition { row: usize, pivot: f64 },

    #[error("degenerate series: no prefix has a nonzero standard deviation")]
    DegenerateSeries,

    #[error("degenerate denominator at t = {time}: the kernel integral of the velocity vanishes")]
    DegenerateDenominator { time: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
