//! Gamma, Beta and the upper incomplete Beta integral used by the kernels.

use alloc::format;

use crate::error::{invalid, Result};

/// `ln Γ(x)` for `x > 0` (musl/fdlibm rational approximation, ~1 ulp).
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Euler Beta function `β(a, b) = Γ(a)Γ(b)/Γ(a+b)`, computed in log space.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!(
            "beta function arguments must be positive, got ({a}, {b})"
        )));
    }
    Ok(libm::exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)))
}

/// `Σ_{k ≥ first} (c)_k y^k / (k! (d + k))` for `0 ≤ y ≤ 1/2`.
fn pochhammer_series(y: f64, c: f64, d: f64, first: usize) -> f64 {
    let mut p = 1.0;
    let mut sum = 0.0;
    for k in 0..600usize {
        let kf = k as f64;
        if k >= first {
            let term = p / (d + kf);
            sum += term;
            if k > first && term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        p *= (c + kf) * y / (kf + 1.0);
        if p == 0.0 {
            break;
        }
    }
    sum
}

/// The tail integral `G(x) = ∫_x^1 v^(a-1) (1-v)^(b-1) dv` for
/// `a ∈ (-1, 1) \ {0}`, `b > 0` and `0 < x < 1`.
///
/// For `x ≥ 1/2` the integral is the incomplete Beta `B(1-x; b, a)` expanded as a
/// hypergeometric series in `1-x`. Below `1/2` it is split at `1/2` and the
/// piece `∫_x^{1/2}` is written as `F(1/2) - F(x)` with
/// `F(y) = y^a Σ (1-b)_k y^k / (k!(a+k))`, an antiderivative of the integrand
/// that stays valid for negative `a`. Both series converge at least like `2^-k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaTail {
    a: f64,
    b: f64,
    at_half: f64,
    upper_at_half: f64,
}

impl BetaTail {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0 && a < 1.0) || a == 0.0 || !(b > 0.0) || !b.is_finite() {
            return Err(invalid(format!(
                "beta tail needs a in (-1, 1) without 0 and b > 0, got ({a}, {b})"
            )));
        }
        let at_half = libm::pow(0.5, b) * pochhammer_series(0.5, 1.0 - a, b, 0);
        let upper_at_half = libm::pow(0.5, a) * pochhammer_series(0.5, 1.0 - b, a, 1);
        Ok(Self { a, b, at_half, upper_at_half })
    }

    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!(x > 0.0 && x < 1.0);
        let (a, b) = (self.a, self.b);
        if x >= 0.5 {
            let z = 1.0 - x;
            return libm::pow(z, b) * pochhammer_series(z, 1.0 - a, b, 0);
        }
        let xa = libm::pow(x, a);
        // (1/2)^a - x^a without cancellation when a is close to 0.
        let lead = xa * libm::expm1(a * libm::log(0.5 / x)) / a;
        let rest = self.upper_at_half - xa * pochhammer_series(x, 1.0 - b, a, 1);
        self.at_half + lead + rest
    }
}
