//! Small sample statistics used by the Monte Carlo checks.

use alloc::vec::Vec;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (divisor `n - 1`).
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Kolmogorov-Smirnov distance between the empirical law of `xs` and
/// `N(mean, variance)`.
pub fn ks_distance_normal(xs: &[f64], mean: f64, variance: f64) -> f64 {
    let sd = libm::sqrt(variance);
    let mut sorted: Vec<f64> = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf((x - mean) / sd);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert_relative_eq!(sample_variance(&xs), 5.0 / 3.0);
        assert!(mean(&[]).is_nan());
        assert!(sample_variance(&[1.0]).is_nan());
    }

    #[test]
    fn cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert_relative_eq!(normal_cdf(1.959963984540054), 0.975, epsilon = 1e-12);
        assert_relative_eq!(normal_cdf(-1.0), 0.15865525393145707, epsilon = 1e-14);
    }

    #[test]
    fn ks_single_point_at_median() {
        assert_relative_eq!(ks_distance_normal(&[0.0], 0.0, 1.0), 0.5);
    }
}
