use approx::relative_eq;
use proptest::prelude::*;

use fraclangevin_core::fractional::{fractional_velocity, FractionalConfig};
use fraclangevin_core::hurst::{estimate_hurst, rs_series, rs_series_with, MeanConvention};
use fraclangevin_core::kernels::{fbm_covariance, kernel_value, make_kernel_spec};
use fraclangevin_core::{increments, uniform_grid, Path, TimeGrid};

fn hurst_value() -> impl Strategy<Value = f64> {
    prop_oneof![0.05f64..0.49, 0.51f64..0.95]
}

/// R/S series by direct scan, prefix mean in every step.
fn naive_prefix_rs(x: &[f64]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for t in 2..=x.len() {
        let mu = x[..t].iter().sum::<f64>() / t as f64;
        let (mut z, mut hi, mut lo) = (0.0, f64::NEG_INFINITY, f64::INFINITY);
        for v in &x[..t] {
            z += v - mu;
            hi = hi.max(z);
            lo = lo.min(z);
        }
        let s = (x[..t].iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / t as f64).sqrt();
        if s > 0.0 && hi > lo {
            out.push((t, (hi - lo) / s));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn increments_reconstruct_the_path(values in prop::collection::vec(-1e3f64..1e3, 2..60)) {
        let grid = uniform_grid(1.0, values.len() - 1).unwrap();
        let path = Path::new(grid.clone(), values.clone()).unwrap();
        let rebuilt = Path::from_increments(grid, values[0], &increments(&path)).unwrap();
        for (a, b) in rebuilt.values().iter().zip(&values) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn covariance_is_symmetric_and_self_similar(h in 0.05f64..0.95, s in 0.01f64..5.0, t in 0.01f64..5.0, c in 0.1f64..10.0) {
        let r = fbm_covariance(h, s, t).unwrap();
        prop_assert_eq!(r, fbm_covariance(h, t, s).unwrap());
        let scaled = fbm_covariance(h, c * s, c * t).unwrap();
        prop_assert!(relative_eq!(scaled, c.powf(2.0 * h) * r, max_relative = 1e-10, epsilon = 1e-12));
        // Cauchy-Schwarz for a covariance.
        let bound = (fbm_covariance(h, s, s).unwrap() * fbm_covariance(h, t, t).unwrap()).sqrt();
        prop_assert!(r.abs() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn kernel_is_positive(h in hurst_value(), t in 0.1f64..4.0, frac in 0.001f64..0.999) {
        let spec = make_kernel_spec(h).unwrap();
        prop_assert!(kernel_value(&spec, t, frac * t).unwrap() > 0.0);
    }

    #[test]
    fn fractional_transform_is_linear_for_zero_start(
        h in hurst_value(),
        a in -5.0f64..5.0,
        tail in prop::collection::vec(-2.0f64..2.0, 8..40),
    ) {
        let mut values = vec![0.0];
        values.extend(tail);
        let grid = uniform_grid(1.0, values.len() - 1).unwrap();
        let config = FractionalConfig::new(make_kernel_spec(h).unwrap(), 1.3).unwrap();
        let base = fractional_velocity(&config, &Path::new(grid.clone(), values.clone()).unwrap()).unwrap();
        let scaled_input: Vec<f64> = values.iter().map(|v| a * v).collect();
        let scaled = fractional_velocity(&config, &Path::new(grid, scaled_input).unwrap()).unwrap();
        for (x, y) in base.transformed.values().iter().zip(scaled.transformed.values()) {
            prop_assert!(relative_eq!(a * x, *y, max_relative = 1e-12, epsilon = 1e-12));
        }
    }

    #[test]
    fn prefix_hull_matches_direct_scan(x in prop::collection::vec(-10.0f64..10.0, 2..200)) {
        let Ok(fast) = rs_series_with(&x, MeanConvention::Prefix) else {
            prop_assume!(false);
            unreachable!()
        };
        let slow = naive_prefix_rs(&x);
        let fast_t: Vec<usize> = fast.entries.iter().map(|e| e.0).collect();
        let slow_t: Vec<usize> = slow.iter().map(|e| e.0).collect();
        prop_assert_eq!(fast_t, slow_t);
        for (a, b) in fast.entries.iter().zip(&slow) {
            prop_assert!(relative_eq!(a.1, b.1, max_relative = 1e-9));
        }
    }

    #[test]
    fn rs_entries_are_positive_and_increasing(x in prop::collection::vec(-10.0f64..10.0, 2..200)) {
        for convention in [MeanConvention::FullSeries, MeanConvention::Prefix] {
            if let Ok(rs) = rs_series_with(&x, convention) {
                prop_assert!(rs.entries.iter().all(|e| e.1 > 0.0 && e.1.is_finite() && e.0 >= 2));
                prop_assert!(rs.entries.windows(2).all(|w| w[0].0 < w[1].0));
            }
        }
    }

    #[test]
    fn hurst_estimate_is_affine_invariant(
        x in prop::collection::vec(-10.0f64..10.0, 64..300),
        a in prop_oneof![-20.0f64..-0.05, 0.05f64..20.0],
        c in -100.0f64..100.0,
    ) {
        let base = estimate_hurst(&x, 16);
        prop_assume!(base.is_ok());
        let base = base.unwrap();
        let y: Vec<f64> = x.iter().map(|v| a * v + c).collect();
        let moved = estimate_hurst(&y, 16).unwrap();
        prop_assert_eq!(base.points_used, moved.points_used);
        prop_assert!((base.hurst - moved.hurst).abs() < 1e-9);
        prop_assert!((base.r_squared - moved.r_squared).abs() < 1e-9);
        prop_assert!(relative_eq!(base.lambda, moved.lambda, max_relative = 1e-9));
    }

    #[test]
    fn grid_rejects_unsorted_points(mut pts in prop::collection::vec(0.0f64..10.0, 3..20)) {
        pts[0] = 0.0;
        let sorted = pts.windows(2).all(|w| w[0] < w[1]);
        prop_assert_eq!(TimeGrid::new(pts).is_ok(), sorted);
    }
}

#[test]
fn full_series_mean_matches_hand_computation() {
    // Z = (1, 0, 1, 0) with the full-series mean 0; S_3 = sqrt(8/9).
    let rs = rs_series(&[1.0, -1.0, 1.0, -1.0]).unwrap();
    let t3 = rs.entries.iter().find(|e| e.0 == 3).unwrap().1;
    assert!(relative_eq!(t3, 1.0 / (8.0f64 / 9.0).sqrt(), max_relative = 1e-14));
}
