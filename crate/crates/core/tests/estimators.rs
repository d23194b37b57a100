use bmhull::closed_form::{expected_volume_kalpha, facet_probability, psi, SimplexPoint};
use bmhull::experiments::{
    estimate_hull_stats, facet_census, hausdorff_convergence, intrinsic_mc, sweep_alpha, walk1d,
    VertexSet, WalkVariant,
};
use bmhull::geometry::ShapeClass;
use bmhull::stats::{combined_stderr, Runner};
use bmhull::RngStream;

#[test]
fn estimators_ignore_worker_count() {
    let (one, four) = (Runner::serial(), Runner::new(4).unwrap());
    let a = estimate_hull_stats(&one, 3, 80.0, 60, 9, VertexSet::Walk).unwrap();
    let b = estimate_hull_stats(&four, 3, 80.0, 60, 9, VertexSet::Walk).unwrap();
    assert_eq!(a, b);
    let a = sweep_alpha(&one, 2, &[10.0, 40.0, 160.0], 50, 4).unwrap();
    let b = sweep_alpha(&four, 2, &[10.0, 40.0, 160.0], 50, 4).unwrap();
    assert_eq!(a, b);
    let a = walk1d(&one, WalkVariant::EndpointExpectationIncl, 1.0, 4.0, 2000, 2).unwrap();
    let b = walk1d(&four, WalkVariant::EndpointExpectationIncl, 1.0, 4.0, 2000, 2).unwrap();
    assert_eq!(a, b);
    let a = intrinsic_mc(&one, 3, 2, 100.0, 40, 5).unwrap();
    let b = intrinsic_mc(&four, 3, 2, 100.0, 40, 5).unwrap();
    assert_eq!(a, b);
    let a = hausdorff_convergence(&one, 2, &[20.0, 80.0], 40, 6).unwrap();
    let b = hausdorff_convergence(&four, 2, &[20.0, 80.0], 40, 6).unwrap();
    assert_eq!(a, b);
    let class = ShapeClass::equilateral(3, 1.0, 0.2, 0.2).unwrap();
    let a = facet_census(&one, 3, 300.0, &class, &[0.5, 1.0], 20, 7).unwrap();
    let b = facet_census(&four, 3, 300.0, &class, &[0.5, 1.0], 20, 7).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rerun_is_bit_identical() {
    let r = Runner::serial();
    let a = estimate_hull_stats(&r, 2, 50.0, 100, 3, VertexSet::WithOrigin).unwrap();
    let b = estimate_hull_stats(&r, 2, 50.0, 100, 3, VertexSet::WithOrigin).unwrap();
    assert_eq!(a.volume.mean.to_bits(), b.volume.mean.to_bits());
    assert_eq!(a.volume.config_digest, b.volume.config_digest);
    let c = estimate_hull_stats(&r, 2, 50.0, 100, 4, VertexSet::WithOrigin).unwrap();
    assert_ne!(a.volume.mean, c.volume.mean);
}

#[test]
fn sweep_rows_are_nested_and_increasing() {
    let rows = sweep_alpha(&Runner::serial(), 3, &[27.0, 108.0, 432.0], 200, 10).unwrap();
    assert!(rows.iter().all(|r| r.monotonicity_violations == 0));
    assert!(rows.windows(2).all(|w| w[1].ratio > w[0].ratio));
    assert!(rows.iter().all(|r| r.lower_bound_holds()));
}

#[test]
fn volume_integral_increases_in_alpha() {
    let alphas = [20.0, 80.0, 320.0, 1280.0];
    let est: Vec<_> = alphas
        .iter()
        .enumerate()
        .map(|(k, &a)| expected_volume_kalpha(2, a, 200_000, &mut RngStream::new(77, k as u64)).unwrap())
        .collect();
    for w in est.windows(2) {
        assert!(w[1].estimate + 3.0 * combined_stderr(w[0].stderr, w[1].stderr) > w[0].estimate);
    }
    assert!(est[3].estimate > est[0].estimate);
}

#[test]
fn facet_probability_is_a_probability_in_the_large_alpha_regime() {
    for &alpha in &[10.0, 40.0, 160.0] {
        for i in 1..10 {
            for j in 1..10 {
                let (a, b) = (i as f64 / 20.0, j as f64 / 20.0);
                if a + b >= 0.95 {
                    continue;
                }
                let r = SimplexPoint::new(vec![a, b]).unwrap();
                let p = facet_probability(&r, alpha).unwrap().value;
                assert!(p > 0.0 && p <= 2.0);
                let min_gap = a.min(b).min(1.0 - a - b);
                if alpha * min_gap >= 4.0 {
                    assert!(p <= 1.0, "alpha {alpha}, r ({a}, {b}): {p}");
                }
            }
        }
    }
}

#[test]
fn psi_is_decreasing_with_the_stated_tail() {
    let grid: Vec<f64> = (0..60).map(|k| 10f64.powf(-3.0 + 7.0 * k as f64 / 59.0)).collect();
    let values: Vec<f64> = grid.iter().map(|&t| psi(t).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    let tail = psi(1e4).unwrap() * (std::f64::consts::PI * 1e4).sqrt();
    assert!((tail - 1.0).abs() <= 1e-2);
}
