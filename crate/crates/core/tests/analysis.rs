use lohe_core::analysis::{
    aux_identity_check, barrier_ode, critical_radius, diameter, eta_max, lambda_functional,
    practical_sync_limit, practical_sync_threshold, sync_envelopes, thm31_bound, zeta_roots,
};
use lohe_core::matcore::sample_haar;
use lohe_core::transport::PointCloud;
use lohe_core::{LoheError, Rng};
use proptest::prelude::*;

fn haar_cloud(rng: &mut Rng, d: usize, n: usize) -> PointCloud<f64> {
    PointCloud::from_unitaries((0..n).map(|_| sample_haar(rng, d)).collect()).unwrap()
}

fn cubic(z: f64, eta: f64) -> f64 {
    0.5 * z * z * z - z + eta
}

#[test]
fn zeta_roots_bracket_the_critical_radius() {
    let r = critical_radius::<f64>();
    assert!((r - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    for k in 0..100 {
        let eta = eta_max::<f64>() * k as f64 / 100.0;
        let roots = zeta_roots(eta).unwrap();
        assert!(roots.zeta1 >= 0.0 && roots.zeta1 < r && r < roots.zeta2);
        assert!(roots.zeta2 <= 2f64.sqrt() + 1e-15);
        assert!(cubic(roots.zeta1, eta).abs() <= 1e-12);
        assert!(cubic(roots.zeta2, eta).abs() <= 1e-12);
    }
}

#[test]
fn zeta_roots_merge_at_the_boundary() {
    let eta = eta_max::<f64>() * (1.0 - 1e-10);
    let roots = zeta_roots(eta).unwrap();
    let r = critical_radius::<f64>();
    // The polynomial has a double root at √(2/3) when η reaches its maximum.
    assert!(cubic(r, eta_max::<f64>()).abs() < 1e-15);
    assert!((roots.zeta1 - r).abs() < 1e-4);
    assert!((roots.zeta2 - r).abs() < 1e-4);
    assert!(matches!(zeta_roots(eta_max::<f64>()), Err(LoheError::NoTwoRoots { .. })));
    assert!(matches!(zeta_roots(-0.01f64), Err(LoheError::NoTwoRoots { .. })));
}

#[test]
fn barrier_rk4_matches_fine_euler() {
    let (alpha, kappa, y0) = (0.1, 1.0, 0.5);
    let grid: Vec<f64> = (0..=2000).map(|k| k as f64 * 1e-3).collect();
    let sol = barrier_ode(alpha, kappa, y0, &grid).unwrap();
    let h = 1e-6;
    let mut y = y0;
    let mut step = 0usize;
    for (k, &t) in grid.iter().enumerate() {
        let target = (t / h).round() as usize;
        while step < target {
            y += h * (alpha - kappa * y + 0.5 * kappa * y * y * y);
            step += 1;
        }
        assert!((sol.y[k] - y).abs() < 1e-6, "t={t}: {} vs {y}", sol.y[k]);
    }
    let zeta2 = zeta_roots(alpha / kappa).unwrap().zeta2;
    assert!(sol.y.iter().all(|&v| v < zeta2));
    // y0 = 0.5 already lies below √(2/3).
    assert_eq!(sol.first_crossing, Some(0.0));
}

#[test]
fn barrier_crossing_from_above_the_critical_radius() {
    let (alpha, kappa) = (0.1, 1.0);
    let zeta2 = zeta_roots(alpha / kappa).unwrap().zeta2;
    let y0 = 0.5 * (critical_radius::<f64>() + zeta2);
    let grid: Vec<f64> = (0..=5000).map(|k| k as f64 * 1e-3).collect();
    let sol = barrier_ode(alpha, kappa, y0, &grid).unwrap();
    let t = sol.first_crossing.expect("solution enters the small ball");
    assert!(t > 0.0);
    let k = grid.iter().position(|&s| s == t).unwrap();
    assert!(sol.y[k] <= critical_radius::<f64>() && sol.y[k - 1] > critical_radius::<f64>());
}

#[test]
fn barrier_without_spread_matches_closed_form() {
    let (kappa, y0) = (1.3, 1.1);
    let grid: Vec<f64> = (0..=300).map(|k| k as f64 * 0.01).collect();
    let sol = barrier_ode(0.0, kappa, y0, &grid).unwrap();
    for (&t, &y) in grid.iter().zip(&sol.y) {
        let exact = (2.0 * y0 * y0 / ((2.0 - y0 * y0) * (2.0 * kappa * t).exp() + y0 * y0)).sqrt();
        assert!((y - exact).abs() < 1e-8);
    }
}

#[test]
fn envelope_values() {
    let (lo, hi) = sync_envelopes(1.0f64, 1.0, 1.0).unwrap();
    let e2 = 2f64.exp();
    assert!((hi - 2.0 / (e2 + 1.0)).abs() < 1e-15);
    assert!(lo <= hi);
    let (lo, hi) = sync_envelopes(1.2f64, 2.0, 40.0).unwrap();
    assert!(lo.abs() < 1e-30 && hi < 1e-30);
    assert!(matches!(
        sync_envelopes(2f64.sqrt(), 1.0, 1.0),
        Err(LoheError::OutsideSmallSupport { .. })
    ));
}

#[test]
fn growth_bound_values() {
    let expected = 16.0 / 500.0 * (1f64.exp() - 1.0);
    assert!((thm31_bound::<f64>(2, 100, 0.1) - expected).abs() < 1e-15);
    assert_eq!(thm31_bound::<f64>(3, 10, 0.0), 0.0);
    assert!((thm31_bound::<f64>(2, 200, 0.3) * 2.0 - thm31_bound::<f64>(2, 100, 0.3)).abs() < 1e-14);
    assert!(thm31_bound::<f64>(3, 100, 0.3) > thm31_bound::<f64>(2, 100, 0.3));
    assert!(thm31_bound::<f64>(2, 100, 0.4) > thm31_bound::<f64>(2, 100, 0.3));
}

#[test]
fn practical_limit_values() {
    assert!((practical_sync_limit(0.1f64, 1.0).unwrap() - 0.15).abs() < 1e-15);
    let a = practical_sync_limit(0.2f64, 3.0).unwrap();
    let b = practical_sync_limit(0.2f64, 6.0).unwrap();
    assert!((a - 2.0 * b).abs() < 1e-15);
    let threshold = practical_sync_threshold(0.4f64);
    assert!(practical_sync_limit(0.4f64, threshold).is_err());
}

#[test]
fn aux_identity_on_a_singleton_cloud() {
    let mut rng = Rng::new(51);
    for d in 1..=4 {
        let u1 = sample_haar::<f64>(&mut rng, d);
        let u2 = sample_haar::<f64>(&mut rng, d);
        let cloud = PointCloud::from_unitaries(vec![u2.clone()]).unwrap();
        let id = aux_identity_check(&u1, &u2, &cloud).unwrap();
        assert!(id.gap <= 1e-12);
    }
}

#[test]
fn aux_identity_fuzz() {
    let mut rng = Rng::new(52);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let d = 1 + k % 4;
        let n = 1 + (rng.next_u64() % 16) as usize;
        let u1 = sample_haar::<f64>(&mut rng, d);
        let u2 = sample_haar::<f64>(&mut rng, d);
        let cloud = haar_cloud(&mut rng, d, n);
        let id = aux_identity_check(&u1, &u2, &cloud).unwrap();
        assert!((id.rhs - 2.0 * id.half_rhs).abs() < 1e-12);
        worst = worst.max(id.gap);
    }
    assert!(worst <= 1e-11, "worst gap {worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lambda_is_bounded_by_squared_diameter(seed in any::<u64>(), d in 1usize..=4, n in 1usize..=20) {
        let cloud = haar_cloud(&mut Rng::new(seed), d, n);
        let dia = diameter(&cloud);
        let lambda = lambda_functional(&cloud);
        prop_assert!(lambda >= 0.0);
        prop_assert!(lambda <= dia * dia * (1.0 + 1e-12));
    }

    #[test]
    fn envelopes_are_ordered(d0 in 0.0f64..1.414, kappa in 0.0f64..5.0, t in 0.0f64..10.0) {
        let (lo, hi) = sync_envelopes(d0, kappa, t).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-12) + 1e-300);
        let (lo0, hi0) = sync_envelopes(d0, kappa, 0.0).unwrap();
        prop_assert!((lo0 - d0 * d0).abs() < 1e-15 && (hi0 - d0 * d0).abs() < 1e-15);
    }
}
