use bergman::logconvex::*;
use bergman::*;
use proptest::prelude::*;
use statrs::function::gamma::{gamma_ur, ln_gamma};

/// `S(x₀, e^{αx²})` through the upper incomplete gamma function: with
/// `n = 2αx₀²`, `S = e^{αx₀²} x₀^{-n} α^{-(n+1)/2} Γ((n+1)/2, αx₀²)/2`.
fn gaussian_s(alpha: f64, x0: f64) -> f64 {
    let t = alpha * x0 * x0;
    let n = 2.0 * t;
    let a = 0.5 * (n + 1.0);
    (t - n * x0.ln() - a * alpha.ln() + gamma_ur(a, t).ln() + ln_gamma(a)).exp() / 2.0
}

#[test]
fn polynomial_gauge_diverges_or_not() {
    // λ = x³: S = ∫ (x₀/x)³ (x/x₀)³ dx diverges.
    let g = FnGauge(|x: f64| 3.0 * x.ln());
    assert!(s_integral(&g, 2.0, DEFAULT_S_TOL).unwrap().is_infinite());
}

#[test]
fn s_rejects_bad_start() {
    let g = FnGauge(|x: f64| x * x);
    assert!(s_integral(&g, 0.0, DEFAULT_S_TOL).is_err());
}

#[test]
fn fock_s_bounded_below() {
    let spec = WeightSpec::fock(1.0).unwrap();
    let grid: Vec<f64> = (0..=36).map(|i| 1.0 + 0.25 * i as f64).collect();
    let rep = liminf_probe(&WeightGauge(&spec), &grid, DEFAULT_S_TOL).unwrap();
    assert!(rep.rows.iter().all(|r| r.1 > 0.5));
    assert!(rep.positive && !rep.all_divergent);
}

#[test]
fn decay_needs_plane() {
    let spec = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
    assert!(decay_check(&Poly::monomial(1), 2.0, &spec, &[0.1, 0.2, 0.3]).is_err());
}

#[test]
fn decay_integrability_implies_small_tail() {
    let spec = WeightSpec::fock(1.0).unwrap();
    let r_grid: Vec<f64> = (1..=120).map(|i| 0.08 * i as f64).collect();
    for n in 0..4 {
        let rep = decay_check(&Poly::from_real(&vec![1.0; n + 1]), 2.0, &spec, &r_grid).unwrap();
        assert!(rep.pass, "n={n}: {:?}", rep.failure);
        assert!(rep.g_over_lambda_integral.is_finite());
        assert!(rep.g_over_lambda_final_ratio < 1e-6);
    }
}

#[test]
fn gamma_ratio_strictly_increasing() {
    let rep = gamma_ratio_check(&[5.0, 10.0, 15.0, 30.0, 60.0, 120.0]).unwrap();
    assert!(rep.increasing && rep.in_band);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gaussian_gauge_matches_incomplete_gamma(alpha in 0.2f64..3.0, x0 in 0.5f64..4.0) {
        let spec = WeightSpec::fock(alpha).unwrap();
        let s = s_integral(&WeightGauge(&spec), x0, DEFAULT_S_TOL).unwrap();
        let exact = gaussian_s(alpha, x0);
        prop_assert!(((s - exact) / exact).abs() < 1e-9, "{} vs {}", s, exact);
    }

    #[test]
    fn scale_invariance(x0 in 0.5f64..8.0, c in 0.01f64..100.0) {
        let spec = WeightSpec::fock(1.0).unwrap();
        let g = WeightGauge(&spec);
        let a = s_integral(&g, x0, DEFAULT_S_TOL).unwrap();
        let b = s_integral(&Scaled { inner: g, factor: c }, x0, DEFAULT_S_TOL).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn means_are_log_convex(c in prop::collection::vec(-1.0f64..1.0, 1..6), p in 1.0f64..4.0) {
        let f = Poly::from_real(&c);
        let r_grid: Vec<f64> = (1..=60).map(|i| 0.05 * i as f64).collect();
        let rep = logconvexity_check(&f, p, &r_grid).unwrap();
        prop_assert!(rep.pass, "min slope change {}", rep.min_slope_change);
    }
}
