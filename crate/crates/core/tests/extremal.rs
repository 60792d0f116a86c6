use std::f64::consts::PI;

use bergman::extremal::*;
use bergman::quadrature::{build_plane_grid_with, PlaneGridOptions};
use bergman::space::{norm, pairing};
use bergman::*;
use proptest::prelude::*;

fn disc() -> (WeightSpec, QuadGrid) {
    (WeightSpec::affine(2.0, 1.0, 1.0).unwrap(), build_disc_grid(1.0, 48, 40).unwrap())
}

fn fock() -> (WeightSpec, QuadGrid) {
    let spec = WeightSpec::fock(1.0).unwrap();
    let grid = build_plane_grid_with(&spec, &PlaneGridOptions { angular_order: 40, ..PlaneGridOptions::new(1e-13, 16) }).unwrap();
    (spec, grid)
}

fn e(p: f64) -> Exponents {
    Exponents::new(p).unwrap()
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn kernel() -> impl Strategy<Value = Poly> {
    prop::collection::vec(coeff(), 1..=4).prop_filter_map("non-zero", |c| {
        let k = Poly::new(c).ok()?;
        (k.coeff(0).norm() > 0.1).then_some(k)
    })
}

#[test]
fn fock_solution_for_z() {
    let (spec, grid) = fock();
    let s = solve_p2(&Poly::monomial(1), 3, &spec, &grid).unwrap();
    let target = Poly::monomial(1).scale(Complex64::new(1.0 / PI.sqrt(), 0.0));
    assert!(s.f.max_coeff_distance(&target) < 1e-12);
    assert!((s.dual_norm - PI.sqrt()).abs() < 1e-12);
}

#[test]
fn solutions_have_unit_norm() {
    let (spec, grid) = disc();
    let k = Poly::from_real(&[1.0, 0.5, -0.25]);
    for p in [1.5, 2.0, 3.0, 4.0] {
        let s = solve(&k, 6, e(p), &spec, &grid, &SolveOptions::default()).unwrap();
        assert!(s.converged);
        assert!((norm(&s.f, e(p), &spec, &grid).unwrap() - 1.0).abs() < 1e-10);
        let phi = pairing(&s.f, &k, &spec, &grid).unwrap();
        assert!((phi.re - s.dual_norm).abs() < 1e-10 * s.dual_norm);
    }
}

#[test]
fn zero_kernel_is_rejected() {
    let (spec, grid) = disc();
    assert!(solve(&Poly::zero(), 4, e(2.0), &spec, &grid, &SolveOptions::default()).is_err());
}

#[test]
fn degree_beyond_grid_is_rejected() {
    let (spec, grid) = fock();
    assert!(solve(&Poly::monomial(1), 30, e(3.0), &spec, &grid, &SolveOptions::default()).is_err());
}

#[test]
fn standalone_residual_certifies_solution() {
    let (spec, grid) = disc();
    let k = Poly::from_real(&[1.0, 1.0]);
    let s = solve(&k, 5, e(3.0), &spec, &grid, &SolveOptions::default()).unwrap();
    assert!(residual(&s.f, &k, e(3.0), &spec, &grid, 5).unwrap() < 1e-8);
    let wrong = Poly::monomial(3).scale(Complex64::new(1.0 / norm(&Poly::monomial(3), e(3.0), &spec, &grid).unwrap(), 0.0));
    assert!(residual(&wrong, &k, e(3.0), &spec, &grid, 5).unwrap() > 1e-2);
}

#[test]
fn kernel_probe_at_p2_matches_closed_form() {
    // k = 1, h = z on fock(1): T(k + δh) normalised is (1 + δz)/√(π(1+δ²)),
    // so ‖f_δ - f_0‖² = π⁻¹·π[(1/√(1+δ²) - 1)² + δ²/(1+δ²)].
    let (spec, grid) = fock();
    let deltas = [0.5, 0.1, 0.01];
    let rep = kernel_continuity_probe(&Poly::from_real(&[1.0]), &Poly::monomial(1), &deltas, e(2.0), &spec, &grid, 4, &SolveOptions::default())
        .unwrap();
    for (row, d) in rep.rows.iter().zip(deltas) {
        let s = 1.0 / (1.0 + d * d);
        let exact = ((s.sqrt() - 1.0).powi(2) + d * d * s).sqrt();
        assert!((row.distance - exact).abs() < 1e-10, "delta={d}: {} vs {exact}", row.distance);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scaling_the_kernel(k in kernel(), c in 0.1f64..10.0, p in 1.5f64..4.0) {
        let (spec, grid) = disc();
        let opts = SolveOptions::default();
        let a = solve(&k, 5, e(p), &spec, &grid, &opts).unwrap();
        let b = solve(&k.scale(Complex64::new(c, 0.0)), 5, e(p), &spec, &grid, &opts).unwrap();
        prop_assert!(a.converged && b.converged);
        prop_assert!(a.f.max_coeff_distance(&b.f) < 1e-7);
        prop_assert!((b.dual_norm / a.dual_norm - c).abs() < 1e-10 * c);
    }

    #[test]
    fn rotation_equivariance(k in kernel(), phi in 0.0f64..std::f64::consts::TAU, p in 1.5f64..4.0) {
        let (spec, grid) = disc();
        let opts = SolveOptions::default();
        let rot = |f: &Poly| Poly::new(f.coeffs().iter().enumerate().map(|(m, c)| c * Complex64::from_polar(1.0, phi * m as f64)).collect()).unwrap();
        let a = solve(&k, 5, e(p), &spec, &grid, &opts).unwrap();
        let b = solve(&rot(&k), 5, e(p), &spec, &grid, &opts).unwrap();
        prop_assert!(rot(&a.f).max_coeff_distance(&b.f) < 1e-7);
    }

    #[test]
    fn unique_from_different_starts(k in kernel(), p in 1.5f64..4.0) {
        let (spec, grid) = disc();
        let a = solve(&k, 5, e(p), &spec, &grid, &SolveOptions::default()).unwrap();
        let init = Poly::from_real(&[0.2, -1.0, 0.7, 0.1]);
        let b = solve(&k, 5, e(p), &spec, &grid, &SolveOptions { init: Some(init), ..Default::default() }).unwrap();
        prop_assert!(a.converged && b.converged);
        prop_assert!(a.f.max_coeff_distance(&b.f) < 10.0 * 1e-8);
    }

    #[test]
    fn dual_norm_bounded_by_kernel_norm(k in kernel(), p in 1.5f64..4.0) {
        let (spec, grid) = disc();
        let s = solve(&k, 5, e(p), &spec, &grid, &SolveOptions::default()).unwrap();
        let kq = norm(&k, e(p).conjugate(), &spec, &grid).unwrap();
        prop_assert!(s.dual_norm <= kq * (1.0 + 1e-10));
    }
}
