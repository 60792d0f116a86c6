use bergman::density::*;
use bergman::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn e(p: f64) -> Exponents {
    Exponents::new(p).unwrap()
}

fn random_unit(rng: &mut StdRng, p: Exponents, spec: &WeightSpec, grid: &QuadGrid) -> Poly {
    let d = rng.gen_range(0..=5);
    let c = (0..=d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let f = Poly::new(c).unwrap();
    let n = space::norm(&f, p, spec, grid).unwrap();
    f.scale(Complex64::new(1.0 / n, 0.0))
}

#[test]
fn point_evaluation_bound_dominates() {
    let mut rng = StdRng::seed_from_u64(11);
    let fock = WeightSpec::fock(1.0).unwrap();
    let fgrid = build_plane_grid(&fock, 1e-12, 16).unwrap();
    let aff = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
    let agrid = build_disc_grid(1.0, 48, 40).unwrap();
    for p in [1.5, 2.0, 3.0] {
        for _ in 0..100 {
            let f = random_unit(&mut rng, e(p), &fock, &fgrid);
            let g = random_unit(&mut rng, e(p), &aff, &agrid);
            for _ in 0..20 {
                let z = Complex64::from_polar(rng.gen_range(0.0..4.0), rng.gen_range(0.0..6.3));
                assert!(f.eval(z).norm() <= point_eval_bound(&fock, z, e(p)).unwrap());
                let z = Complex64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(0.0..6.3));
                assert!(g.eval(z).norm() <= point_eval_bound(&aff, z, e(p)).unwrap());
            }
        }
    }
}

#[test]
fn dilation_of_monomial_at_p2() {
    // ‖z^m - (ρz)^m‖ = (1 - ρ^m)‖z^m‖.
    let spec = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
    let grid = build_disc_grid(1.0, 48, 40).unwrap();
    let rhos = [0.5, 0.9, 0.99, 1.0];
    let rep = dilation_convergence(&Poly::monomial(3), &spec, e(2.0), &grid, &rhos).unwrap();
    for row in &rep.rows {
        assert!((row.distance - (1.0 - row.rho.powi(3)) * rep.norm).abs() < 1e-12);
    }
    assert!(rep.contractive && rep.monotone);
}

#[test]
fn dilation_rejects_bad_factor() {
    let spec = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
    let grid = build_disc_grid(1.0, 24, 16).unwrap();
    assert!(dilation_convergence(&Poly::monomial(1), &spec, e(2.0), &grid, &[1.5]).is_err());
}

#[test]
fn closed_graph_ratio_general_p() {
    for alpha in [0.5, 2.0] {
        for p in [1.5, 3.0] {
            let mut last = 0.0;
            for n in 0..=10 {
                let r = closed_graph_ratio(alpha, n, e(p), 1e-13).unwrap();
                let exact = ((n as f64 * p + 2.0) / (2.0 * alpha)).powf(1.0 / p);
                assert!((r - exact).abs() < 1e-8, "alpha={alpha} p={p} n={n}");
                assert!(r > last);
                last = r;
            }
        }
    }
}

#[test]
fn gaussian_density_cases() {
    let spec = WeightSpec::fock(1.0).unwrap();
    assert!(check_plane_density(&spec, e(2.0), 0.5, 0.75, 1e-10).unwrap().finite);
    assert!(!check_plane_density(&spec, e(3.0), 0.9, 0.5, 1e-10).unwrap().finite);
    assert!(check_plane_density(&spec, e(2.0), 1.0, 0.5, 1e-10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dilations_contract(c in prop::collection::vec(-1.0f64..1.0, 1..6), p in 1.2f64..4.0) {
        let spec = WeightSpec::fock(1.0).unwrap();
        let grid = build_plane_grid(&spec, 1e-12, 16).unwrap();
        let f = Poly::from_real(&c);
        prop_assume!(!f.is_zero());
        let rep = dilation_convergence(&f, &spec, e(p), &grid, &[0.3, 0.6, 0.9, 0.99]).unwrap();
        prop_assert!(rep.contractive);
        prop_assert!(rep.monotone);
    }

    #[test]
    fn certificates_for_fock(alpha in 0.05f64..4.0, p in 1.2f64..5.0) {
        prop_assert!(fock_density_certificate(alpha, e(p)).unwrap().finite);
    }
}
