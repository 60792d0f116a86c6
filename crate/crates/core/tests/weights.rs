use bergman::WeightSpec;
use proptest::prelude::*;

fn families() -> Vec<WeightSpec> {
    vec![
        WeightSpec::fock(0.5).unwrap(),
        WeightSpec::fock(2.0).unwrap(),
        WeightSpec::fock_plus(1.0).unwrap(),
        WeightSpec::affine(2.0, 1.0, 1.0).unwrap(),
        WeightSpec::affine(3.0, 0.5, 2.0).unwrap(),
        WeightSpec::power(2.0, 1.0).unwrap(),
        WeightSpec::power(0.5, 1.5).unwrap(),
    ]
}

#[test]
fn derivative_matches_central_differences() {
    let h = 1e-5;
    for spec in families() {
        let top = if spec.is_plane() { 8.0 } else { spec.upper() };
        for i in 1..200 {
            let x = top * i as f64 / 200.0;
            if x + h >= spec.upper() {
                continue;
            }
            let fd = (spec.eval_w(x + h).unwrap() - spec.eval_w(x - h).unwrap()) / (2.0 * h);
            let d = spec.eval_w_prime(x).unwrap();
            if d == 0.0 {
                assert!(fd.abs() < 1e-8, "{spec} x={x}");
                continue;
            }
            assert!(((fd - d) / d).abs() < 1e-6, "{spec} x={x}: {fd} vs {d}");
        }
    }
}

#[test]
fn known_derivative_values() {
    let p = WeightSpec::power(2.0, 1.0).unwrap();
    assert!((p.eval_w_prime(0.5).unwrap() + 1.0).abs() < 1e-15);
    let a = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
    assert_eq!(a.eval_w_prime(0.3).unwrap(), -1.0);
    let f = WeightSpec::fock(1.0).unwrap();
    assert!((f.eval_w_prime(1.0).unwrap() + (-1f64).exp()).abs() < 1e-16);
}

#[test]
fn out_of_domain_is_an_error() {
    let a = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
    assert!(a.eval_w(1.5).is_err());
    assert!(a.eval_w(-0.1).is_err());
}

#[test]
fn bad_parameters_are_rejected() {
    assert!(WeightSpec::fock(0.0).is_err());
    assert!(WeightSpec::affine(1.0, 2.0, 1.0).is_err());
    assert!(WeightSpec::power(-1.0, 1.0).is_err());
}

#[test]
fn named_families_validate() {
    for mut spec in families() {
        let v = spec.validate_default(6);
        assert!(v.passed, "{spec}: {:?}", v.violations);
        assert!(spec.is_validated());
    }
}

#[test]
fn increasing_custom_weight_fails_validation() {
    let mut spec = WeightSpec::custom("up", 1.0, |x| 1.0 + x, |_| 1.0, Some(2.0)).unwrap();
    assert!(!spec.validate_default(4).passed);
}

#[test]
fn names_round_trip() {
    for spec in families() {
        let s = spec.to_string();
        let back: WeightSpec = s.parse().unwrap();
        assert_eq!(back.to_string(), s);
    }
    assert!("fock:beta=1".parse::<WeightSpec>().is_err());
}

proptest! {
    #[test]
    fn weights_are_non_increasing(i in 0usize..7, x1 in 0.0f64..1.0, x2 in 0.0f64..1.0) {
        let spec = &families()[i];
        let top = if spec.is_plane() { 30.0 } else { spec.upper() };
        let (a, b) = if x1 <= x2 { (x1 * top, x2 * top) } else { (x2 * top, x1 * top) };
        prop_assert!(spec.eval_w(a).unwrap() >= spec.eval_w(b).unwrap());
    }

    #[test]
    fn fock_lambda_is_gaussian(alpha in 0.1f64..3.0, x in 0.05f64..4.0) {
        let spec = WeightSpec::fock(alpha).unwrap();
        let exact = (alpha * x * x).exp();
        prop_assert!(((spec.lambda_of(x).unwrap() - exact) / exact).abs() < 1e-14);
    }
}
