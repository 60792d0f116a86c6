//! Upper incomplete gamma function, in the scaled forms needed for `Γ(x, x)`.

use crate::quadrature::adaptive::{integrate_tail, TailOptions};

/// `ln Γ(n, x)` for a positive integer `n`, from
/// `Γ(n, x) = (n-1)! e^{-x} Σ_{k<n} x^k/k!`, summed in log space.
pub fn ln_upper_gamma_int(n: u32, x: f64) -> f64 {
    assert!(n >= 1, "integer order must be positive");
    assert!(x > 0.0, "argument must be positive");
    let lx = x.ln();
    // t_k = ln((n-1)!/k!) + k ln x, from k = n-1 downward.
    let mut terms = Vec::with_capacity(n as usize);
    let mut t = (n - 1) as f64 * lx;
    terms.push(t);
    for k in (0..n - 1).rev() {
        t += ((k + 1) as f64).ln() - lx;
        terms.push(t);
    }
    -x + log_sum_exp(&terms)
}

/// `Γ(a, x) x^{1-a} e^{x} = ∫₀^∞ (1 + s/x)^{a-1} e^{-s} ds`, by quadrature.
pub fn scaled_upper_gamma(a: f64, x: f64) -> f64 {
    assert!(x > 0.0, "argument must be positive");
    let t = integrate_tail(
        |s| ((a - 1.0) * (s / x).ln_1p() - s).exp(),
        0.0,
        &TailOptions { first_width: 1.0, tol: 1e-15, max_panels: 64, panel_rel_tol: 1e-14, ..Default::default() },
    );
    t.value
}

/// `ln Γ(a, x)` for real `a`; exact Poisson sum for integer `a`.
pub fn ln_upper_gamma(a: f64, x: f64) -> f64 {
    if a >= 1.0 && a.fract() == 0.0 && a < 1e6 {
        return ln_upper_gamma_int(a as u32, x);
    }
    scaled_upper_gamma(a, x).ln() + (a - 1.0) * x.ln() - x
}

/// `Γ(x, x) e^x x^{-x} x^{1/2} / √(π/2)`, which tends to 1 as `x → ∞`.
pub fn gamma_asymptotic_ratio(x: f64) -> f64 {
    let ln_ratio = ln_upper_gamma(x, x) + x - x * x.ln() + 0.5 * x.ln() - 0.5 * (0.5 * std::f64::consts::PI).ln();
    ln_ratio.exp()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}
