//! One-dimensional adaptive integration on finite intervals and on half-lines.

use super::legendre::GaussLegendre;

const PANEL_ORDER: usize = 15;
const MAX_DEPTH: usize = 48;

/// Adaptive bisection with a 15-point Gauss–Legendre panel rule. A panel is
/// accepted once the rule on the panel and on its two halves agree to the
/// mixed tolerance `abs_tol + rel_tol·|value|`.
pub fn integrate(f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let mut f = f;
    if a == b {
        return 0.0;
    }
    let rule = GaussLegendre::cached(PANEL_ORDER);
    let whole = rule.integrate(a, b, &mut f);
    refine(&mut f, &rule, a, b, whole, abs_tol, rel_tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &mut impl FnMut(f64) -> f64,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule.integrate(a, m, &mut *f);
    let right = rule.integrate(m, b, &mut *f);
    let halves = left + right;
    if !halves.is_finite() {
        return halves;
    }
    let err = (halves - whole).abs();
    if err <= abs_tol.max(rel_tol * halves.abs()) || depth >= MAX_DEPTH || m <= a || m >= b {
        return halves;
    }
    let sub_tol = 0.5 * abs_tol;
    refine(f, rule, a, m, left, sub_tol, rel_tol, depth + 1)
        + refine(f, rule, m, b, right, sub_tol, rel_tol, depth + 1)
}

/// Result of integrating over `[start, ∞)` by doubling panels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailIntegral {
    pub value: f64,
    /// Contribution of the last panel.
    pub last_increment: f64,
    /// `|last increment| / |previous increment|`.
    pub decay_ratio: f64,
    /// Right end of the last panel.
    pub radius: f64,
    pub panels: usize,
    pub converged: bool,
}

/// Parameters for [`integrate_tail`].
#[derive(Clone, Copy, Debug)]
pub struct TailOptions {
    pub first_width: f64,
    /// Mixed tolerance on the last increment: `|inc| <= tol·(1 + |total|)`.
    pub tol: f64,
    /// Required ratio between consecutive increments at acceptance.
    pub max_ratio: f64,
    pub max_panels: usize,
    pub panel_rel_tol: f64,
}

impl Default for TailOptions {
    fn default() -> Self {
        Self { first_width: 1.0, tol: 1e-12, max_ratio: 0.5, max_panels: 64, panel_rel_tol: 1e-13 }
    }
}

/// Integrates `f` over `[start, ∞)` on panels whose widths double. Converged
/// when an increment is below the tolerance and shrank by at least
/// `max_ratio` relative to its predecessor.
pub fn integrate_tail(mut f: impl FnMut(f64) -> f64, start: f64, opts: &TailOptions) -> TailIntegral {
    let mut total = 0.0;
    let mut prev_inc: Option<f64> = None;
    let mut a = start;
    let mut width = opts.first_width;
    let mut out = TailIntegral {
        value: 0.0,
        last_increment: f64::INFINITY,
        decay_ratio: f64::INFINITY,
        radius: start,
        panels: 0,
        converged: false,
    };
    for k in 0..opts.max_panels {
        let b = a + width;
        let inc = integrate(&mut f, a, b, opts.tol * 1e-3, opts.panel_rel_tol);
        total += inc;
        let ratio = match prev_inc {
            Some(p) if p != 0.0 => (inc / p).abs(),
            Some(_) if inc == 0.0 => 0.0,
            Some(_) => f64::INFINITY,
            None => f64::INFINITY,
        };
        out = TailIntegral {
            value: total,
            last_increment: inc,
            decay_ratio: ratio,
            radius: b,
            panels: k + 1,
            converged: false,
        };
        if !total.is_finite() || !inc.is_finite() {
            out.value = f64::INFINITY;
            return out;
        }
        if inc.abs() <= opts.tol * (1.0 + total.abs()) && ratio < opts.max_ratio {
            out.converged = true;
            return out;
        }
        prev_inc = Some(inc);
        a = b;
        width *= 2.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrals() {
        let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-14, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
        let v = integrate(|x| x.sqrt(), 0.0, 1.0, 1e-13, 1e-13);
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_tail() {
        let t = integrate_tail(|x| (-x * x).exp(), 0.0, &TailOptions::default());
        assert!(t.converged);
        assert!((t.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn constant_integrand_diverges() {
        let t = integrate_tail(|_| 1.0, 1.0, &TailOptions { max_panels: 40, ..Default::default() });
        assert!(!t.converged);
    }

    #[test]
    fn overflow_reports_infinite() {
        let t = integrate_tail(|x| (x * x).exp(), 0.0, &TailOptions::default());
        assert!(!t.converged);
        assert!(t.value.is_infinite());
    }
}
