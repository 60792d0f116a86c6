//! Growth gauges `λ`, the tail integral `S(x₀, λ)` and decay of integral means.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::adaptive::{integrate_tail, TailOptions};
use crate::space::{dp_pow, integral_mean_pow};
use crate::special::gamma_asymptotic_ratio;
use crate::weights::{WeightSpec, DIFF_STEP};

pub const DEFAULT_S_TOL: f64 = 1e-13;

/// A positive increasing function `λ`, accessed through `ln λ` so that fast
/// growth does not overflow.
pub trait Gauge: Sync {
    fn ln_value(&self, x: f64) -> f64;

    /// `λ'(x)/λ(x)`; central differences of `ln λ` unless overridden.
    fn log_derivative(&self, x: f64) -> f64 {
        let h = DIFF_STEP * x.max(1.0);
        (self.ln_value(x + h) - self.ln_value(x - h)) / (2.0 * h)
    }
}

/// `λ(x) = -1/w'(x²)` of a plane weight.
#[derive(Clone, Copy, Debug)]
pub struct WeightGauge<'a>(pub &'a WeightSpec);

impl Gauge for WeightGauge<'_> {
    fn ln_value(&self, x: f64) -> f64 {
        self.0.ln_lambda(x)
    }

    fn log_derivative(&self, x: f64) -> f64 {
        self.0.lambda_log_derivative(x)
    }
}

/// A gauge given by its logarithm.
#[derive(Clone, Copy)]
pub struct FnGauge<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> Gauge for FnGauge<F> {
    fn ln_value(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// `c·λ` for a constant `c > 0`.
#[derive(Clone, Copy)]
pub struct Scaled<G> {
    pub inner: G,
    pub factor: f64,
}

impl<G: Gauge> Gauge for Scaled<G> {
    fn ln_value(&self, x: f64) -> f64 {
        self.inner.ln_value(x) + self.factor.ln()
    }

    fn log_derivative(&self, x: f64) -> f64 {
        self.inner.log_derivative(x)
    }
}

/// `S(x₀, λ) = ∫_{x₀}^∞ (λ(x₀)/λ(x)) (x/x₀)^{x₀λ'(x₀)/λ(x₀)} dx`, or
/// `f64::INFINITY` when the tail does not settle.
pub fn s_integral(gauge: &impl Gauge, x0: f64, tol: f64) -> Result<f64> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::InvalidArgument(format!("x0 must be positive, got {x0}")));
    }
    let ln0 = gauge.ln_value(x0);
    let a = x0 * gauge.log_derivative(x0);
    let lx0 = x0.ln();
    let t = integrate_tail(
        |x| (ln0 - gauge.ln_value(x) + a * (x.ln() - lx0)).exp(),
        x0,
        &TailOptions { first_width: 0.5 * x0.max(1.0), tol, max_panels: 64, panel_rel_tol: 1e-14, ..Default::default() },
    );
    Ok(if t.converged { t.value } else { f64::INFINITY })
}

#[derive(Clone, Debug, Serialize)]
pub struct LiminfReport {
    /// `(x₀, S(x₀, λ))`; divergent rows hold `inf`.
    pub rows: Vec<(f64, f64)>,
    /// Minimum of `S` over the upper half of the grid.
    pub liminf: f64,
    pub all_divergent: bool,
    pub positive: bool,
}

pub fn liminf_probe(gauge: &impl Gauge, x0_grid: &[f64], tol: f64) -> Result<LiminfReport> {
    if x0_grid.is_empty() || x0_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("x0 grid must be non-empty and increasing".into()));
    }
    let values: Vec<f64> = x0_grid.par_iter().map(|&x| s_integral(gauge, x, tol)).collect::<Result<_>>()?;
    let rows: Vec<(f64, f64)> = x0_grid.iter().copied().zip(values).collect();
    let half = rows.len() / 2;
    let liminf = rows[half..].iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let all_divergent = rows.iter().all(|r| r.1.is_infinite());
    Ok(LiminfReport { rows, liminf, all_divergent, positive: liminf > 0.0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub r: f64,
    /// `r³ M_p^p(r, f) w(r²)`.
    pub g: f64,
    /// `g(r)/λ(r)`.
    pub g_over_lambda: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub p: f64,
    pub preconditions_met: bool,
    /// Why the preconditions failed, when they did.
    pub failure: Option<String>,
    pub dp_infinity: f64,
    pub liminf: f64,
    /// `min -w'(r²)/w(r²)` over the upper half of the grid.
    pub c: f64,
    pub rows: Vec<DecayRow>,
    pub peak_index: usize,
    pub tail_monotone: bool,
    /// `g(last)/g(peak)`.
    pub final_ratio: f64,
    /// `∫_{r₀}^∞ g/λ dr`.
    pub g_over_lambda_integral: f64,
    /// `(g/λ)(last)/max(g/λ)`.
    pub g_over_lambda_final_ratio: f64,
    pub pass: bool,
}

pub const DECAY_RATIO: f64 = 1e-6;

/// Decay of `g(r) = r³ M_p^p(r, f) w(r²)` past its maximum on a plane weight.
pub fn decay_check(f: &Poly, p: f64, spec: &WeightSpec, r_grid: &[f64]) -> Result<DecayReport> {
    if !spec.is_plane() {
        return Err(Error::InvalidArgument("decay check needs a plane weight".into()));
    }
    if r_grid.len() < 3 || r_grid[0] <= 0.0 || r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("r grid must be positive, increasing, with at least 3 points".into()));
    }
    let upper = &r_grid[r_grid.len() / 2..];
    let mut failure = None;

    let dp_infinity = if f.is_zero() { 0.0 } else { dp_pow(f, p, spec, f64::INFINITY).unwrap_or(f64::INFINITY) };
    if !dp_infinity.is_finite() {
        failure = Some("D_p(inf, f) is not finite".to_string());
    }
    let gauge = WeightGauge(spec);
    let x0: Vec<f64> = upper.iter().copied().filter(|&x| x >= 1.0).step_by((upper.len() / 8).max(1)).collect();
    let liminf = if x0.is_empty() { f64::NAN } else { liminf_probe(&gauge, &x0, DEFAULT_S_TOL)?.liminf };
    if failure.is_none() && !(liminf > 0.0) {
        failure = Some(format!("liminf of S(x0, lambda) is not positive ({liminf})"));
    }
    let c = upper
        .iter()
        .map(|&r| (spec.ln_neg_w_prime(r * r) - spec.ln_w(r * r)).exp())
        .fold(f64::INFINITY, f64::min);
    if failure.is_none() && !(c > 0.0) {
        failure = Some(format!("-w' >= C w fails on the tail (C = {c})"));
    }

    let ln_g: Vec<f64> = r_grid
        .par_iter()
        .map(|&r| 3.0 * r.ln() + integral_mean_pow(f, p, r).ln() + spec.ln_w(r * r))
        .collect();
    let ln_gl: Vec<f64> = r_grid.iter().zip(&ln_g).map(|(&r, lg)| lg - gauge.ln_value(r)).collect();
    let rows: Vec<DecayRow> = r_grid
        .iter()
        .zip(ln_g.iter().zip(&ln_gl))
        .map(|(&r, (lg, lgl))| DecayRow { r, g: lg.exp(), g_over_lambda: lgl.exp() })
        .collect();

    let zero = f.is_zero();
    let peak_index = argmax(&ln_g);
    let tail_monotone = zero || ln_g[peak_index..].windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let final_ratio = if zero { 0.0 } else { (ln_g[ln_g.len() - 1] - ln_g[peak_index]).exp() };
    let gl_peak = argmax(&ln_gl);
    let g_over_lambda_final_ratio = if zero { 0.0 } else { (ln_gl[ln_gl.len() - 1] - ln_gl[gl_peak]).exp() };
    let g_over_lambda_integral = if zero {
        0.0
    } else {
        let t = integrate_tail(
            |r| (3.0 * r.ln() + integral_mean_pow(f, p, r).ln() + spec.ln_w(r * r) - gauge.ln_value(r)).exp(),
            r_grid[0],
            &TailOptions { tol: 1e-12, ..Default::default() },
        );
        if t.converged {
            t.value
        } else {
            f64::INFINITY
        }
    };

    let preconditions_met = failure.is_none();
    let pass = preconditions_met && tail_monotone && final_ratio < DECAY_RATIO;
    Ok(DecayReport {
        p,
        preconditions_met,
        failure,
        dp_infinity,
        liminf,
        c,
        rows,
        peak_index,
        tail_monotone,
        final_ratio,
        g_over_lambda_integral,
        g_over_lambda_final_ratio,
        pass,
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub p: f64,
    /// `(r, M_p(r, f))`.
    pub rows: Vec<(f64, f64)>,
    /// Changes of slope of `ln M_p(e^X, f)` between consecutive grid intervals.
    pub slope_changes: Vec<f64>,
    /// The same for `ln(r³ M_p^p(r, f))`.
    pub slope_changes_g: Vec<f64>,
    pub min_slope_change: f64,
    pub skipped: usize,
    pub pass: bool,
}

pub const CONVEXITY_TOL: f64 = 1e-8;

/// Convexity of `X ↦ ln M_p(e^X, f)` and `X ↦ ln(e^{3X} M_p^p(e^X, f))` on the grid.
pub fn logconvexity_check(f: &Poly, p: f64, r_grid: &[f64]) -> Result<ConvexityReport> {
    if r_grid.iter().any(|&r| !(r > 0.0)) || r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("r grid must be positive and increasing".into()));
    }
    let means: Vec<f64> = r_grid.par_iter().map(|&r| integral_mean_pow(f, p, r)).collect();
    let rows: Vec<(f64, f64)> = r_grid.iter().zip(&means).map(|(&r, m)| (r, m.powf(1.0 / p))).collect();
    let kept: Vec<(f64, f64)> = r_grid
        .iter()
        .zip(&means)
        .filter(|(_, m)| **m > 0.0)
        .map(|(&r, m)| (r.ln(), m.ln()))
        .collect();
    let skipped = r_grid.len() - kept.len();
    let changes = |y: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
        kept.windows(3)
            .map(|w| {
                let s1 = (y(w[1].0, w[1].1) - y(w[0].0, w[0].1)) / (w[1].0 - w[0].0);
                let s2 = (y(w[2].0, w[2].1) - y(w[1].0, w[1].1)) / (w[2].0 - w[1].0);
                s2 - s1
            })
            .collect()
    };
    let slope_changes = changes(&|_, lm| lm / p);
    let slope_changes_g = changes(&|x, lm| 3.0 * x + lm);
    let min_slope_change = slope_changes.iter().chain(&slope_changes_g).copied().fold(f64::INFINITY, f64::min);
    Ok(ConvexityReport {
        p,
        rows,
        slope_changes,
        slope_changes_g,
        min_slope_change,
        skipped,
        pass: min_slope_change >= -CONVEXITY_TOL,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaRatioReport {
    /// `(x, Γ(x,x) e^x x^{-x} x^{1/2}/√(π/2))`.
    pub rows: Vec<(f64, f64)>,
    pub increasing: bool,
    /// Every ratio at `x >= 10` lies in `(0.9, 1)`.
    pub in_band: bool,
    pub pass: bool,
}

pub fn gamma_ratio_check(x_grid: &[f64]) -> Result<GammaRatioReport> {
    if x_grid.is_empty() || x_grid.iter().any(|&x| !(x > 0.0)) || x_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("x grid must be positive and increasing".into()));
    }
    let rows: Vec<(f64, f64)> = x_grid.iter().map(|&x| (x, gamma_asymptotic_ratio(x))).collect();
    let increasing = rows.windows(2).all(|w| w[1].1 > w[0].1);
    let in_band = rows.iter().filter(|r| r.0 >= 10.0).all(|r| r.1 > 0.9 && r.1 < 1.0);
    Ok(GammaRatioReport { rows, increasing, in_band, pass: increasing && in_band })
}
