//! Polar integration of `|f|^p`-type integrands, with cells graded toward the
//! zeros of `f`.
//!
//! For non-even `p`, `θ ↦ |f(re^{iθ})|^p` loses smoothness near a zero of `f`
//! close to the circle, and `r ↦ M_p^p(r, f)` has a kink at every `|z_k|`.
//! Radial cells shrink geometrically toward each `|z_k|`; circles passing near a
//! zero get angular cells shrinking toward its argument. Circles far from
//! all zeros use the trapezoidal rule, which converges geometrically there.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::legendre::GaussLegendre;

#[derive(Clone, Copy, Debug)]
pub struct PolarOptions {
    /// Gauss–Legendre nodes per cell.
    pub order: usize,
    /// Uniform radial cells before grading; `0` picks one cell per half unit of radius (at least 8).
    pub radial_cells: usize,
    /// Uniform angular cells on circles that pass near a zero.
    pub angular_cells: usize,
    /// Smallest graded radial cell, relative to the uniform cell width.
    pub min_cell: f64,
    /// A zero refines a circle when `|ln(|z_k|/r)|` is below this.
    pub near: f64,
    /// Minimal trapezoid count on circles away from zeros.
    pub trapezoid: usize,
}

impl Default for PolarOptions {
    fn default() -> Self {
        Self { order: 8, radial_cells: 0, angular_cells: 12, min_cell: 1e-4, near: 0.4, trapezoid: 48 }
    }
}

impl PolarOptions {
    /// A finer configuration, used for self-checks.
    pub fn refined(&self) -> Self {
        Self {
            order: self.order + 6,
            radial_cells: if self.radial_cells == 0 { 0 } else { 2 * self.radial_cells },
            angular_cells: 2 * self.angular_cells,
            min_cell: self.min_cell * 1e-2,
            near: self.near * 1.5,
            trapezoid: 2 * self.trapezoid,
        }
    }
}

/// Quadrature over the disc `|z| < radius`, adapted to a set of zeros.
#[derive(Clone, Debug)]
pub struct PolarIntegrator {
    radius: f64,
    /// `(ln |z_k|, arg z_k)` for the nonzero zeros.
    zeros: Vec<(f64, f64)>,
    opts: PolarOptions,
    /// Nodes and weights of `∫₀^R g(r) r dr`.
    radial: Vec<(f64, f64)>,
    harmonics: usize,
}

impl PolarIntegrator {
    /// `harmonics` bounds the angular frequency content of the integrand away
    /// from zeros (about `deg f · p / 2`).
    pub fn new(radius: f64, zeros: &[Complex64], harmonics: usize, opts: &PolarOptions) -> Self {
        let base_cells = if opts.radial_cells == 0 {
            ((2.0 * radius).ceil() as usize).max(8)
        } else {
            opts.radial_cells
        };
        let base_w = radius / base_cells as f64;
        let h_min = opts.min_cell * base_w;
        let mut bps: Vec<f64> = (0..=base_cells).map(|j| radius * j as f64 / base_cells as f64).collect();
        let grade_at = |rho: f64, bps: &mut Vec<f64>| {
            bps.push(rho);
            let mut s = h_min;
            while s < 0.5 * base_w {
                bps.push(rho + s);
                bps.push(rho - s);
                s *= 2.0;
            }
        };
        // Origin: `|f|^p ~ r^{mp}` for a zero of order m there.
        grade_at(0.0, &mut bps);
        for z in zeros {
            let rho = z.norm();
            if rho <= radius {
                grade_at(rho, &mut bps);
            } else if rho - radius < 0.5 * base_w {
                let mut s = rho - radius;
                while s < 0.5 * base_w {
                    bps.push(radius - s);
                    s *= 2.0;
                }
            }
        }
        let bps = sorted_breakpoints(bps, 0.0, radius);
        let rule = GaussLegendre::cached(opts.order);
        let mut radial = Vec::with_capacity(bps.len() * opts.order);
        for w in bps.windows(2) {
            for (r, wt) in rule.on_interval(w[0], w[1]) {
                radial.push((r, wt * r));
            }
        }
        let zeros = zeros.iter().filter(|z| z.norm() > 0.0).map(|z| (z.norm().ln(), z.arg())).collect();
        Self { radius, zeros, opts: *opts, radial, harmonics }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn radial_nodes(&self) -> &[(f64, f64)] {
        &self.radial
    }

    /// Angular nodes and weights for `∫₀^{2π} g(θ) dθ` on the circle of radius `r`.
    pub fn circle_rule(&self, r: f64) -> Vec<(f64, f64)> {
        circle_rule(r, &self.zeros, self.harmonics, &self.opts)
    }

    /// `∫_{|z|<R} f(z) dA` for a vector-valued integrand.
    pub fn integrate<const N: usize>(&self, mut f: impl FnMut(Complex64) -> [f64; N]) -> [f64; N] {
        let mut total = [0.0; N];
        for &(r, wr) in &self.radial {
            let ring = self.integrate_circle(r, &mut f);
            for (t, v) in total.iter_mut().zip(ring) {
                *t += wr * v;
            }
        }
        total
    }

    /// `∫₀^{2π} f(re^{iθ}) dθ`.
    pub fn integrate_circle<const N: usize>(&self, r: f64, mut f: impl FnMut(Complex64) -> [f64; N]) -> [f64; N] {
        let mut acc = [0.0; N];
        for (theta, w) in self.circle_rule(r) {
            let v = f(Complex64::from_polar(r, theta));
            for (a, x) in acc.iter_mut().zip(v) {
                *a += w * x;
            }
        }
        acc
    }
}

/// Angular rule on the circle of radius `r`, graded toward nearby zeros given as
/// `(ln |z_k|, arg z_k)`.
pub fn circle_rule(r: f64, zeros: &[(f64, f64)], harmonics: usize, opts: &PolarOptions) -> Vec<(f64, f64)> {
    let ln_r = r.ln();
    let near: Vec<(f64, f64)> = zeros
        .iter()
        .filter_map(|&(ln_rho, theta)| {
            let eta = (ln_rho - ln_r).abs();
            (eta < opts.near).then_some((theta, eta.max(1e-15)))
        })
        .collect();
    if near.is_empty() || r == 0.0 {
        let m = opts.trapezoid.max(4 * harmonics + 32);
        let h = 2.0 * PI / m as f64;
        return (0..m).map(|j| (h * j as f64, h)).collect();
    }
    let cells = opts.angular_cells.max(1);
    let half = PI / cells as f64;
    let mut bps: Vec<f64> = (0..cells).map(|j| 2.0 * PI * j as f64 / cells as f64).collect();
    for (theta, eta) in near {
        bps.push(theta);
        let mut s = eta;
        while s < half {
            bps.push(theta + s);
            bps.push(theta - s);
            s *= 2.0;
        }
    }
    let mut wrapped: Vec<f64> = bps.into_iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
    wrapped.push(2.0 * PI);
    let bps = sorted_breakpoints(wrapped, 0.0, 2.0 * PI);
    let rule = GaussLegendre::cached(opts.order);
    let mut out = Vec::with_capacity(bps.len() * opts.order);
    for w in bps.windows(2) {
        out.extend(rule.on_interval(w[0], w[1]));
    }
    out
}

fn sorted_breakpoints(mut bps: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    bps.retain(|x| x.is_finite());
    for x in bps.iter_mut() {
        *x = x.clamp(lo, hi);
    }
    bps.push(lo);
    bps.push(hi);
    bps.sort_by(|a, b| a.total_cmp(b));
    let gap = 1e-14 * (hi - lo).abs().max(1.0);
    let mut out: Vec<f64> = Vec::with_capacity(bps.len());
    for x in bps {
        if out.last().is_none_or(|&l| x - l > gap) {
            out.push(x);
        }
    }
    if let Some(l) = out.last_mut() {
        *l = hi;
    }
    out
}
