//! Area integrals over discs and the plane against radial measures.

pub mod adaptive;
pub mod legendre;
pub mod polar;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::weights::WeightSpec;
use adaptive::{integrate_tail, TailOptions};
pub use legendre::GaussLegendre;
pub use polar::{PolarIntegrator, PolarOptions};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_DISC_RADIAL_ORDER: usize = 48;
pub const DEFAULT_PLANE_PANEL_ORDER: usize = 24;
const MIN_ORDER: usize = 4;
const MAX_PLANE_CELLS: usize = 4096;
const MOMENT_STABILITY: f64 = 1e-13;

/// Default number of equispaced angles for polynomials up to `max_degree`.
pub fn default_angular_order(max_degree: usize) -> usize {
    4 * max_degree + 8
}

/// Tensor product rule: radial nodes for `∫ g(r) r dr` times `M` equispaced angles.
#[derive(Clone, Debug, Serialize)]
pub struct QuadGrid {
    pub radial_nodes: Vec<f64>,
    /// Weights of `∫₀^{R_eff} g(r) r dr`; the factor `r` is included.
    pub radial_weights: Vec<f64>,
    pub angular_order: usize,
    pub r_eff: f64,
    /// Absolute tail of the moment integrals beyond `r_eff` (0 on a disc).
    pub tail_bound: f64,
    /// Largest monomial index `m` whose moment the grid resolves.
    pub max_monomial: usize,
    pub plane: bool,
}

impl QuadGrid {
    pub fn len(&self) -> usize {
        self.radial_nodes.len() * self.angular_order
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes `r_i e^{iθ_j}` with their area weights `wr_i·2π/M`, radius-major.
    pub fn nodes(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        let m = self.angular_order;
        let dtheta = 2.0 * PI / m as f64;
        let phases: Vec<Complex64> = (0..m).map(|j| Complex64::from_polar(1.0, dtheta * j as f64)).collect();
        self.radial_nodes.iter().zip(&self.radial_weights).flat_map(move |(&r, &wr)| {
            let phases = phases.clone();
            (0..m).map(move |j| (phases[j] * r, wr * dtheta))
        })
    }

    pub(crate) fn check_compatible(&self, spec: &WeightSpec) -> Result<()> {
        if spec.is_plane() != self.plane {
            return Err(Error::InvalidArgument("grid and weight disagree on disc versus plane".into()));
        }
        if !self.plane && (self.r_eff - spec.radius()).abs() > 1e-12 * spec.radius() {
            return Err(Error::InvalidArgument(format!(
                "grid radius {} differs from weight radius {}",
                self.r_eff,
                spec.radius()
            )));
        }
        Ok(())
    }
}

/// Gauss–Legendre in `r` on `[0, R]` with `M` angles.
pub fn build_disc_grid(radius: f64, radial_order: usize, angular_order: usize) -> Result<QuadGrid> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument(format!("disc radius must be finite and positive, got {radius}")));
    }
    check_orders(radial_order, angular_order)?;
    let rule = GaussLegendre::cached(radial_order);
    let (radial_nodes, radial_weights) = rule.on_interval(0.0, radius).map(|(r, w)| (r, w * r)).unzip();
    Ok(QuadGrid {
        radial_nodes,
        radial_weights,
        angular_order,
        r_eff: radius,
        tail_bound: 0.0,
        max_monomial: radial_order.saturating_sub(2),
        plane: false,
    })
}

fn check_orders(radial_order: usize, angular_order: usize) -> Result<()> {
    if radial_order < MIN_ORDER {
        return Err(Error::InvalidOrder(format!("radial order {radial_order} < {MIN_ORDER}")));
    }
    if angular_order < MIN_ORDER {
        return Err(Error::InvalidOrder(format!("angular order {angular_order} < {MIN_ORDER}")));
    }
    Ok(())
}

/// Parameters of [`build_plane_grid_with`].
#[derive(Clone, Copy, Debug)]
pub struct PlaneGridOptions {
    /// Bound on the discarded tail of every resolved moment.
    pub tol: f64,
    pub max_monomial: usize,
    /// Gauss–Legendre nodes per radial cell.
    pub panel_order: usize,
    pub angular_order: usize,
}

impl PlaneGridOptions {
    pub fn new(tol: f64, max_monomial: usize) -> Self {
        Self {
            tol,
            max_monomial,
            panel_order: DEFAULT_PLANE_PANEL_ORDER,
            angular_order: default_angular_order(max_monomial.div_ceil(2).max(1)),
        }
    }
}

/// A plane grid whose truncation radius leaves a tail below `tol` for every
/// moment `∫|z|^{2m} w dA` and `∫|z|^{2m+2}(-w') dA` with `m <= max_monomial`.
pub fn build_plane_grid(spec: &WeightSpec, tol: f64, max_monomial: usize) -> Result<QuadGrid> {
    build_plane_grid_with(spec, &PlaneGridOptions::new(tol, max_monomial))
}

pub fn build_plane_grid_with(spec: &WeightSpec, opts: &PlaneGridOptions) -> Result<QuadGrid> {
    if !spec.is_plane() {
        return Err(Error::InvalidArgument("plane grid requested for a disc weight".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    check_orders(opts.panel_order, opts.angular_order)?;

    let tail = |radius: f64| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for m in 0..=opts.max_monomial {
            for (shift, derivative) in [(1.0, false), (3.0, true)] {
                let k = 2.0 * m as f64 + shift;
                let integrand = |r: f64| {
                    let x = r * r;
                    let ln = if derivative { spec.ln_neg_w_prime(x) } else { spec.ln_w(x) };
                    (k * r.ln() + ln).exp()
                };
                let t = integrate_tail(
                    integrand,
                    radius,
                    &TailOptions { tol: opts.tol * 1e-3, max_panels: 48, ..Default::default() },
                );
                if !t.converged {
                    return Err(Error::NonConvergentTail(format!(
                        "moment {m} of {spec} does not converge beyond r = {radius}"
                    )));
                }
                worst = worst.max(2.0 * PI * t.value.abs());
            }
        }
        Ok(worst)
    };

    let mut hi = 1.0;
    let mut hi_tail = tail(hi)?;
    while hi_tail >= opts.tol {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NonConvergentTail(format!("tail of {spec} above {} at r = {hi}", opts.tol)));
        }
        hi_tail = tail(hi)?;
    }
    let mut lo = if hi > 1.0 { hi / 2.0 } else { 0.0 };
    for _ in 0..24 {
        if hi - lo < 1e-3 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let t = tail(mid)?;
        if t < opts.tol {
            hi = mid;
            hi_tail = t;
        } else {
            lo = mid;
        }
    }
    let r_eff = hi;

    let moments = |nodes: &[f64], weights: &[f64]| -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * opts.max_monomial + 2);
        for m in 0..=opts.max_monomial {
            let k = 2 * m as i32;
            out.push(nodes.iter().zip(weights).map(|(&r, &w)| w * r.powi(k) * spec.w(r * r)).sum());
            out.push(nodes.iter().zip(weights).map(|(&r, &w)| -w * r.powi(k + 2) * spec.dw(r * r)).sum());
        }
        out
    };

    let mut cells = (r_eff / 2.0).ceil().max(2.0) as usize;
    let (mut nodes, mut weights) = composite_radial(r_eff, cells, opts.panel_order);
    let mut prev = moments(&nodes, &weights);
    loop {
        cells *= 2;
        let (n2, w2) = composite_radial(r_eff, cells, opts.panel_order);
        let next = moments(&n2, &w2);
        let stable = prev.iter().zip(&next).all(|(a, b)| (a - b).abs() <= MOMENT_STABILITY * b.abs().max(1e-300));
        let done = stable || cells >= MAX_PLANE_CELLS;
        if stable {
            // The coarser rule already agreed with its refinement; keep it.
            break;
        }
        nodes = n2;
        weights = w2;
        prev = next;
        if done {
            break;
        }
    }

    Ok(QuadGrid {
        radial_nodes: nodes,
        radial_weights: weights,
        angular_order: opts.angular_order,
        r_eff,
        tail_bound: hi_tail,
        max_monomial: opts.max_monomial,
        plane: true,
    })
}

fn composite_radial(radius: f64, cells: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::cached(order);
    let h = radius / cells as f64;
    let mut nodes = Vec::with_capacity(cells * order);
    let mut weights = Vec::with_capacity(cells * order);
    for c in 0..cells {
        for (r, w) in rule.on_interval(c as f64 * h, (c + 1) as f64 * h) {
            nodes.push(r);
            weights.push(w * r);
        }
    }
    (nodes, weights)
}

/// Smallest radius `R` with `∫_R^∞ g ≤ rel_tol·∫_0^∞ g` for a positive `g`
/// given through `ln g`.
pub fn effective_radius(ln_g: impl Fn(f64) -> f64, rel_tol: f64) -> Result<f64> {
    let g = |r: f64| if r > 0.0 { ln_g(r).exp() } else { 0.0 };
    let opts = TailOptions { tol: 1e-3 * rel_tol, max_panels: 48, ..Default::default() };
    let total = integrate_tail(g, 0.0, &opts);
    if !total.converged {
        return Err(Error::NonConvergentTail("integral over the plane does not converge".into()));
    }
    if total.value == 0.0 {
        return Ok(1.0);
    }
    let target = rel_tol * total.value;
    let tail = |r: f64| integrate_tail(g, r, &opts).value;
    let mut hi = 1.0;
    while tail(hi) > target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NonConvergentTail("no truncation radius below 1e6".into()));
        }
    }
    let mut lo = if hi > 1.0 { hi / 2.0 } else { 0.0 };
    while hi - lo > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if tail(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// `Σ_{i,j} wr_i (2π/M) integrand(r_i e^{iθ_j})`, summed pairwise in a fixed order.
pub fn integrate_area(grid: &QuadGrid, mut integrand: impl FnMut(Complex64) -> Complex64) -> Complex64 {
    let values: Vec<Complex64> = grid.nodes().map(|(z, w)| integrand(z) * w).collect();
    pairwise_sum(&values)
}

/// Fallible form of [`integrate_area`]; the first error is returned.
pub fn try_integrate_area(
    grid: &QuadGrid,
    mut integrand: impl FnMut(Complex64) -> Result<Complex64>,
) -> Result<Complex64> {
    let mut values = Vec::with_capacity(grid.len());
    for (z, w) in grid.nodes() {
        values.push(integrand(z)? * w);
    }
    Ok(pairwise_sum(&values))
}

pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}

/// `∫ |z|^{2m} w(|z|²) dA`.
pub fn monomial_moment(spec: &WeightSpec, grid: &QuadGrid, m: usize) -> Result<f64> {
    grid.check_compatible(spec)?;
    if m > grid.max_monomial {
        return Err(Error::OutOfRange { m, max: grid.max_monomial });
    }
    let k = 2 * m as i32;
    let terms: Vec<f64> = grid
        .radial_nodes
        .iter()
        .zip(&grid.radial_weights)
        .map(|(&r, &w)| w * r.powi(k) * spec.w(r * r))
        .collect();
    Ok(2.0 * PI * pairwise_sum_real(&terms))
}

/// The grid's nodes with the weight folded into the area weights.
#[derive(Clone, Debug)]
pub struct DiscreteMeasure {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Weights `wr_i·(2π/M)·w(r_i²)`.
    pub fn new(spec: &WeightSpec, grid: &QuadGrid) -> Result<Self> {
        grid.check_compatible(spec)?;
        Ok(Self::with_density(grid, |r| spec.w(r * r)))
    }

    /// Weights `wr_i·(2π/M)·density(r_i)`.
    pub fn with_density(grid: &QuadGrid, density: impl Fn(f64) -> f64) -> Self {
        let mut points = Vec::with_capacity(grid.len());
        let mut weights = Vec::with_capacity(grid.len());
        let dens: Vec<f64> = grid.radial_nodes.iter().map(|&r| density(r)).collect();
        for (k, (z, w)) in grid.nodes().enumerate() {
            points.push(z);
            weights.push(w * dens[k / grid.angular_order]);
        }
        Self { points, weights }
    }

    /// Nodes of a [`PolarIntegrator`] on `|z| < r_eff` graded toward `zeros`,
    /// for integrands like `|g|^p` whose smoothness is lost there.
    pub fn zero_aware(spec: &WeightSpec, grid: &QuadGrid, zeros: &[Complex64], harmonics: usize) -> Result<Self> {
        grid.check_compatible(spec)?;
        let integrator = PolarIntegrator::new(grid.r_eff, zeros, harmonics, &PolarOptions::default());
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for &(r, wr) in integrator.radial_nodes() {
            let wr = wr * spec.w(r * r);
            for (theta, wt) in integrator.circle_rule(r) {
                points.push(Complex64::from_polar(r, theta));
                weights.push(wr * wt);
            }
        }
        Ok(Self { points, weights })
    }

    /// `∫ |f|^p` against the measure, from precomputed values of `f`.
    pub fn lp_pow(&self, values: &[Complex64], p: f64) -> f64 {
        let terms: Vec<f64> = values.iter().zip(&self.weights).map(|(v, w)| w * abs_pow(*v, p)).collect();
        pairwise_sum_real(&terms)
    }
}

/// `|v|^p` with `0^p = 0`.
#[inline]
pub fn abs_pow(v: Complex64, p: f64) -> f64 {
    let s = v.norm_sqr();
    if s == 0.0 {
        0.0
    } else if p == 2.0 {
        s
    } else {
        (0.5 * p * s.ln()).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma_int(m: usize) -> f64 {
        (1..=m).map(|k| k as f64).product()
    }

    #[test]
    fn disc_area_and_second_moment() {
        let g = build_disc_grid(1.0, 12, 8).unwrap();
        let area = integrate_area(&g, |_| Complex64::new(1.0, 0.0));
        assert!((area.re - PI).abs() < 1e-12);
        let m2 = integrate_area(&g, |z| Complex64::new(z.norm_sqr(), 0.0));
        assert!((m2.re - PI / 2.0).abs() < 1e-12);
        let z = integrate_area(&g, |z| z);
        assert!(z.norm() < 1e-14);
    }

    #[test]
    fn affine_moments() {
        let spec = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        let g = build_disc_grid(1.0, 24, 8).unwrap();
        for m in 0..=20 {
            let mf = m as f64;
            let exact = 2.0 * PI * (2.0 / (2.0 * mf + 2.0) - 1.0 / (2.0 * mf + 4.0));
            let got = monomial_moment(&spec, &g, m).unwrap();
            assert!(((got - exact) / exact).abs() < 1e-12, "m={m}");
        }
        assert!(matches!(monomial_moment(&spec, &g, 23), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn invalid_orders() {
        assert!(matches!(build_disc_grid(1.0, 3, 8), Err(Error::InvalidOrder(_))));
        assert!(matches!(build_disc_grid(1.0, 8, 2), Err(Error::InvalidOrder(_))));
        assert!(build_disc_grid(f64::INFINITY, 8, 8).is_err());
    }

    #[test]
    fn angular_aliasing() {
        let g = build_disc_grid(1.0, 8, 12).unwrap();
        for a in 0..6i32 {
            for b in 0..6i32 {
                if a != b {
                    let v = integrate_area(&g, |z| z.powi(a) * z.conj().powi(b));
                    assert!(v.norm() < 1e-14, "a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn fock_plane_grid() {
        let spec = WeightSpec::fock(1.0).unwrap();
        let g = build_plane_grid(&spec, 1e-12, 10).unwrap();
        assert!(g.tail_bound < 1e-12);
        assert!(g.r_eff > 5.0 && g.r_eff < 12.0, "r_eff = {}", g.r_eff);
        for m in 0..=10 {
            let got = monomial_moment(&spec, &g, m).unwrap();
            let exact = PI * gamma_int(m);
            assert!(((got - exact) / exact).abs() < 1e-11, "m={m}");
        }
        let v = integrate_area(&g, |z| Complex64::new(z.norm_sqr() * (-z.norm_sqr()).exp(), 0.0));
        assert!((v.re - PI).abs() < 1e-10);

        let g2 = build_plane_grid(&WeightSpec::fock(2.0).unwrap(), 1e-12, 10).unwrap();
        assert!(g2.r_eff < g.r_eff);
    }

    #[test]
    fn slowly_decaying_weight_rejected() {
        let spec = WeightSpec::custom(
            "inverse-square",
            f64::INFINITY,
            |x| 1.0 / (1.0 + x * x),
            |x| -2.0 * x / (1.0 + x * x).powi(2),
            None,
        )
        .unwrap();
        assert!(matches!(build_plane_grid(&spec, 1e-12, 4), Err(Error::NonConvergentTail(_))));
    }
}
