//! Checks of the area identity behind the regularity bounds and of the bounds
//! themselves on discs and on the plane.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{solve, SolveOptions};
use crate::poly::Poly;
use crate::quadrature::{abs_pow, PolarOptions, QuadGrid};
use crate::space::{dp_pow, integral_mean, integral_mean_pow, polar_for, Exponents};
use crate::weights::WeightSpec;

pub const DEFAULT_BOUND_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `pass` iff `lhs <= rhs·(1 + tol)`.
    Inequality,
    /// `pass` iff `|lhs - rhs| < tol·(1 + |lhs|)`.
    Identity,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundContext {
    pub check: String,
    pub p: f64,
    pub weight: String,
    /// The kernel for bounds, the tested function for identities.
    pub function: Poly,
    pub degree: usize,
    pub dual_norm: Option<f64>,
    pub residual: Option<f64>,
    pub converged: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs` for inequalities, `|lhs - rhs|` for identities.
    pub slack: f64,
    pub tol: f64,
    pub pass: bool,
    pub context: BoundContext,
}

impl BoundReport {
    fn inequality(lhs: f64, rhs: f64, tol: f64, context: BoundContext) -> Self {
        let holds = lhs <= rhs * (1.0 + tol);
        let pass = holds && context.converged.unwrap_or(true);
        Self { kind: BoundKind::Inequality, lhs, rhs, slack: rhs - lhs, tol, pass, context }
    }

    fn identity(lhs: f64, rhs: Complex64, tol: f64, context: BoundContext) -> Self {
        let gap = (Complex64::new(lhs, 0.0) - rhs).norm();
        let pass = gap < tol * (1.0 + lhs.abs());
        Self { kind: BoundKind::Identity, lhs, rhs: rhs.re, slack: gap, tol, pass, context }
    }

    /// `|lhs - rhs| / |rhs|`.
    pub fn relative_gap(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs()
    }
}

#[derive(Clone, Debug)]
pub struct BoundOptions {
    pub tol: f64,
    pub solve: SolveOptions,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_BOUND_TOL, solve: SolveOptions::default() }
    }
}

/// Both sides of
/// `(R²/2) w(R²) M_p^p(R,f) - ∫|z|²|f|^p w' dA = ∫((p/2) z f' + f)|f|^{p-2} f̄ w dA`
/// on the disc `|z| < R`.
pub fn verify_base_identity(
    f: &Poly,
    e: Exponents,
    spec: &WeightSpec,
    quad: &PolarOptions,
    tol: f64,
) -> Result<BoundReport> {
    if spec.is_plane() {
        return Err(Error::InvalidArgument("the area identity is checked on discs".into()));
    }
    let p = e.p();
    let radius = spec.radius();
    let fp = f.derivative();
    let integrator = polar_for(f, p.max(2.0), radius, quad);
    let [dp, re, im] = integrator.integrate(|z| {
        let x = z.norm_sqr();
        let v = f.eval(z);
        let s = v.norm_sqr();
        if s == 0.0 {
            return [0.0; 3];
        }
        let abs_p2 = abs_pow(v, p - 2.0);
        let t = (z * fp.eval(z) * (0.5 * p) + v) * v.conj() * abs_p2 * spec.w(x);
        [x * s * abs_p2 * -spec.dw(x), t.re, t.im]
    });
    let boundary = 0.5 * radius * radius * spec.boundary_value() * integral_mean_pow(f, p, radius);
    let context = BoundContext {
        check: "base-identity".into(),
        p,
        weight: spec.to_string(),
        function: f.clone(),
        degree: f.degree(),
        dual_norm: None,
        residual: None,
        converged: None,
    };
    Ok(BoundReport::identity(boundary + dp, Complex64::new(re, im), tol, context))
}

/// The disc bound for the extremal polynomial `f` of degree `n`:
/// `(R²/2) w(R²) M_p^p(R,f) + D_p^p(R,f) ≤ [(2^{1/q} p̂/‖k‖*) (((R²/2) w(R²))^{1/q} M_q(R,k) + D_q(R,k))]^q`.
pub fn verify_disc_bound(
    k: &Poly,
    e: Exponents,
    spec: &WeightSpec,
    grid: &QuadGrid,
    n: usize,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    if spec.is_plane() {
        return Err(Error::InvalidArgument("disc bound needs a disc weight".into()));
    }
    let sol = solve(k, n, e, spec, grid, &opts.solve)?;
    let (p, q) = (e.p(), e.q());
    let radius = spec.radius();
    let half_w = 0.5 * radius * radius * spec.boundary_value();
    let lhs = half_w * integral_mean_pow(&sol.f, p, radius) + dp_pow(&sol.f, p, spec, radius)?;
    let inner = half_w.powf(1.0 / q) * integral_mean(k, q, radius) + dp_pow(k, q, spec, radius)?.powf(1.0 / q);
    let rhs = (2f64.powf(1.0 / q) * e.p_hat() / sol.dual_norm * inner).powf(q);
    let context = BoundContext {
        check: "disc".into(),
        p,
        weight: spec.to_string(),
        function: k.clone(),
        degree: n,
        dual_norm: Some(sol.dual_norm),
        residual: Some(sol.residual),
        converged: Some(sol.converged),
    };
    Ok(BoundReport::inequality(lhs, rhs, opts.tol, context))
}

/// The plane bound `D_p(∞,f) ≤ [p̂ D_q(∞,k)/‖k‖*]^{1/(p-1)}`.
pub fn verify_plane_bound(
    k: &Poly,
    e: Exponents,
    spec: &WeightSpec,
    grid: &QuadGrid,
    n: usize,
    opts: &BoundOptions,
) -> Result<BoundReport> {
    if !spec.is_plane() {
        return Err(Error::InvalidArgument("plane bound needs a plane weight".into()));
    }
    let sol = solve(k, n, e, spec, grid, &opts.solve)?;
    let (p, q) = (e.p(), e.q());
    let lhs = dp_pow(&sol.f, p, spec, f64::INFINITY)?.powf(1.0 / p);
    let dq = dp_pow(k, q, spec, f64::INFINITY)?.powf(1.0 / q);
    let rhs = (e.p_hat() * dq / sol.dual_norm).powf(1.0 / (p - 1.0));
    let context = BoundContext {
        check: "plane".into(),
        p,
        weight: spec.to_string(),
        function: k.clone(),
        degree: n,
        dual_norm: Some(sol.dual_norm),
        residual: Some(sol.residual),
        converged: Some(sol.converged),
    };
    Ok(BoundReport::inequality(lhs, rhs, opts.tol, context))
}

/// The disc or plane bound, whichever matches `spec`, for every kernel and
/// exponent pair, computed in parallel.
pub fn verify_bounds(
    kernels: &[Poly],
    exponents: &[Exponents],
    spec: &WeightSpec,
    grid: &QuadGrid,
    n: usize,
    opts: &BoundOptions,
) -> Result<Vec<BoundReport>> {
    let jobs: Vec<(&Poly, Exponents)> =
        kernels.iter().flat_map(|k| exponents.iter().map(move |e| (k, *e))).collect();
    jobs.par_iter()
        .map(|(k, e)| {
            if spec.is_plane() {
                verify_plane_bound(k, *e, spec, grid, n, opts)
            } else {
                verify_disc_bound(k, *e, spec, grid, n, opts)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_disc_grid;
    use std::f64::consts::PI;

    #[test]
    fn identity_for_z_on_affine_disc() {
        let spec = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        let r = verify_base_identity(&Poly::monomial(1), Exponents::new(2.0).unwrap(), &spec, &PolarOptions::default(), 1e-10)
            .unwrap();
        assert!(r.pass);
        assert!((r.lhs - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((r.rhs - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identity_for_constants() {
        let spec = WeightSpec::power(2.0, 1.0).unwrap();
        for p in [1.5, 3.0] {
            let r = verify_base_identity(&Poly::from_real(&[2.0]), Exponents::new(p).unwrap(), &spec, &PolarOptions::default(), 1e-10)
                .unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn disc_bound_constant_kernel_closed_form() {
        let spec = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        let grid = build_disc_grid(1.0, 48, 40).unwrap();
        let r = verify_disc_bound(&Poly::from_real(&[1.0]), Exponents::new(2.0).unwrap(), &spec, &grid, 8, &BoundOptions::default())
            .unwrap();
        // f = (3π/2)^{-1/2}: lhs = (1/2)(2π)/(3π/2) + (π/2)/(3π/2) = 1.
        assert!((r.lhs - 1.0).abs() < 1e-10, "{}", r.lhs);
        let rhs = 2.0 / (1.5 * PI) * ((PI).sqrt() + (PI / 2.0).sqrt()).powi(2);
        assert!((r.rhs - rhs).abs() < 1e-10 * rhs);
        assert!(r.pass);
    }
}
