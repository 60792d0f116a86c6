//! Point evaluation bounds, dilations, and the integrability conditions under
//! which polynomials are dense on the plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::adaptive::{integrate_tail, TailOptions};
use crate::quadrature::{build_plane_grid, DiscreteMeasure, QuadGrid};
use crate::space::{dilate, norm, Exponents};
use crate::weights::{WeightFamily, WeightSpec};

pub const DEFAULT_DENSITY_TOL: f64 = 1e-10;
/// `ρ` and `β` used by [`fock_density_certificate`].
pub const CERTIFICATE_RHO: f64 = 0.5;
pub const CERTIFICATE_BETA: f64 = 0.75;

/// A bound `C(z)` with `|f(z)| ≤ C(z)‖f‖` for every `f` in the space: on the
/// plane `π^{1/p} w((|z|+1)²)^{-1/p}`; on a disc `(m_z π r'²)^{-1/p}` with
/// `r' = (R - |z|)/2` and `m_z = w((|z| + r')²)`.
pub fn point_eval_bound(spec: &WeightSpec, z: Complex64, e: Exponents) -> Result<f64> {
    let a = z.norm();
    let p = e.p();
    if spec.is_plane() {
        let s = a + 1.0;
        return Ok((PI.ln() / p - spec.ln_w(s * s) / p).exp());
    }
    let radius = spec.radius();
    if a >= radius {
        return Err(Error::Domain { x: a * a, upper: spec.upper() });
    }
    let rp = 0.5 * (radius - a);
    let m = spec.w((a + rp) * (a + rp));
    Ok((m * PI * rp * rp).powf(-1.0 / p))
}

#[derive(Clone, Debug, Serialize)]
pub struct DilationRow {
    pub rho: f64,
    /// `‖f - f_ρ‖`.
    pub distance: f64,
    /// `‖f_ρ‖`.
    pub dilated_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DilationReport {
    pub p: f64,
    pub norm: f64,
    pub rows: Vec<DilationRow>,
    /// `‖f_ρ‖ ≤ ‖f‖` on every row (relative slack `1e-12`).
    pub contractive: bool,
    /// Distances decrease along the list.
    pub monotone: bool,
}

/// `‖f - f_ρ‖` for each `ρ`, where `f_ρ(z) = f(ρz)`.
pub fn dilation_convergence(
    f: &Poly,
    spec: &WeightSpec,
    e: Exponents,
    grid: &QuadGrid,
    rhos: &[f64],
) -> Result<DilationReport> {
    if rhos.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::InvalidArgument("dilation factors must lie in (0, 1]".into()));
    }
    let base = norm(f, e, spec, grid)?;
    let mut rows = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let fr = dilate(f, rho);
        let distance = if rho == 1.0 { 0.0 } else { norm(&(f - &fr), e, spec, grid)? };
        rows.push(DilationRow { rho, distance, dilated_norm: norm(&fr, e, spec, grid)? });
    }
    let contractive = rows.iter().all(|r| r.dilated_norm <= base * (1.0 + 1e-12));
    let monotone = rows.windows(2).all(|w| w[1].distance <= w[0].distance);
    Ok(DilationReport { p: e.p(), norm: base, rows, contractive, monotone })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralEstimate {
    pub name: String,
    pub value: f64,
    pub last_increment: f64,
    pub decay_ratio: f64,
    /// Radius reached by the doubling panels.
    pub radius: f64,
    pub finite: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub condition: String,
    pub weight: String,
    pub p: f64,
    pub rho: Option<f64>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub integrals: Vec<IntegralEstimate>,
    pub finite: bool,
    pub notes: Vec<String>,
}

/// The two integrals
/// `∫ ν(ρ|z|+1)^{-2/p} ν(|z|)^{2β/p} dA` and `∫ ν(|z|+1)^{-β} ν(|z|) dA`,
/// `ν(r) = w(r²)`, computed over doubling radii. On a disc polynomials are
/// always dense and the report is trivially finite.
pub fn check_plane_density(spec: &WeightSpec, e: Exponents, rho: f64, beta: f64, tol: f64) -> Result<DensityReport> {
    let alpha = match spec.family() {
        WeightFamily::Fock { alpha } | WeightFamily::FockPlus { alpha } => Some(*alpha),
        _ => None,
    };
    if !spec.is_plane() {
        return Ok(DensityReport {
            condition: "disc".into(),
            weight: spec.to_string(),
            p: e.p(),
            rho: None,
            beta: None,
            alpha,
            integrals: Vec::new(),
            finite: true,
            notes: vec!["polynomials are dense for every admissible disc weight".into()],
        });
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("rho must lie in (0, 1), got {rho}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 1), got {beta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let p = e.p();
    let ln_nu = |r: f64| spec.ln_w(r * r);
    let opts = TailOptions { tol, max_ratio: 0.5, max_panels: 48, first_width: 1.0, ..Default::default() };
    let estimate = |name: &str, ln_integrand: &dyn Fn(f64) -> f64| {
        let t = integrate_tail(|r| 2.0 * PI * r * ln_integrand(r).exp(), 0.0, &opts);
        IntegralEstimate {
            name: name.into(),
            value: t.value,
            last_increment: t.last_increment,
            decay_ratio: t.decay_ratio,
            radius: t.radius,
            finite: t.converged,
        }
    };
    let first = estimate("dilated point-evaluation integral", &|r| {
        -(2.0 / p) * ln_nu(rho * r + 1.0) + (2.0 * beta / p) * ln_nu(r)
    });
    let second = estimate("auxiliary measure integral", &|r| -beta * ln_nu(r + 1.0) + ln_nu(r));
    let mut notes = Vec::new();
    for i in [&first, &second] {
        if !i.finite {
            notes.push(format!("{} diverges or did not settle by r = {}", i.name, i.radius));
        }
    }
    let finite = first.finite && second.finite;
    Ok(DensityReport {
        condition: "plane".into(),
        weight: spec.to_string(),
        p,
        rho: Some(rho),
        beta: Some(beta),
        alpha,
        integrals: vec![first, second],
        finite,
        notes,
    })
}

/// [`check_plane_density`] for `(1 + |z|²) e^{-α|z|²}` with `ρ = 0.5`, `β = 0.75`.
pub fn fock_density_certificate(alpha: f64, e: Exponents) -> Result<DensityReport> {
    let spec = WeightSpec::fock_plus(alpha)?;
    check_plane_density(&spec, e, CERTIFICATE_RHO, CERTIFICATE_BETA, DEFAULT_DENSITY_TOL)
}

/// `‖zⁿ‖` in `A^p(|z|²e^{-α|z|²})` divided by `‖zⁿ‖` in `A^p(e^{-α|z|²})`, by quadrature.
pub fn closed_graph_ratio(alpha: f64, n: usize, e: Exponents, tol: f64) -> Result<f64> {
    let p = e.p();
    let spec = WeightSpec::fock(alpha)?;
    let max_monomial = ((n as f64 * p) / 2.0).ceil() as usize + 1;
    let grid = build_plane_grid(&spec, tol, max_monomial)?;
    let with = DiscreteMeasure::with_density(&grid, |r| r * r * (-alpha * r * r).exp());
    let without = DiscreteMeasure::with_density(&grid, |r| (-alpha * r * r).exp());
    let f = Poly::monomial(n);
    let values: Vec<Complex64> = with.points.iter().map(|&z| f.eval(z)).collect();
    Ok((with.lp_pow(&values, p) / without.lp_pow(&values, p)).powf(1.0 / p))
}
