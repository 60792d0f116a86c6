//! Norms, pairings and integral means of polynomials in weighted spaces.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::polar::circle_rule;
use crate::quadrature::{
    abs_pow, effective_radius, monomial_moment, pairwise_sum, DiscreteMeasure, PolarIntegrator, PolarOptions,
    QuadGrid,
};
use crate::weights::WeightSpec;

/// Relative size of the neglected tail when a plane integral is truncated.
pub const PLANE_TRUNCATION: f64 = 1e-15;

/// An exponent `p ∈ (1, ∞)` with its conjugate `q` and `p̂ = max(p - 1, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Exponents {
    p: f64,
}

impl Exponents {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 {
            Ok(Self { p })
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn p_hat(&self) -> f64 {
        (self.p - 1.0).max(1.0)
    }

    pub fn conjugate(&self) -> Self {
        Self { p: self.q() }
    }
}

impl TryFrom<f64> for Exponents {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Exponents> for f64 {
    fn from(e: Exponents) -> f64 {
        e.p
    }
}

fn degree_of(f: &Poly) -> usize {
    f.effective_degree().unwrap_or(0)
}

/// `∫ |f|^p w(|z|²) dA`: on the grid for `p = 2`, otherwise on the grid's
/// radius with cells graded toward the zeros of `f`.
pub fn norm_pow(f: &Poly, p: f64, spec: &WeightSpec, grid: &QuadGrid) -> Result<f64> {
    let d = degree_of(f);
    if grid.plane && (d as f64) * p > 2.0 * grid.max_monomial as f64 + 1e-12 {
        return Err(Error::DegreeOverflow { degree: d, limit: grid.max_monomial });
    }
    if d >= grid.angular_order {
        return Err(Error::DegreeOverflow { degree: d, limit: grid.angular_order - 1 });
    }
    let measure = if p == 2.0 {
        DiscreteMeasure::new(spec, grid)?
    } else {
        DiscreteMeasure::zero_aware(spec, grid, &f.roots(), harmonics(f, p))?
    };
    let values: Vec<Complex64> = measure.points.iter().map(|&z| f.eval(z)).collect();
    Ok(measure.lp_pow(&values, p))
}

/// `‖f‖ = (∫ |f|^p w(|z|²) dA)^{1/p}`.
pub fn norm(f: &Poly, e: Exponents, spec: &WeightSpec, grid: &QuadGrid) -> Result<f64> {
    Ok(norm_pow(f, e.p(), spec, grid)?.powf(1.0 / e.p()))
}

fn check_pairing_degree(f: &Poly, k: &Poly, grid: &QuadGrid) -> Result<()> {
    let d = degree_of(f) + degree_of(k);
    if d > grid.max_monomial {
        return Err(Error::DegreeOverflow { degree: d, limit: grid.max_monomial });
    }
    if d >= grid.angular_order {
        return Err(Error::DegreeOverflow { degree: d, limit: grid.angular_order - 1 });
    }
    Ok(())
}

/// `Φ_k(f) = ∫ f k̄ w(|z|²) dA` by quadrature.
pub fn pairing(f: &Poly, k: &Poly, spec: &WeightSpec, grid: &QuadGrid) -> Result<Complex64> {
    check_pairing_degree(f, k, grid)?;
    let measure = DiscreteMeasure::new(spec, grid)?;
    let terms: Vec<Complex64> = measure
        .points
        .iter()
        .zip(&measure.weights)
        .map(|(&z, &w)| f.eval(z) * k.eval(z).conj() * w)
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `Φ_k(f) = Σ a_m b̄_m ∫|z|^{2m} w dA`, using that monomials are orthogonal.
pub fn pairing_by_moments(f: &Poly, k: &Poly, spec: &WeightSpec, grid: &QuadGrid) -> Result<Complex64> {
    check_pairing_degree(f, k, grid)?;
    let n = degree_of(f).min(degree_of(k));
    let mut s = Complex64::new(0.0, 0.0);
    for m in 0..=n {
        s += f.coeff(m) * k.coeff(m).conj() * monomial_moment(spec, grid, m)?;
    }
    Ok(s)
}

/// `∫₀^{2π} |f(re^{iθ})|^p dθ`.
pub fn integral_mean_pow(f: &Poly, p: f64, r: f64) -> f64 {
    if p == 2.0 {
        let mut s = 0.0;
        let mut rm = 1.0;
        for c in f.coeffs() {
            s += c.norm_sqr() * rm;
            rm *= r * r;
        }
        return 2.0 * PI * s;
    }
    let zeros: Vec<(f64, f64)> =
        f.roots().into_iter().filter(|z| z.norm() > 0.0).map(|z| (z.norm().ln(), z.arg())).collect();
    let rule = circle_rule(r, &zeros, harmonics(f, p), &PolarOptions::default());
    rule.iter().map(|&(t, w)| w * abs_pow(f.eval(Complex64::from_polar(r, t)), p)).sum()
}

/// `M_p(r, f) = (∫₀^{2π} |f(re^{iθ})|^p dθ)^{1/p}`, without a `1/2π` factor.
pub fn integral_mean(f: &Poly, p: f64, r: f64) -> f64 {
    integral_mean_pow(f, p, r).powf(1.0 / p)
}

pub(crate) fn harmonics(f: &Poly, p: f64) -> usize {
    (degree_of(f) as f64 * p.max(1.0) / 2.0).ceil() as usize
}

/// The radius to which `-∫|z|²|f|^p w' dA` is integrated when `r = ∞`.
fn plane_cutoff(f: &Poly, p: f64, spec: &WeightSpec) -> Result<f64> {
    let abs: Vec<f64> = f.coeffs().iter().map(|c| c.norm()).collect();
    effective_radius(
        |r| {
            let majorant: f64 = abs.iter().rev().fold(0.0, |acc, a| acc * r + a);
            3.0 * r.ln() + spec.ln_neg_w_prime(r * r) + p * majorant.ln()
        },
        PLANE_TRUNCATION,
    )
}

/// Polar integration data for `|f|^p`-type integrands of `f` on `|z| < radius`.
pub fn polar_for(f: &Poly, p: f64, radius: f64, opts: &PolarOptions) -> PolarIntegrator {
    PolarIntegrator::new(radius, &f.roots(), harmonics(f, p), opts)
}

/// `D_p^p(r, f) = -∫_{|z|<r} |z|² |f|^p w'(|z|²) dA`; `r = ∞` on the plane.
pub fn dp_pow(f: &Poly, p: f64, spec: &WeightSpec, r: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("mean exponent must be positive, got {p}")));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let radius = if r.is_infinite() {
        if !spec.is_plane() {
            return Err(Error::InvalidArgument("D_p at r = inf needs a plane weight".into()));
        }
        plane_cutoff(f, p, spec)?
    } else {
        if !(r >= 0.0) || r > spec.radius() {
            return Err(Error::Domain { x: r * r, upper: spec.upper() });
        }
        r
    };
    let integrator = polar_for(f, p, radius, &PolarOptions::default());
    let [v] = integrator.integrate(|z| {
        let x = z.norm_sqr();
        [x * abs_pow(f.eval(z), p) * -spec.dw(x)]
    });
    Ok(v)
}

/// `D_p(r, f) = (D_p^p(r, f))^{1/p}`.
pub fn dp(f: &Poly, p: f64, spec: &WeightSpec, r: f64) -> Result<f64> {
    Ok(dp_pow(f, p, spec, r)?.powf(1.0 / p))
}

/// `N_p(r, f) = (r²/2)^{1/p} w(r²)^{1/p} M_p(r, f)`; at `r = R` the left limit of `w` is used.
pub fn np(f: &Poly, p: f64, spec: &WeightSpec, r: f64) -> Result<f64> {
    if !(r >= 0.0) || r > spec.radius() || r.is_infinite() {
        return Err(Error::Domain { x: r * r, upper: spec.upper() });
    }
    let w = if r == spec.radius() { spec.boundary_value() } else { spec.w(r * r) };
    Ok((0.5 * r * r * w).powf(1.0 / p) * integral_mean(f, p, r))
}

/// `K(z) = (1/z)∫₀^z k`, i.e. `b_j = a_j/(j+1)`.
pub fn k_transform(k: &Poly) -> Poly {
    let coeffs = k.coeffs().iter().enumerate().map(|(j, a)| a / (j as f64 + 1.0)).collect();
    Poly::new(coeffs).expect("finite coefficients stay finite")
}

/// `f_ρ(z) = f(ρz)`.
pub fn dilate(f: &Poly, rho: f64) -> Poly {
    let mut s = 1.0;
    let coeffs = f
        .coeffs()
        .iter()
        .map(|a| {
            let c = a * s;
            s *= rho;
            c
        })
        .collect();
    Poly::new(coeffs).expect("finite coefficients stay finite")
}

#[derive(Clone, Debug, Serialize)]
pub struct MeansRow {
    pub r: f64,
    pub mp: f64,
    pub dp: f64,
    pub np: f64,
}

/// `M_p`, `D_p` and `N_p` of one function on increasing radii.
#[derive(Clone, Debug, Serialize)]
pub struct MeansProfile {
    pub p: f64,
    pub rows: Vec<MeansRow>,
}

pub fn means_profile(f: &Poly, p: f64, spec: &WeightSpec, radii: &[f64]) -> Result<MeansProfile> {
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        rows.push(MeansRow { r, mp: integral_mean(f, p, r), dp: dp(f, p, spec, r)?, np: np(f, p, spec, r)? });
    }
    Ok(MeansProfile { p, rows })
}

impl MeansProfile {
    /// CSV with header `r,Mp,Dp,Np`, preceded by a comment stating the normalization of `Mp`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# p = {}; Mp(r) = (int_0^2pi |f(r e^it)|^p dt)^(1/p), no 1/(2 pi) factor", self.p);
        out.push_str("r,Mp,Dp,Np\n");
        for row in &self.rows {
            let _ = writeln!(out, "{:e},{:e},{:e},{:e}", row.r, row.mp, row.dp, row.np);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{build_disc_grid, build_plane_grid};

    fn poly(re: &[f64]) -> Poly {
        Poly::from_real(re)
    }

    #[test]
    fn exponent_relations() {
        let e = Exponents::new(3.0).unwrap();
        assert!((1.0 / e.p() + 1.0 / e.q() - 1.0).abs() < 1e-15);
        assert_eq!(e.p_hat(), 2.0);
        assert_eq!(Exponents::new(1.5).unwrap().p_hat(), 1.0);
        assert!(matches!(Exponents::new(1.0), Err(Error::InvalidExponent(_))));
        assert!(Exponents::new(f64::INFINITY).is_err());
    }

    #[test]
    fn disc_norm_of_constant() {
        let spec = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        let g = build_disc_grid(1.0, 16, 8).unwrap();
        let n = norm(&poly(&[1.0]), Exponents::new(2.0).unwrap(), &spec, &g).unwrap();
        assert!((n - (1.5 * PI).sqrt()).abs() < 1e-13);
        assert_eq!(norm(&Poly::zero(), Exponents::new(3.0).unwrap(), &spec, &g).unwrap(), 0.0);
    }

    #[test]
    fn fock_pairings() {
        let spec = WeightSpec::fock(1.0).unwrap();
        let g = build_plane_grid(&spec, 1e-13, 8).unwrap();
        let z = poly(&[0.0, 1.0]);
        let one = poly(&[1.0]);
        assert!((pairing(&z, &z, &spec, &g).unwrap() - PI).norm() < 1e-11);
        assert!(pairing(&z, &one, &spec, &g).unwrap().norm() < 1e-12);
        assert!((pairing(&poly(&[1.0, 1.0]), &one, &spec, &g).unwrap() - PI).norm() < 1e-11);
    }

    #[test]
    fn means_closed_forms() {
        let r = 0.7;
        for p in [1.0, 1.5, 3.0] {
            let m = integral_mean(&Poly::monomial(3), p, r);
            assert!((m - (2.0 * PI).powf(1.0 / p) * r.powi(3)).abs() < 1e-13);
        }
        assert!((integral_mean(&poly(&[1.0, 1.0]), 2.0, 1.0) - (4.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn fock_dp() {
        let spec = WeightSpec::fock(1.0).unwrap();
        let v = dp(&poly(&[1.0]), 2.0, &spec, f64::INFINITY).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-12);
        let v = dp_pow(&Poly::monomial(3), 2.0, &spec, f64::INFINITY).unwrap();
        assert!((v - 24.0 * PI).abs() < 1e-10 * 24.0 * PI);
        assert_eq!(dp(&Poly::zero(), 2.0, &spec, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn np_values() {
        let spec = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        let v = np(&poly(&[1.0]), 2.0, &spec, 1.0).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-14);
        let power = WeightSpec::power(2.0, 1.0).unwrap();
        assert_eq!(np(&poly(&[1.0]), 2.0, &power, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn transforms() {
        assert_eq!(k_transform(&poly(&[1.0, 2.0, 3.0])), poly(&[1.0, 1.0, 1.0]));
        assert_eq!(k_transform(&poly(&[0.0, 1.0])), poly(&[0.0, 0.5]));
        assert_eq!(dilate(&poly(&[1.0, 1.0, 1.0]), 0.5), poly(&[1.0, 0.5, 0.25]));
        assert_eq!(dilate(&poly(&[1.0, 2.0]), 1.0), poly(&[1.0, 2.0]));
    }

    #[test]
    fn csv_header() {
        let spec = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        let prof = means_profile(&poly(&[1.0, 1.0]), 3.0, &spec, &[0.25, 0.5, 1.0]).unwrap();
        let csv = prof.to_csv();
        assert!(csv.lines().nth(1) == Some("r,Mp,Dp,Np"));
        assert_eq!(csv.lines().count(), 5);
    }
}
