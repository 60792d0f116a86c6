//! The extremal problem `max Re Φ_k(f)` over the unit ball of polynomials of
//! degree at most `n`.
//!
//! Solved in the equivalent form `min ∫|g|^p w dA` subject to `Re Φ_k(g) = 1`,
//! then `f = g/‖g‖` and `‖k‖*_n = 1/‖g‖`. Unknowns are the real and imaginary
//! parts of the coefficients in the basis `z^m/√μ_m` orthonormal for the
//! discrete measure. Each step is an equality-constrained Newton step with
//! backtracking; the stopping rule is the orthogonality residual.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadrature::{DiscreteMeasure, QuadGrid};
use crate::space::{norm, Exponents};
use crate::weights::WeightSpec;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Bound on the orthogonality residual for convergence.
    pub tol: f64,
    pub max_iter: usize,
    /// Starting point; the `p = 2` solution when absent.
    pub init: Option<Poly>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER, init: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalSolution {
    pub p: f64,
    pub degree: usize,
    /// Unit-norm extremal polynomial.
    pub f: Poly,
    /// `‖k‖*_n = Re Φ_k(f)`.
    pub dual_norm: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// The extremal problem discretized on a grid.
struct Problem {
    p: f64,
    n: usize,
    weights: Vec<f64>,
    /// Real and imaginary parts of `g` as linear maps of the unknowns `x`.
    re: DMatrix<f64>,
    im: DMatrix<f64>,
    /// `√μ_m` of the discrete measure.
    scale: Vec<f64>,
    /// `Φ_k(e_m)`.
    phi: Vec<Complex64>,
    /// `‖z^m‖_p` on the grid.
    mono_norm: Vec<f64>,
    /// Constraint row: `Re Φ_k(g) = constraint · x`.
    constraint: DVector<f64>,
}

struct Eval {
    value: f64,
    /// `|g_j|²`.
    sq: Vec<f64>,
    gr: DVector<f64>,
    gi: DVector<f64>,
}

impl Problem {
    /// Moments and `Φ_k` come from the grid. `|g|^p` is integrated on the grid,
    /// or with cells graded toward `zeros` when given.
    fn new(k: &Poly, n: usize, p: f64, spec: &WeightSpec, grid: &QuadGrid, zeros: Option<&[Complex64]>) -> Result<Self> {
        if grid.plane && (n as f64) * p.max(2.0) > 2.0 * grid.max_monomial as f64 + 1e-12 {
            return Err(Error::DegreeOverflow { degree: n, limit: grid.max_monomial });
        }
        if n >= grid.angular_order / 2 {
            return Err(Error::DegreeOverflow { degree: n, limit: grid.angular_order / 2 - 1 });
        }
        let grid_measure = DiscreteMeasure::new(spec, grid)?;
        let mut mu = vec![0.0; n + 1];
        for (z, w) in grid_measure.points.iter().zip(&grid_measure.weights) {
            let r2 = z.norm_sqr();
            let mut pow = 1.0;
            for m in mu.iter_mut() {
                *m += w * pow;
                pow *= r2;
            }
        }
        let measure = match zeros {
            Some(zeros) => DiscreteMeasure::zero_aware(spec, grid, zeros, (n as f64 * p.max(1.0) / 2.0).ceil() as usize)?,
            None => grid_measure,
        };
        let npts = measure.points.len();
        let dim = 2 * (n + 1);
        let mut mono_p = vec![0.0; n + 1];
        for (z, w) in measure.points.iter().zip(&measure.weights) {
            let r2 = z.norm_sqr();
            let mut pow: f64 = 1.0;
            for m in mono_p.iter_mut() {
                *m += w * pow.powf(0.5 * p);
                pow *= r2;
            }
        }
        let scale: Vec<f64> = mu.iter().map(|m| m.sqrt()).collect();
        let mut re = DMatrix::zeros(npts, dim);
        let mut im = DMatrix::zeros(npts, dim);
        for (j, z) in measure.points.iter().enumerate() {
            let mut zm = Complex64::new(1.0, 0.0);
            for m in 0..=n {
                let e = zm / scale[m];
                re[(j, 2 * m)] = e.re;
                re[(j, 2 * m + 1)] = -e.im;
                im[(j, 2 * m)] = e.im;
                im[(j, 2 * m + 1)] = e.re;
                zm *= z;
            }
        }
        if (0..=n).all(|m| k.coeff(m) == Complex64::new(0.0, 0.0)) {
            return Err(Error::ZeroKernel { degree: n });
        }
        let phi: Vec<Complex64> = (0..=n).map(|m| k.coeff(m).conj() * scale[m]).collect();
        let mut constraint = DVector::zeros(dim);
        for m in 0..=n {
            constraint[2 * m] = phi[m].re;
            constraint[2 * m + 1] = -phi[m].im;
        }
        if constraint.norm() == 0.0 {
            return Err(Error::ZeroKernel { degree: n });
        }
        let mono_norm = mono_p.iter().map(|v| v.powf(1.0 / p)).collect();
        Ok(Self { p, n, weights: measure.weights, re, im, scale, phi, mono_norm, constraint })
    }

    fn dim(&self) -> usize {
        2 * (self.n + 1)
    }

    fn eval(&self, x: &DVector<f64>) -> Eval {
        let gr = &self.re * x;
        let gi = &self.im * x;
        let sq: Vec<f64> = gr.iter().zip(gi.iter()).map(|(a, b)| a * a + b * b).collect();
        let value = sq.iter().zip(&self.weights).map(|(s, w)| w * pow_half(*s, self.p)).sum();
        Eval { value, sq, gr, gi }
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        self.eval(x).value
    }

    /// Gradient of `∫|g|^p`.
    fn gradient(&self, ev: &Eval) -> DVector<f64> {
        let c: DVector<f64> = DVector::from_iterator(
            ev.sq.len(),
            ev.sq.iter().zip(&self.weights).map(|(s, w)| w * self.p * pow_half(*s, self.p - 2.0)),
        );
        self.re.tr_mul(&c.component_mul(&ev.gr)) + self.im.tr_mul(&c.component_mul(&ev.gi))
    }

    fn hessian(&self, ev: &Eval) -> DMatrix<f64> {
        let p = self.p;
        let npts = ev.sq.len();
        let mut a = self.re.clone();
        let mut b = self.im.clone();
        let mut u = DMatrix::zeros(npts, self.dim());
        for j in 0..npts {
            let s = ev.sq[j];
            if s == 0.0 {
                a.row_mut(j).fill(0.0);
                b.row_mut(j).fill(0.0);
                continue;
            }
            let alpha = self.weights[j] * p * pow_half(s, p - 2.0);
            let beta = self.weights[j] * p * (p - 2.0) * pow_half(s, p - 4.0);
            let row = self.re.row(j) * ev.gr[j] + self.im.row(j) * ev.gi[j];
            u.row_mut(j).copy_from(&(row * beta.abs().sqrt()));
            let sa = alpha.sqrt();
            a.row_mut(j).scale_mut(sa);
            b.row_mut(j).scale_mut(sa);
        }
        let mut h = a.tr_mul(&a) + b.tr_mul(&b);
        if p != 2.0 {
            // All β share the sign of p - 2.
            let s = if p > 2.0 { 1.0 } else { -1.0 };
            h += u.tr_mul(&u) * s;
        }
        h
    }

    /// `G_m = ∫ e_m |g|^{p-2} ḡ w dA` from the gradient.
    fn moments_from_gradient(&self, grad: &DVector<f64>) -> Vec<Complex64> {
        (0..=self.n).map(|m| Complex64::new(grad[2 * m], -grad[2 * m + 1]) / self.p).collect()
    }

    /// Orthogonality residual of `f = g/‖g‖`, with `‖k‖*_n` taken as `Re Φ_k(f)`.
    fn residual(&self, x: &DVector<f64>, ev: &Eval, grad: &DVector<f64>) -> (f64, f64) {
        let norm_g = ev.value.powf(1.0 / self.p);
        if norm_g == 0.0 {
            return (f64::INFINITY, 0.0);
        }
        let dual = self.constraint.dot(x) / norm_g;
        (self.residual_against(ev, grad, dual), dual)
    }

    /// Residual of `g/‖g‖` against a given value of the dual norm.
    fn residual_against(&self, ev: &Eval, grad: &DVector<f64>, dual: f64) -> f64 {
        let norm_g = ev.value.powf(1.0 / self.p);
        if norm_g == 0.0 || !(dual > 0.0) {
            return f64::INFINITY;
        }
        let g_m = self.moments_from_gradient(grad);
        let lhs_scale = norm_g.powf(1.0 - self.p);
        let mut worst: f64 = 0.0;
        for m in 0..=self.n {
            let lhs = g_m[m] * self.scale[m] * lhs_scale;
            let rhs = self.phi[m] * self.scale[m] / dual;
            worst = worst.max((lhs - rhs).norm() / self.mono_norm[m]);
        }
        worst
    }

    fn to_unknowns(&self, f: &Poly) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim());
        for m in 0..=self.n {
            let c = f.coeff(m) * self.scale[m];
            x[2 * m] = c.re;
            x[2 * m + 1] = c.im;
        }
        x
    }

    fn to_poly(&self, x: &DVector<f64>, factor: f64) -> Poly {
        let coeffs = (0..=self.n).map(|m| Complex64::new(x[2 * m], x[2 * m + 1]) * (factor / self.scale[m])).collect();
        Poly::new(coeffs).expect("finite iterate")
    }

    /// `T_n k` in the unknowns, scaled onto the constraint.
    fn hilbert_start(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim());
        for m in 0..=self.n {
            let c = self.phi[m].conj();
            x[2 * m] = c.re;
            x[2 * m + 1] = c.im;
        }
        let s = self.constraint.dot(&x);
        x / s
    }

    /// Rescales `x` by a complex factor so that `Φ_k(g) = 1`.
    fn onto_constraint(&self, x: DVector<f64>) -> Option<DVector<f64>> {
        let phi: Complex64 = (0..=self.n).map(|m| Complex64::new(x[2 * m], x[2 * m + 1]) * self.phi[m]).sum();
        if phi.norm() == 0.0 || !phi.re.is_finite() {
            return None;
        }
        let inv = phi.inv();
        let mut y = x.clone();
        for m in 0..=self.n {
            let c = Complex64::new(x[2 * m], x[2 * m + 1]) * inv;
            y[2 * m] = c.re;
            y[2 * m + 1] = c.im;
        }
        Some(y)
    }

    fn finish(&self, x: &DVector<f64>, iterations: usize, tol: f64) -> ExtremalSolution {
        let ev = self.eval(x);
        let grad = self.gradient(&ev);
        let (residual, dual) = self.residual(x, &ev, &grad);
        let norm_g = ev.value.powf(1.0 / self.p);
        ExtremalSolution {
            p: self.p,
            degree: self.n,
            f: self.to_poly(x, 1.0 / norm_g),
            dual_norm: dual,
            residual,
            iterations,
            converged: residual < tol,
        }
    }
}

/// `s^{e/2}` with `0^{e/2} = 0`.
#[inline]
fn pow_half(s: f64, e: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else if e == 0.0 {
        1.0
    } else if e == 2.0 {
        s
    } else {
        (0.5 * e * s.ln()).exp()
    }
}

/// Closed form for `p = 2`: `f = T_n k/‖T_n k‖₂`, `‖k‖*_n = ‖T_n k‖₂`.
pub fn solve_p2(k: &Poly, n: usize, spec: &WeightSpec, grid: &QuadGrid) -> Result<ExtremalSolution> {
    let problem = Problem::new(k, n, 2.0, spec, grid, None)?;
    let x = problem.hilbert_start();
    Ok(problem.finish(&x, 0, 1e-10))
}

/// The extremal polynomial of degree at most `n` for the kernel `k`.
pub fn solve(
    k: &Poly,
    n: usize,
    e: Exponents,
    spec: &WeightSpec,
    grid: &QuadGrid,
    opts: &SolveOptions,
) -> Result<ExtremalSolution> {
    let problem = Problem::new(k, n, e.p(), spec, grid, None)?;
    let start = opts
        .init
        .as_ref()
        .and_then(|f| problem.onto_constraint(problem.to_unknowns(f)))
        .unwrap_or_else(|| problem.hilbert_start());
    let mut sol = minimize(&problem, start, opts);
    if e.p() == 2.0 {
        return Ok(sol);
    }
    // |g|^p is not smooth at the zeros of g; re-solve with cells graded
    // toward the zeros of the current solution until it settles.
    let mut iterations = sol.iterations;
    for _ in 0..REFINE_ROUNDS {
        let refined = Problem::new(k, n, e.p(), spec, grid, Some(&sol.f.roots()))?;
        let x = refined.onto_constraint(refined.to_unknowns(&sol.f)).unwrap_or_else(|| refined.hilbert_start());
        let next = minimize(&refined, x, opts);
        iterations += next.iterations;
        let shift = next.f.max_coeff_distance(&sol.f);
        sol = next;
        if shift < opts.tol {
            break;
        }
    }
    sol.iterations = iterations;
    Ok(sol)
}

const REFINE_ROUNDS: usize = 4;

/// Iterations without a new best residual before giving up.
const STALL_ITER: usize = 200;
const POLISH: f64 = 1e-3;
const POLISH_ITER: usize = 3;

fn minimize(problem: &Problem, mut x: DVector<f64>, opts: &SolveOptions) -> ExtremalSolution {
    let dim = problem.dim();
    let a = &problem.constraint;
    let mut best = (f64::INFINITY, x.clone());
    let mut best_at = 0;
    let mut iterations = opts.max_iter;
    for it in 0..opts.max_iter {
        let ev = problem.eval(&x);
        let grad = problem.gradient(&ev);
        let (res, _) = problem.residual(&x, &ev, &grad);
        if res < best.0 {
            best = (res, x.clone());
            best_at = it;
        }
        // A few extra steps once within tolerance, for margin.
        if res < POLISH * opts.tol || (res < opts.tol && it > best_at + POLISH_ITER) {
            return problem.finish(&best.1, it, opts.tol);
        }
        let newton = newton_direction(problem, &ev, &grad, a, dim);
        let projected = {
            let g = &grad - a * (a.dot(&grad) / a.dot(a));
            -g
        };
        let mut moved = false;
        for d in newton.into_iter().chain(std::iter::once(projected)) {
            let slope = grad.dot(&d);
            if !(slope < 0.0) {
                continue;
            }
            let mut t = 1.0;
            while t > 1e-14 {
                let trial = &x + &d * t;
                let v = problem.value(&trial);
                // Near the optimum the objective decrease drops below rounding;
                // accept then on a smaller residual instead.
                let flat = (v - ev.value).abs() <= 1e-12 * ev.value && {
                    let tev = problem.eval(&trial);
                    problem.residual(&trial, &tev, &problem.gradient(&tev)).0 < res
                };
                if v <= ev.value + 1e-4 * t * slope || flat {
                    // Re-impose the constraint exactly against drift.
                    let drift = a.dot(&trial) - 1.0;
                    x = trial - a * (drift / a.dot(a));
                    moved = true;
                    break;
                }
                t *= 0.5;
            }
            if moved {
                break;
            }
        }
        if !moved || it > best_at + STALL_ITER {
            iterations = it + 1;
            break;
        }
    }
    problem.finish(&best.1, iterations, opts.tol)
}

fn newton_direction(
    problem: &Problem,
    ev: &Eval,
    grad: &DVector<f64>,
    a: &DVector<f64>,
    dim: usize,
) -> Option<DVector<f64>> {
    let h = problem.hessian(ev);
    let mut kkt = DMatrix::zeros(dim + 1, dim + 1);
    kkt.view_mut((0, 0), (dim, dim)).copy_from(&h);
    for i in 0..dim {
        kkt[(i, dim)] = a[i];
        kkt[(dim, i)] = a[i];
    }
    let mut rhs = DVector::zeros(dim + 1);
    for i in 0..dim {
        rhs[i] = -grad[i];
    }
    let sol = kkt.lu().solve(&rhs)?;
    let d = sol.rows(0, dim).into_owned();
    d.iter().all(|v| v.is_finite()).then_some(d)
}

/// Orthogonality residual of a unit-norm `f` for the kernel `k` on `X_n`:
/// `max_m |∫ z^m |f|^{p-2} f̄ w dA - Φ_k(z^m)/‖k‖*_n| / ‖z^m‖_p`, with the
/// dual norm obtained from the solver.
pub fn residual(f: &Poly, k: &Poly, e: Exponents, spec: &WeightSpec, grid: &QuadGrid, n: usize) -> Result<f64> {
    let dual = solve(k, n, e, spec, grid, &SolveOptions::default())?.dual_norm;
    residual_with_dual(f, k, e, spec, grid, n, dual)
}

/// [`residual`] against a known dual norm.
pub fn residual_with_dual(
    f: &Poly,
    k: &Poly,
    e: Exponents,
    spec: &WeightSpec,
    grid: &QuadGrid,
    n: usize,
    dual_norm: f64,
) -> Result<f64> {
    let f = f.truncate(n);
    let zeros = f.roots();
    let problem = Problem::new(k, n, e.p(), spec, grid, (e.p() != 2.0).then_some(&zeros[..]))?;
    let x = problem.to_unknowns(&f);
    let ev = problem.eval(&x);
    let grad = problem.gradient(&ev);
    Ok(problem.residual_against(&ev, &grad, dual_norm))
}

#[derive(Clone, Debug, Serialize)]
pub struct SubspaceRow {
    pub n: usize,
    pub dual_norm: f64,
    /// `‖f_n - f_N‖_p` with `N` the last degree.
    pub distance_to_last: f64,
    /// `distance_{n}/distance_{previous}`, when defined.
    pub rate: Option<f64>,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubspaceReport {
    pub p: f64,
    pub rows: Vec<SubspaceRow>,
}

impl SubspaceReport {
    /// `dual_norm` never decreases by more than `tol` from one row to the next.
    pub fn dual_norm_monotone(&self, tol: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].dual_norm >= w[0].dual_norm - tol)
    }
}

/// Extremal problems on nested `X_n` for each `n` in `n_list`.
pub fn subspace_convergence(
    k: &Poly,
    e: Exponents,
    spec: &WeightSpec,
    grid: &QuadGrid,
    n_list: &[usize],
    opts: &SolveOptions,
) -> Result<SubspaceReport> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("degree list must be non-empty and increasing".into()));
    }
    let sols: Vec<ExtremalSolution> =
        n_list.par_iter().map(|&n| solve(k, n, e, spec, grid, opts)).collect::<Result<_>>()?;
    let last = &sols[sols.len() - 1].f;
    let mut rows: Vec<SubspaceRow> = Vec::with_capacity(sols.len());
    for s in &sols {
        let d = norm(&(&s.f - last), e, spec, grid)?;
        let rate = rows.last().and_then(|r| (r.distance_to_last > 0.0).then(|| d / r.distance_to_last));
        rows.push(SubspaceRow {
            n: s.degree,
            dual_norm: s.dual_norm,
            distance_to_last: d,
            rate,
            residual: s.residual,
            converged: s.converged,
        });
    }
    Ok(SubspaceReport { p: e.p(), rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelProbeRow {
    pub delta: f64,
    /// `‖f(k + δh) - f(k)‖_p`.
    pub distance: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelProbeReport {
    pub p: f64,
    pub rows: Vec<KernelProbeRow>,
}

/// Distance between the extremal polynomials of `k + δh` and `k`.
#[allow(clippy::too_many_arguments)]
pub fn kernel_continuity_probe(
    k: &Poly,
    h: &Poly,
    deltas: &[f64],
    e: Exponents,
    spec: &WeightSpec,
    grid: &QuadGrid,
    n: usize,
    opts: &SolveOptions,
) -> Result<KernelProbeReport> {
    let base = solve(k, n, e, spec, grid, opts)?;
    let rows = deltas
        .par_iter()
        .map(|&delta| {
            let kd = &(k + &h.scale(Complex64::new(delta, 0.0))).truncate(k.degree().max(h.degree()));
            let s = solve(kd, n, e, spec, grid, opts)?;
            let distance = norm(&(&s.f - &base.f), e, spec, grid)?;
            Ok(KernelProbeRow { delta, distance, converged: s.converged && base.converged })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KernelProbeReport { p: e.p(), rows })
}
