//! Radial weight functions `w` on `[0, R²)` and the quantities derived from them.
//!
//! A weight enters the area measure as `ν(z) = w(|z|²)`. Named families carry
//! closed forms for `w`, `w'` and `w''`; custom weights supply evaluators for
//! `w` and `w'` and, on a disc, the left limit `w(R²⁻)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A pure scalar evaluator, shareable across threads.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Step used for central differences of custom evaluators.
pub const DIFF_STEP: f64 = 1e-5;

/// Evaluators backing a user supplied weight.
#[derive(Clone)]
pub struct CustomWeight {
    pub name: String,
    pub w: ScalarFn,
    pub dw: ScalarFn,
    /// Left limit `w(R²⁻)`; required on a disc.
    pub boundary: Option<f64>,
}

impl fmt::Debug for CustomWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomWeight")
            .field("name", &self.name)
            .field("boundary", &self.boundary)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum WeightFamily {
    /// `w(x) = e^{-αx}/α` on the plane.
    Fock { alpha: f64 },
    /// `w(x) = (1 + x) e^{-αx}` on the plane, the measure `|z|²e^{-α|z|²} + e^{-α|z|²}`.
    FockPlus { alpha: f64 },
    /// `w(x) = a - b x` on a disc.
    Affine { a: f64, b: f64 },
    /// `w(x) = (1 - x/R²)^β` on a disc.
    Power { beta: f64 },
    Custom(CustomWeight),
}

/// A radial weight together with the radius of its domain (`f64::INFINITY` for the plane).
#[derive(Clone, Debug)]
pub struct WeightSpec {
    radius: f64,
    family: WeightFamily,
    validated: bool,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWeight(format!("{name} must be a positive finite number, got {v}")))
    }
}

impl WeightSpec {
    pub fn fock(alpha: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        Ok(Self { radius: f64::INFINITY, family: WeightFamily::Fock { alpha }, validated: false })
    }

    pub fn fock_plus(alpha: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        Ok(Self { radius: f64::INFINITY, family: WeightFamily::FockPlus { alpha }, validated: false })
    }

    pub fn affine(a: f64, b: f64, radius: f64) -> Result<Self> {
        check_positive("R", radius)?;
        check_positive("a", a)?;
        if !(b.is_finite() && b >= 0.0) {
            return Err(Error::InvalidWeight(format!("b must be non-negative, got {b}")));
        }
        if a < b * radius * radius {
            return Err(Error::InvalidWeight(format!(
                "affine weight needs a >= b R^2, got a = {a}, b R^2 = {}",
                b * radius * radius
            )));
        }
        Ok(Self { radius, family: WeightFamily::Affine { a, b }, validated: false })
    }

    pub fn power(beta: f64, radius: f64) -> Result<Self> {
        check_positive("R", radius)?;
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::InvalidWeight(format!("beta must be non-negative, got {beta}")));
        }
        Ok(Self { radius, family: WeightFamily::Power { beta }, validated: false })
    }

    /// A weight given by evaluators. `boundary` is the left limit at `R²` and is
    /// required when `radius` is finite.
    pub fn custom(
        name: impl Into<String>,
        radius: f64,
        w: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dw: impl Fn(f64) -> f64 + Send + Sync + 'static,
        boundary: Option<f64>,
    ) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidWeight(format!("R must be positive, got {radius}")));
        }
        if radius.is_finite() && boundary.is_none() {
            return Err(Error::InvalidWeight("a disc weight needs its left limit at R^2".into()));
        }
        Ok(Self {
            radius,
            family: WeightFamily::Custom(CustomWeight {
                name: name.into(),
                w: Arc::new(w),
                dw: Arc::new(dw),
                boundary,
            }),
            validated: false,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_plane(&self) -> bool {
        self.radius.is_infinite()
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    /// `R²`, the right end of the domain of `w`.
    pub fn upper(&self) -> f64 {
        self.radius * self.radius
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let upper = self.upper();
        if x.is_nan() || x < 0.0 || x >= upper {
            Err(Error::Domain { x, upper })
        } else {
            Ok(())
        }
    }

    pub fn eval_w(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.w(x))
    }

    pub fn eval_w_prime(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.dw(x))
    }

    /// `w(x)` without the domain check; callers guarantee `0 <= x <= R²`.
    pub(crate) fn w(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Fock { alpha } => (-alpha * x).exp() / alpha,
            WeightFamily::FockPlus { alpha } => (1.0 + x) * (-alpha * x).exp(),
            WeightFamily::Affine { a, b } => a - b * x,
            WeightFamily::Power { beta } => {
                let s = (1.0 - x / self.upper()).max(0.0);
                if *beta == 0.0 {
                    1.0
                } else {
                    s.powf(*beta)
                }
            }
            WeightFamily::Custom(c) => (c.w)(x),
        }
    }

    pub(crate) fn dw(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Fock { alpha } => -(-alpha * x).exp(),
            WeightFamily::FockPlus { alpha } => (-alpha * x).exp() * (1.0 - alpha * (1.0 + x)),
            WeightFamily::Affine { b, .. } => -b,
            WeightFamily::Power { beta } => {
                if *beta == 0.0 {
                    return 0.0;
                }
                let r2 = self.upper();
                let s = (1.0 - x / r2).max(0.0);
                -(beta / r2) * s.powf(beta - 1.0)
            }
            WeightFamily::Custom(c) => (c.dw)(x),
        }
    }

    /// `w''(x)`, analytic for named families and a central difference of `w'` otherwise.
    pub fn w_second(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Fock { alpha } => alpha * (-alpha * x).exp(),
            WeightFamily::FockPlus { alpha } => {
                alpha * (-alpha * x).exp() * (alpha * (1.0 + x) - 2.0)
            }
            WeightFamily::Affine { .. } => 0.0,
            WeightFamily::Power { beta } => {
                let r2 = self.upper();
                let s = (1.0 - x / r2).max(0.0);
                beta * (beta - 1.0) / (r2 * r2) * s.powf(beta - 2.0)
            }
            WeightFamily::Custom(c) => {
                let h = DIFF_STEP;
                if x >= h {
                    ((c.dw)(x + h) - (c.dw)(x - h)) / (2.0 * h)
                } else {
                    ((c.dw)(x + h) - (c.dw)(x)) / h
                }
            }
        }
    }

    /// `ln w(x)`, finite even where `w(x)` underflows for the exponential families.
    pub fn ln_w(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Fock { alpha } => -alpha * x - alpha.ln(),
            WeightFamily::FockPlus { alpha } => (1.0 + x).ln() - alpha * x,
            _ => self.w(x).ln(),
        }
    }

    /// `ln(-w'(x))`, or `-inf` where `w'(x) >= 0`.
    pub fn ln_neg_w_prime(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Fock { alpha } => -alpha * x,
            WeightFamily::FockPlus { alpha } => {
                let c = alpha * (1.0 + x) - 1.0;
                if c > 0.0 {
                    c.ln() - alpha * x
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ => {
                let d = self.dw(x);
                if d < 0.0 {
                    (-d).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// The left limit `w(R²⁻)` on a disc, `0` on the plane.
    pub fn boundary_value(&self) -> f64 {
        if self.is_plane() {
            return 0.0;
        }
        match &self.family {
            WeightFamily::Custom(c) => c.boundary.unwrap_or(0.0),
            _ => self.w(self.upper()),
        }
    }

    /// `λ(x) = -1/w'(x²)`, defined on the plane.
    pub fn lambda_of(&self, x: f64) -> Result<f64> {
        if !self.is_plane() {
            return Err(Error::InvalidArgument("lambda is defined for plane weights only".into()));
        }
        if !(x > 0.0) {
            return Err(Error::Domain { x, upper: f64::INFINITY });
        }
        let d = self.dw(x * x);
        if d == 0.0 {
            return Err(Error::DivisionByZero { x: x * x });
        }
        Ok(-1.0 / d)
    }

    /// `ln λ(x) = -ln(-w'(x²))`.
    pub fn ln_lambda(&self, x: f64) -> f64 {
        -self.ln_neg_w_prime(x * x)
    }

    /// `λ'(x)/λ(x) = -2x w''(x²)/w'(x²)`.
    pub fn lambda_log_derivative(&self, x: f64) -> f64 {
        match &self.family {
            WeightFamily::Fock { alpha } => 2.0 * alpha * x,
            _ => {
                let x2 = x * x;
                -2.0 * x * self.w_second(x2) / self.dw(x2)
            }
        }
    }

    /// Sampled check of positivity, monotonicity and, on the plane, decay of
    /// `rⁿ w(r²)` and `rⁿ w'(r²)` for `n = 1..=n_check`. Sets the validated flag.
    pub fn validate(&mut self, n_check: usize, r_grid: &[f64]) -> Validation {
        let report = self.diagnose(n_check, r_grid);
        self.validated = report.passed;
        report
    }

    /// [`WeightSpec::validate`] on [`WeightSpec::default_r_grid`].
    pub fn validate_default(&mut self, n_check: usize) -> Validation {
        let grid = self.default_r_grid(DEFAULT_SAMPLES);
        self.validate(n_check, &grid)
    }

    /// Sample radii used by validation: uniform in `[0, R)` on a disc, geometric
    /// in `[1e-2, 32]` on the plane.
    pub fn default_r_grid(&self, samples: usize) -> Vec<f64> {
        let samples = samples.max(2);
        if self.is_plane() {
            let (lo, hi) = (1e-2_f64.ln(), PLANE_SAMPLE_RADIUS.ln());
            (0..samples)
                .map(|i| (lo + (hi - lo) * i as f64 / (samples - 1) as f64).exp())
                .collect()
        } else {
            (0..samples).map(|i| self.radius * i as f64 / samples as f64).collect()
        }
    }

    fn diagnose(&self, n_check: usize, r_grid: &[f64]) -> Validation {
        let mut violations = Vec::new();
        if n_check == 0 {
            violations.push(Violation::Argument("n_check must be at least 1".into()));
        }
        if r_grid.len() < 2 || r_grid.windows(2).any(|p| !(p[1] > p[0])) || r_grid[0] < 0.0 {
            violations.push(Violation::Argument("r_grid must be non-negative and increasing".into()));
            return Validation { passed: false, violations, tail_max: Vec::new() };
        }
        let xs: Vec<f64> = r_grid.iter().map(|r| r * r).filter(|&x| x < self.upper()).collect();
        if xs.len() < 2 {
            violations.push(Violation::Argument("r_grid has fewer than two points inside the domain".into()));
            return Validation { passed: false, violations, tail_max: Vec::new() };
        }

        let mut strictly_decreasing_somewhere = false;
        let mut prev: Option<(f64, f64)> = None;
        for &x in &xs {
            let ln_w = self.ln_w(x);
            let d = self.dw(x);
            if ln_w.is_nan() || d.is_nan() {
                violations.push(Violation::Evaluation { x });
                continue;
            }
            if ln_w == f64::NEG_INFINITY {
                violations.push(Violation::Positivity { x, value: self.w(x) });
            }
            if d > 0.0 {
                violations.push(Violation::Monotonicity { x, derivative: d });
            } else if d < 0.0 {
                strictly_decreasing_somewhere = true;
            }
            if let Some((px, pln)) = prev {
                if ln_w > pln + 1e-12 {
                    violations.push(Violation::Increase { from: px, to: x });
                }
            }
            prev = Some((x, ln_w));
        }
        if !strictly_decreasing_somewhere {
            violations.push(Violation::Constant);
        }

        let mut tail_max = Vec::new();
        if self.is_plane() {
            let r_max = *r_grid.last().unwrap();
            let r_tail = r_max / 4.0;
            for n in 1..=n_check {
                let log_vals: Vec<(f64, f64)> = r_grid
                    .iter()
                    .filter(|&&r| r > 0.0)
                    .map(|&r| {
                        let x = r * r;
                        let lw = self.ln_w(x).max(self.ln_neg_w_prime(x));
                        (r, n as f64 * r.ln() + lw)
                    })
                    .collect();
                let peak = log_vals.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
                let tail: Vec<f64> =
                    log_vals.iter().filter(|v| v.0 >= r_tail).map(|v| v.1).collect();
                let tmax = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                tail_max.push((n, tmax.exp()));
                let monotone = tail.windows(2).all(|p| p[1] <= p[0] + 1e-12);
                let last = *tail.last().unwrap_or(&f64::NEG_INFINITY);
                if !monotone || last > peak + TAIL_DECAY.ln() {
                    violations.push(Violation::TailDecay { n, ratio: (last - peak).exp() });
                }
            }
        }

        Validation { passed: violations.is_empty(), violations, tail_max }
    }
}

/// Default number of validation samples.
pub const DEFAULT_SAMPLES: usize = 512;
/// Outer radius of the default plane validation grid.
pub const PLANE_SAMPLE_RADIUS: f64 = 32.0;
/// Required ratio of the last tail sample of `rⁿw(r²)` to its peak.
pub const TAIL_DECAY: f64 = 1e-10;

/// A condition violated during weight validation.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Argument(String),
    Evaluation { x: f64 },
    Positivity { x: f64, value: f64 },
    Monotonicity { x: f64, derivative: f64 },
    Increase { from: f64, to: f64 },
    Constant,
    TailDecay { n: usize, ratio: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Argument(s) => write!(f, "bad argument: {s}"),
            Violation::Evaluation { x } => write!(f, "evaluation failed at x = {x}"),
            Violation::Positivity { x, value } => write!(f, "w({x}) = {value} is not positive"),
            Violation::Monotonicity { x, derivative } => {
                write!(f, "monotonicity violated: w'({x}) = {derivative} > 0")
            }
            Violation::Increase { from, to } => write!(f, "w increases between x = {from} and x = {to}"),
            Violation::Constant => write!(f, "w is constant on the sample grid"),
            Violation::TailDecay { n, ratio } => {
                write!(f, "r^{n} w(r^2) does not decay on the grid tail (last/peak = {ratio:e})")
            }
        }
    }
}

/// Outcome of [`WeightSpec::validate`].
#[derive(Clone, Debug)]
pub struct Validation {
    pub passed: bool,
    pub violations: Vec<Violation>,
    /// For plane weights, `(n, max rⁿ max(w, -w') over r >= r_max/4)`.
    pub tail_max: Vec<(usize, f64)>,
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            WeightFamily::Fock { alpha } => write!(f, "fock:alpha={alpha}"),
            WeightFamily::FockPlus { alpha } => write!(f, "fockplus:alpha={alpha}"),
            WeightFamily::Affine { a, b } => write!(f, "affine:a={a},b={b},R={}", self.radius),
            WeightFamily::Power { beta } => write!(f, "power:beta={beta},R={}", self.radius),
            WeightFamily::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

impl FromStr for WeightSpec {
    type Err = Error;

    /// Parses `fock:alpha=1`, `fockplus:alpha=1`, `affine:a=2,b=1,R=1` or `power:beta=2,R=1`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params: Vec<(String, f64)> = Vec::new();
        for item in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("weight parameter `{item}` is not key=value")))?;
            let value: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("weight parameter `{}` is not a number", k.trim())))?;
            params.push((k.trim().to_string(), value));
        }
        let allowed: &[&str] = match name.trim() {
            "fock" | "fockplus" => &["alpha"],
            "affine" => &["a", "b", "R"],
            "power" => &["beta", "R"],
            other => return Err(Error::Parse(format!("unknown weight family `{other}`"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::Parse(format!("unknown weight parameter `{k}` for `{}`", name.trim())));
        }
        let get = |key: &str| -> Result<f64> {
            params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Parse(format!("missing weight parameter `{key}`")))
        };
        match name.trim() {
            "fock" => WeightSpec::fock(get("alpha")?),
            "fockplus" => WeightSpec::fock_plus(get("alpha")?),
            "affine" => WeightSpec::affine(get("a")?, get("b")?, get("R")?),
            _ => WeightSpec::power(get("beta")?, get("R")?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let f1 = WeightSpec::fock(1.0).unwrap();
        assert_eq!(f1.eval_w(0.0).unwrap(), 1.0);
        assert_eq!(f1.eval_w_prime(0.0).unwrap(), -1.0);
        let f2 = WeightSpec::fock(2.0).unwrap();
        assert!((f2.eval_w(1.0).unwrap() - 0.5 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((f2.eval_w(1.0).unwrap() - 0.0676676).abs() < 1e-7);

        let aff = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        assert_eq!(aff.eval_w(1.0 - 1e-16).unwrap(), 1.0);
        for x in [0.0, 0.3, 0.99] {
            assert_eq!(aff.eval_w_prime(x).unwrap(), -1.0);
        }
        assert_eq!(aff.boundary_value(), 1.0);

        let pw = WeightSpec::power(2.0, 1.0).unwrap();
        assert!((pw.eval_w_prime(0.5).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(pw.boundary_value(), 0.0);
    }

    #[test]
    fn domain_errors() {
        let aff = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        assert!(matches!(aff.eval_w(1.0), Err(Error::Domain { .. })));
        assert!(matches!(aff.eval_w(-0.1), Err(Error::Domain { .. })));
        assert!(matches!(aff.eval_w_prime(2.0), Err(Error::Domain { .. })));
        let f = WeightSpec::fock(1.0).unwrap();
        assert!(f.eval_w(1e6).is_ok());
        assert!(f.eval_w(-1.0).is_err());
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(WeightSpec::fock(0.0).is_err());
        assert!(WeightSpec::affine(1.0, 2.0, 1.0).is_err());
        assert!(WeightSpec::affine(2.0, -1.0, 1.0).is_err());
        assert!(WeightSpec::power(-1.0, 1.0).is_err());
        assert!(WeightSpec::custom("c", 1.0, |_| 1.0, |_| 0.0, None).is_err());
    }

    #[test]
    fn finite_differences_match_derivative() {
        let specs = [
            WeightSpec::fock(1.0).unwrap(),
            WeightSpec::fock(0.3).unwrap(),
            WeightSpec::fock_plus(2.0).unwrap(),
            WeightSpec::affine(2.0, 1.0, 1.0).unwrap(),
            WeightSpec::power(2.0, 1.0).unwrap(),
            WeightSpec::power(3.5, 2.0).unwrap(),
        ];
        let h = 1e-5;
        for spec in &specs {
            let top = if spec.is_plane() { 6.0 } else { spec.upper() * 0.9 };
            for i in 1..200 {
                let x = top * i as f64 / 200.0;
                let fd = (spec.w(x + h) - spec.w(x - h)) / (2.0 * h);
                let d = spec.dw(x);
                let err = (fd - d).abs() / d.abs().max(1e-300);
                assert!(err < 1e-6, "{spec} at {x}: fd {fd} vs {d}");
                let fd2 = (spec.dw(x + h) - spec.dw(x - h)) / (2.0 * h);
                let d2 = spec.w_second(x);
                assert!((fd2 - d2).abs() <= 1e-6 * d2.abs().max(1e-3), "{spec} w'' at {x}");
            }
        }
    }

    #[test]
    fn validation_outcomes() {
        let mut f = WeightSpec::fock(1.0).unwrap();
        let report = f.validate_default(8);
        assert!(report.passed, "{:?}", report.violations);
        assert!(f.is_validated());
        assert_eq!(report.tail_max.len(), 8);
        assert!(report.tail_max.iter().all(|(_, m)| *m < 1e-10));
        let r8: f64 = 8.0;
        assert!((r8.powi(8) * (-64.0f64).exp() - 2.7e-21).abs() < 1e-22);

        let mut aff = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        let report = aff.validate_default(8);
        assert!(report.passed);
        assert!(report.tail_max.is_empty());

        let mut inc = WeightSpec::custom("inc", 1.0, |x| 1.0 + x, |_| 1.0, Some(2.0)).unwrap();
        let report = inc.validate_default(4);
        assert!(!report.passed);
        assert!(!inc.is_validated());
        assert!(report.violations.iter().any(|v| matches!(v, Violation::Monotonicity { .. })));

        let mut slow =
            WeightSpec::custom("slow", f64::INFINITY, |x| 1.0 / (1.0 + x * x), |x| {
                -2.0 * x / (1.0 + x * x).powi(2)
            }, None)
            .unwrap();
        let report = slow.validate_default(8);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::TailDecay { .. })));

        let mut constant = WeightSpec::affine(1.0, 0.0, 1.0).unwrap();
        assert!(constant
            .validate_default(2)
            .violations
            .contains(&Violation::Constant));
    }

    #[test]
    fn validation_never_panics_on_bad_grid() {
        let mut f = WeightSpec::fock(1.0).unwrap();
        let report = f.validate(0, &[1.0, 0.5]);
        assert!(!report.passed);
        assert!(report.violations.len() >= 2);
    }

    #[test]
    fn lambda() {
        let f1 = WeightSpec::fock(1.0).unwrap();
        assert!((f1.lambda_of(1.0).unwrap() - std::f64::consts::E).abs() < 1e-15);
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            let spec = WeightSpec::fock(alpha).unwrap();
            for x in [0.1, 0.7, 1.3, 2.0] {
                let expected = (alpha * x * x).exp();
                let got = spec.lambda_of(x).unwrap();
                assert!((got - expected).abs() <= 4.0 * f64::EPSILON * expected);
                assert!((spec.ln_lambda(x) - alpha * x * x).abs() < 1e-15);
            }
        }
        let flat = WeightSpec::custom("flat", f64::INFINITY, |_| 1.0, |_| 0.0, None).unwrap();
        assert!(matches!(flat.lambda_of(1.0), Err(Error::DivisionByZero { .. })));
        let disc = WeightSpec::affine(2.0, 1.0, 1.0).unwrap();
        assert!(disc.lambda_of(0.5).is_err());
    }

    #[test]
    fn log_derivative_matches_difference() {
        let spec = WeightSpec::fock_plus(1.5).unwrap();
        for x in [1.0, 2.0, 3.0] {
            let h = 1e-5;
            let fd = (spec.ln_lambda(x + h) - spec.ln_lambda(x - h)) / (2.0 * h);
            assert!((fd - spec.lambda_log_derivative(x)).abs() < 1e-6);
        }
    }

    #[test]
    fn parse_round_trip() {
        for s in ["fock:alpha=1", "fock:alpha=0.25", "fockplus:alpha=2", "affine:a=2,b=1,R=1", "power:beta=2,R=1.5"] {
            let spec: WeightSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let spec: WeightSpec = "fock:alpha=1.0".parse().unwrap();
        assert_eq!(spec.to_string(), "fock:alpha=1");
        assert!("fock".parse::<WeightSpec>().is_err());
        assert!("fock:beta=1".parse::<WeightSpec>().unwrap_err().to_string().contains("beta"));
        assert!("heat:alpha=1".parse::<WeightSpec>().is_err());
        assert!("affine:a=2,b=x,R=1".parse::<WeightSpec>().is_err());
    }
}
