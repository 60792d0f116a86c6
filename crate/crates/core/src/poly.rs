//! Polynomials in the monomial basis with complex coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `a₀ + a₁z + … + a_n zⁿ`. The degree is the number of stored coefficients
/// minus one; trailing zeros are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Default for Poly {
    fn default() -> Self {
        Self::zero()
    }
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("polynomial coefficients must be finite".into()));
        }
        if coeffs.is_empty() {
            return Ok(Self::zero());
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        let mut c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        if c.is_empty() {
            c.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs: c }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0)] }
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// `zᵐ`.
    pub fn monomial(m: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
        coeffs[m] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Complex64 {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the highest nonzero coefficient, `None` for the zero polynomial.
    pub fn effective_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.effective_degree().is_none()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// `(f(z), f'(z))` in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut f = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            d = d * z + f;
            f = f * z + c;
        }
        (f, d)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(j, c)| c * j as f64).collect();
        Self { coeffs }
    }

    /// `z·f`.
    pub fn mul_z(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Coefficients beyond degree `n` dropped; zero-padded up to degree `n`.
    pub fn truncate(&self, n: usize) -> Self {
        let mut coeffs: Vec<Complex64> = self.coeffs.iter().take(n + 1).copied().collect();
        coeffs.resize(n + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// `max_m |a_m - b_m|`.
    pub fn max_coeff_distance(&self, other: &Poly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).map(|m| (self.coeff(m) - other.coeff(m)).norm()).fold(0.0, f64::max)
    }

    /// Complex roots by the Aberth–Ehrlich iteration, exact zeros at the origin
    /// split off first.
    pub fn roots(&self) -> Vec<Complex64> {
        let Some(top) = self.effective_degree() else {
            return Vec::new();
        };
        let low = self.coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0);
        let mut roots = vec![Complex64::new(0.0, 0.0); low];
        let c: Vec<Complex64> = self.coeffs[low..=top].to_vec();
        let d = c.len() - 1;
        if d == 0 {
            return roots;
        }
        let lead = c[d];
        let monic: Vec<Complex64> = c.iter().map(|a| a / lead).collect();
        if d == 1 {
            roots.push(-monic[0]);
            return roots;
        }
        let bound = (0..d)
            .map(|k| monic[k].norm().powf(1.0 / (d - k) as f64))
            .fold(0.0, f64::max)
            .max(1e-3);
        let mut z: Vec<Complex64> = (0..d)
            .map(|k| Complex64::from_polar(bound, 2.0 * std::f64::consts::PI * k as f64 / d as f64 + 0.4))
            .collect();
        let eval = |x: Complex64| {
            let mut f = Complex64::new(0.0, 0.0);
            let mut df = Complex64::new(0.0, 0.0);
            for a in monic.iter().rev() {
                df = df * x + f;
                f = f * x + a;
            }
            (f, df)
        };
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for i in 0..d {
                let (f, df) = eval(z[i]);
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let ratio = f / df;
                let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if step.re.is_finite() && step.im.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        roots.extend(z);
        roots
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly { coeffs: (0..n).map(|m| self.coeff(m) + rhs.coeff(m)).collect() }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly { coeffs: (0..n).map(|m| self.coeff(m) - rhs.coeff(m)).collect() }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { coeffs }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.coeffs.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coef = if c.im == 0.0 { format!("{}", c.re) } else { format!("({}{:+}i)", c.re, c.im) };
            match m {
                0 => write!(f, "{coef}")?,
                1 => write!(f, "{coef}z")?,
                _ => write!(f, "{coef}z^{m}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Coef {
            Pair([f64; 2]),
            Real(f64),
        }
        let raw: Vec<Coef> = Vec::deserialize(d)?;
        let coeffs = raw
            .into_iter()
            .map(|c| match c {
                Coef::Pair([re, im]) => Complex64::new(re, im),
                Coef::Real(re) => Complex64::new(re, 0.0),
            })
            .collect();
        Poly::new(coeffs).map_err(serde::de::Error::custom)
    }
}
