//! Run settings read from a TOML file; command-line flags take precedence.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config: cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("config: invalid TOML: {0}")]
    Syntax(String),
    #[error("config: unknown key `{0}`")]
    UnknownKey(String),
    #[error("config: key `{key}`: expected {expected}")]
    Type { key: String, expected: &'static str },
    #[error("config: key `{key}`: {reason}")]
    Value { key: String, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angular_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        Self::parse(&text)
    }

    /// Checks every key separately so that a diagnostic can name it.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(one_line(e.message())))?;
        let mut cfg = Self::default();
        for (key, value) in &table {
            match key.as_str() {
                "weight" => {
                    let s = string(key, value)?;
                    s.parse::<bergman::WeightSpec>()
                        .map_err(|e| ConfigError::Value { key: key.clone(), reason: e.to_string() })?;
                    cfg.weight = Some(s);
                }
                "p" => {
                    // p = 1 is meaningful for integral means; solvers check p > 1 themselves.
                    let p = number(key, value)?;
                    if !(p >= 1.0 && p.is_finite()) {
                        return Err(ConfigError::Value { key: key.clone(), reason: format!("must be at least 1, got {p}") });
                    }
                    cfg.p = Some(p);
                }
                "degree" => cfg.degree = Some(count(key, value)?),
                "kernel" => cfg.kernel = Some(string(key, value)?),
                "function" => cfg.function = Some(string(key, value)?),
                "tol" => cfg.tol = Some(positive(key, value)?),
                "grid_tol" => cfg.grid_tol = Some(positive(key, value)?),
                "radial_order" => cfg.radial_order = Some(count(key, value)?),
                "angular_order" => cfg.angular_order = Some(count(key, value)?),
                "max_degree" => cfg.max_degree = Some(count(key, value)?),
                "out" => cfg.out = Some(string(key, value)?),
                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }
        Ok(cfg)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat table of scalars")
    }

    /// Fields of `self`, falling back to `other` where unset.
    pub fn or(self, other: &Self) -> Self {
        Self {
            weight: self.weight.or_else(|| other.weight.clone()),
            p: self.p.or(other.p),
            degree: self.degree.or(other.degree),
            kernel: self.kernel.or_else(|| other.kernel.clone()),
            function: self.function.or_else(|| other.function.clone()),
            tol: self.tol.or(other.tol),
            grid_tol: self.grid_tol.or(other.grid_tol),
            radial_order: self.radial_order.or(other.radial_order),
            angular_order: self.angular_order.or(other.angular_order),
            max_degree: self.max_degree.or(other.max_degree),
            out: self.out.or_else(|| other.out.clone()),
        }
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn string(key: &str, v: &Value) -> Result<String, ConfigError> {
    v.as_str().map(str::to_owned).ok_or(ConfigError::Type { key: key.into(), expected: "a string" })
}

fn number(key: &str, v: &Value) -> Result<f64, ConfigError> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(ConfigError::Type { key: key.into(), expected: "a number" }),
    }
}

fn positive(key: &str, v: &Value) -> Result<f64, ConfigError> {
    let x = number(key, v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::Value { key: key.into(), reason: format!("must be positive, got {x}") })
    }
}

fn count(key: &str, v: &Value) -> Result<usize, ConfigError> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        _ => Err(ConfigError::Type { key: key.into(), expected: "a non-negative integer" }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "weight = \"fock:alpha=1\"\np = 2.5\ndegree = 6\ntol = 1e-9\nangular_order = 40\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.p, Some(2.5));
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn integer_exponent_is_accepted() {
        assert_eq!(RunConfig::parse("p = 3").unwrap().p, Some(3.0));
    }

    #[test]
    fn diagnostics_name_the_key() {
        for (text, key) in [
            ("p = \"two\"", "`p`"),
            ("degree = -1", "`degree`"),
            ("weight = \"gauss:alpha=1\"", "`weight`"),
            ("p = 0.5", "`p`"),
            ("colour = 1", "`colour`"),
            ("tol = 0", "`tol`"),
        ] {
            let msg = RunConfig::parse(text).unwrap_err().to_string();
            assert!(msg.contains(key), "{msg}");
            assert_eq!(msg.lines().count(), 1);
        }
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig { p: Some(3.0), degree: Some(4), ..Default::default() };
        let flags = RunConfig { p: Some(2.0), ..Default::default() };
        let merged = flags.or(&file);
        assert_eq!(merged.p, Some(2.0));
        assert_eq!(merged.degree, Some(4));
    }
}
