use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {x} outside the weight domain [0, {upper})")]
    Domain { x: f64, upper: f64 },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("w'({x}) vanishes, lambda is undefined")]
    DivisionByZero { x: f64 },

    #[error("invalid quadrature order: {0}")]
    InvalidOrder(String),

    #[error("tail of the moment integral does not converge: {0}")]
    NonConvergentTail(String),

    #[error("monomial index {m} exceeds the grid limit {max}")]
    OutOfRange { m: usize, max: usize },

    #[error("polynomial degree {degree} exceeds what the grid resolves ({limit})")]
    DegreeOverflow { degree: usize, limit: usize },

    #[error("exponent p = {0} must lie in (1, inf)")]
    InvalidExponent(f64),

    #[error("kernel vanishes on polynomials of degree <= {degree}")]
    ZeroKernel { degree: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
