//! Generalized Bessel E-functions, their ODEs, and the eigenvalue problem
//! ∂ⁿu/∂x₁…∂xₙ + u = λ.

mod combinatorics;
mod denominators;
mod eigen;
mod ode;
mod series;

pub use combinatorics::*;
pub use denominators::*;
pub use eigen::*;
pub use ode::*;
pub use series::*;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::quad::QuadError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EfunError {
    #[error("RangeError: {what} = {value} outside {min}..={max}")]
    Range {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },
    #[error("GammaPole: {0}")]
    GammaPole(String),
    #[error("ResonantExponents: exponents {0} and {1} differ by a multiple of n")]
    ResonantExponents(String, String),
    #[error("TruncationTooSmall: {0}")]
    TruncationTooSmall(String),
    #[error("IncompatibleBoundaryData: phi_({h}) and phi_({l}) differ by {diff:e} at {point:?}")]
    IncompatibleBoundaryData {
        h: usize,
        l: usize,
        point: Vec<f64>,
        diff: f64,
    },
    #[error("BadInput: {0}")]
    BadInput(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

impl EfunError {
    pub fn code(&self) -> &'static str {
        match self {
            EfunError::Range { .. } => "RangeError",
            EfunError::GammaPole(_) => "GammaPole",
            EfunError::ResonantExponents(..) => "ResonantExponents",
            EfunError::TruncationTooSmall(_) => "TruncationTooSmall",
            EfunError::IncompatibleBoundaryData { .. } => "IncompatibleBoundaryData",
            EfunError::BadInput(_) => "BadInput",
            EfunError::Quadrature(_) => "QuadratureNonConvergence",
        }
    }
}

pub(crate) fn check_range(what: &'static str, value: usize, min: usize, max: usize) -> Result<(), EfunError> {
    if value < min || value > max {
        return Err(EfunError::Range {
            what,
            value: value as i64,
            min: min as i64,
            max: max as i64,
        });
    }
    Ok(())
}

pub(crate) fn int(k: i64) -> BigInt {
    BigInt::from(k)
}

#[cfg(test)]
pub(crate) fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(int(n), int(d))
}

/// Parses "p/q" or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.trim().parse().map_err(|e| format!("bad numerator in '{s}': {e}"))?;
    let d: BigInt = d.trim().parse().map_err(|e| format!("bad denominator in '{s}': {e}"))?;
    if d == int(0) {
        return Err(format!("zero denominator in '{s}'"));
    }
    Ok(BigRational::new(n, d))
}
