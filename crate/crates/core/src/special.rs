//! Gamma and Gauss hypergeometric helpers.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialError {
    #[error("GammaPole: Gamma({0}) is undefined")]
    GammaPole(f64),
    #[error("SeriesDomain: |x| = {0} outside the series domain")]
    SeriesDomain(f64),
    #[error("SeriesDomain: 2F1 series did not converge in {0} terms")]
    NoConvergence(usize),
}

/// Radius used for direct ₂F₁ summation.
pub const HYP2F1_RADIUS: f64 = 0.95;

pub fn is_gamma_pole(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

pub fn gamma(x: f64) -> Result<f64, SpecialError> {
    if is_gamma_pole(x) {
        return Err(SpecialError::GammaPole(x));
    }
    Ok(libm::tgamma(x))
}

/// Gauss ₂F₁(a, b; c; x) by its power series: |x| < 0.95, or any x when
/// a or b is a nonpositive integer (terminating series).
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> Result<f64, SpecialError> {
    let terminating = is_gamma_pole(a) || is_gamma_pole(b);
    if !terminating && x.abs() >= HYP2F1_RADIUS {
        return Err(SpecialError::SeriesDomain(x.abs()));
    }
    if is_gamma_pole(c) {
        return Err(SpecialError::GammaPole(c));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    const MAX_TERMS: usize = 5000;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * x;
        sum += term;
        if term == 0.0 || term.abs() <= 1e-16 * sum.abs() && k > 2 {
            return Ok(sum);
        }
    }
    Err(SpecialError::NoConvergence(MAX_TERMS))
}
