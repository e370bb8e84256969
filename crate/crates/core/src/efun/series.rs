use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{check_range, int, EfunError};

pub const SERIES_MAX_TERMS: usize = 500;
pub const SERIES_MAX_N: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesKind {
    /// E_n(z) = Σ (−1)^m (z/n)^{nm}/(m!)ⁿ
    E,
    /// F_n(x₁,…,x_n) = Σ (−1)^m (x₁⋯x_n)^m/(m!)ⁿ
    F,
    /// L_{ν,n} = Y₀
    L,
    /// Y_p, p = 0..n−1
    Y(usize),
    /// ₀F_{n−1}(ν+1, 2ν+1, …, (n−1)ν+1; z)
    ZeroF,
}

impl std::str::FromStr for SeriesKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "E" | "e" => Ok(SeriesKind::E),
            "F" | "f" => Ok(SeriesKind::F),
            "L" | "l" => Ok(SeriesKind::L),
            "0F" | "zerof" | "ZeroF" => Ok(SeriesKind::ZeroF),
            _ => {
                let p = s
                    .strip_prefix('Y')
                    .or_else(|| s.strip_prefix('y'))
                    .ok_or_else(|| format!("unknown series kind '{s}' (E, F, L, Y<p>, 0F)"))?;
                let p = if p.is_empty() { 0 } else { p.parse().map_err(|e| format!("bad p in '{s}': {e}"))? };
                Ok(SeriesKind::Y(p))
            }
        }
    }
}

/// Truncated series with exact coefficients.
///
/// Value = prefactor · (x/n)^exponent · Σ_{h<M} coeffs[h] · w^h, where w is
/// (x/n)ⁿ for E, L, Y; x₁⋯x_n for F; and the argument itself for ZeroF.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSeries {
    pub kind: SeriesKind,
    pub n: usize,
    pub nu: BigRational,
    pub coeffs: Vec<BigRational>,
    /// coeffs[M] / coeffs[M−1], used for the tail estimate.
    pub next_ratio: BigRational,
    pub exponent: BigRational,
    pub prefactor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

fn factors(n: usize, p: usize) -> Vec<i64> {
    (-(p as i64)..(n as i64 - p as i64)).filter(|&j| j != 0).collect()
}

fn rat_str(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn is_nonpositive_integer(r: &BigRational) -> bool {
    r.is_integer() && !r.is_positive()
}

/// (−1)^h / (h! ∏_j (jν+1)_h) for h < M, and the ratio for h = M.
fn hyper_coeffs(js: &[i64], nu: &BigRational, terms: usize, sign: bool) -> (Vec<BigRational>, BigRational) {
    let mut out = Vec::with_capacity(terms);
    let mut c = BigRational::one();
    let ratio = |h: usize| {
        let hq = BigRational::from_integer(int(h as i64));
        let mut den = hq.clone();
        for &j in js {
            den *= nu * BigRational::from_integer(int(j)) + &hq;
        }
        let r = den.recip();
        if sign {
            -r
        } else {
            r
        }
    };
    out.push(c.clone());
    for h in 1..terms {
        c *= ratio(h);
        out.push(c.clone());
    }
    (out, ratio(terms))
}

impl RationalSeries {
    fn check_terms(terms: usize) -> Result<(), EfunError> {
        check_range("terms", terms, 1, SERIES_MAX_TERMS)
    }

    pub fn e(n: usize, terms: usize) -> Result<Self, EfunError> {
        check_range("n", n, 1, SERIES_MAX_N)?;
        Self::check_terms(terms)?;
        let (coeffs, next_ratio) = hyper_coeffs(&vec![0; n - 1], &BigRational::zero(), terms, true);
        Ok(RationalSeries {
            kind: SeriesKind::E,
            n,
            nu: BigRational::zero(),
            coeffs,
            next_ratio,
            exponent: BigRational::zero(),
            prefactor: 1.0,
        })
    }

    pub fn f(n: usize, terms: usize) -> Result<Self, EfunError> {
        Ok(RationalSeries {
            kind: SeriesKind::F,
            ..Self::e(n, terms)?
        })
    }

    pub fn zero_f(n: usize, nu: &BigRational, terms: usize) -> Result<Self, EfunError> {
        check_range("n", n, 1, SERIES_MAX_N)?;
        Self::check_terms(terms)?;
        let js = factors(n, 0);
        check_poles(&js, nu)?;
        let (coeffs, next_ratio) = hyper_coeffs(&js, nu, terms, false);
        Ok(RationalSeries {
            kind: SeriesKind::ZeroF,
            n,
            nu: nu.clone(),
            coeffs,
            next_ratio,
            exponent: BigRational::zero(),
            prefactor: 1.0,
        })
    }

    pub fn l(n: usize, nu: &BigRational, terms: usize) -> Result<Self, EfunError> {
        Ok(RationalSeries {
            kind: SeriesKind::L,
            ..Self::y_unchecked(n, nu, 0, terms)?
        })
    }

    /// Y_p; requires non-resonant exponents.
    pub fn y(n: usize, nu: &BigRational, p: usize, terms: usize) -> Result<Self, EfunError> {
        check_range("n", n, 1, SERIES_MAX_N)?;
        check_range("p", p, 0, n - 1)?;
        check_resonance(n, nu)?;
        Self::y_unchecked(n, nu, p, terms)
    }

    fn y_unchecked(n: usize, nu: &BigRational, p: usize, terms: usize) -> Result<Self, EfunError> {
        check_range("n", n, 1, SERIES_MAX_N)?;
        check_range("p", p, 0, n - 1)?;
        Self::check_terms(terms)?;
        let js = factors(n, p);
        check_poles(&js, nu)?;
        let (coeffs, next_ratio) = hyper_coeffs(&js, nu, terms, true);
        let mut prefactor = 1.0;
        for &j in &js {
            let a = (nu * BigRational::from_integer(int(j)) + BigRational::one()).to_f64().unwrap_or(f64::NAN);
            prefactor /= libm::tgamma(a);
        }
        let exponent = nu * BigRational::from_integer(int(1 - (p * n) as i64));
        Ok(RationalSeries {
            kind: SeriesKind::Y(p),
            n,
            nu: nu.clone(),
            coeffs,
            next_ratio,
            exponent,
            prefactor,
        })
    }

    pub fn build(kind: SeriesKind, n: usize, nu: &BigRational, terms: usize) -> Result<Self, EfunError> {
        match kind {
            SeriesKind::E => Self::e(n, terms),
            SeriesKind::F => Self::f(n, terms),
            SeriesKind::L => Self::l(n, nu, terms),
            SeriesKind::Y(p) => Self::y(n, nu, p, terms),
            SeriesKind::ZeroF => Self::zero_f(n, nu, terms),
        }
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Exponent of the h-th term in x/n: exponent + h n.
    pub fn term_exponent(&self, h: usize) -> BigRational {
        &self.exponent + BigRational::from_integer(int((h * self.n) as i64))
    }

    fn sum_in(&self, w: f64) -> Result<SeriesValue, EfunError> {
        let m = self.coeffs.len();
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut last = 1.0f64;
        for h in 1..m {
            let r = (&self.coeffs[h] / &self.coeffs[h - 1]).to_f64().unwrap_or(0.0);
            term *= r * w;
            sum += term;
            last = term;
        }
        let next = term * self.next_ratio.to_f64().unwrap_or(0.0) * w;
        if m > 1 && next.abs() > last.abs() && next.abs() > 1e-300 {
            return Err(EfunError::TruncationTooSmall(format!(
                "terms still growing at M = {m} (|a_M w^M| = {:e})",
                next.abs()
            )));
        }
        Ok(SeriesValue {
            value: sum,
            tail_bound: next.abs(),
        })
    }

    /// Evaluates a one-variable kind (E, L, Y, ZeroF) at x.
    pub fn eval(&self, x: f64) -> Result<SeriesValue, EfunError> {
        let n = self.n as f64;
        let (w, outer) = match self.kind {
            SeriesKind::F => {
                return Err(EfunError::BadInput("F_n takes n coordinates".into()));
            }
            SeriesKind::ZeroF => (x, 1.0),
            _ => {
                let s = x / n;
                let e = self.exponent.to_f64().unwrap_or(0.0);
                let outer = if self.exponent.is_zero() {
                    1.0
                } else if self.exponent.is_integer() {
                    s.powi(e as i32)
                } else if s > 0.0 {
                    s.powf(e)
                } else {
                    return Err(EfunError::BadInput(format!(
                        "x = {x} must be positive for exponent {}",
                        rat_str(&self.exponent)
                    )));
                };
                (s.powi(self.n as i32), outer)
            }
        };
        let v = self.sum_in(w)?;
        let scale = self.prefactor * outer;
        Ok(SeriesValue {
            value: v.value * scale,
            tail_bound: v.tail_bound * scale.abs(),
        })
    }

    /// Evaluates F_n at (x₁,…,x_n).
    pub fn eval_multi(&self, x: &[f64]) -> Result<SeriesValue, EfunError> {
        if self.kind != SeriesKind::F {
            return self.eval(*x.first().ok_or_else(|| EfunError::BadInput("empty point".into()))?);
        }
        if x.len() != self.n {
            return Err(EfunError::BadInput(format!("F_{} needs {} coordinates, got {}", self.n, self.n, x.len())));
        }
        self.sum_in(x.iter().product())
    }

    /// Coefficient strings "p/q" of the retained terms.
    pub fn coefficient_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rat_str).collect()
    }
}

fn check_poles(js: &[i64], nu: &BigRational) -> Result<(), EfunError> {
    for &j in js {
        let a = nu * BigRational::from_integer(int(j)) + BigRational::one();
        if is_nonpositive_integer(&a) {
            return Err(EfunError::GammaPole(format!(
                "Gamma argument {j}*nu + 1 = {} is a nonpositive integer",
                rat_str(&a)
            )));
        }
    }
    Ok(())
}

/// Exponents ν(1 − i n); the recurrence steps by n, so two of them collide
/// when they differ by a multiple of n, i.e. when ν d ∈ ℤ for some 1 ≤ d < n.
fn check_resonance(n: usize, nu: &BigRational) -> Result<(), EfunError> {
    for d in 1..n {
        if (nu * BigRational::from_integer(int(d as i64))).is_integer() {
            let e = |i: usize| rat_str(&(nu * BigRational::from_integer(int(1 - (i * n) as i64))));
            return Err(EfunError::ResonantExponents(e(0), e(d)));
        }
    }
    Ok(())
}

/// F_n(x) in floating point, summed until the terms fall below machine precision.
pub fn f_kernel(n: usize, x: &[f64]) -> f64 {
    let p: f64 = x.iter().product();
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for m in 1..10_000 {
        term *= -p / (m as f64).powi(n as i32);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs().max(1e-300) && (m as f64) > p.abs() {
            break;
        }
    }
    sum
}

/// (m!)ⁿ as a big integer.
#[cfg(test)]
pub(crate) fn factorial_pow(m: usize, n: usize) -> num_bigint::BigInt {
    num_traits::pow((1..=m as i64).fold(num_bigint::BigInt::one(), |a, k| a * int(k)), n)
}
