use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{check_range, int, EfunError};

pub const DENOMINATOR_MAX_M: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisibilityFailure {
    pub m: usize,
    pub denominator: String,
    pub bound: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenominatorReport {
    pub n: usize,
    pub nu: String,
    pub m_max: usize,
    /// max_m (1/m) ln lcm(den a₀, …, den a_{nm})
    pub growth: f64,
    /// m attaining the maximum
    pub witness: usize,
    pub divisible: bool,
    pub first_failure: Option<DivisibilityFailure>,
}

/// a_{nm} in ₀F_{n−1}(ν+1,…,(n−1)ν+1; −(z/n)ⁿ) = Σ_k a_k z^k/k!, for m = 0..=m_max
/// (all other a_k vanish).
pub fn efun_coefficients(n: usize, nu: &BigRational, m_max: usize) -> Result<Vec<BigRational>, EfunError> {
    let js: Vec<BigRational> = (1..n as i64).map(|j| nu * BigRational::from_integer(int(j)) + BigRational::one()).collect();
    for (j, a) in js.iter().enumerate() {
        if a.is_integer() && !a.is_positive() {
            return Err(EfunError::GammaPole(format!("{}*nu + 1 = {a} is a nonpositive integer", j + 1)));
        }
    }
    let nn = num_traits::pow(int(n as i64), n);
    let mut out = Vec::with_capacity(m_max + 1);
    // b_m = (−1)^m / (n^{nm} m! ∏ (jν+1)_m); a_{nm} = (nm)! b_m
    let mut b = BigRational::one();
    let mut fact = BigInt::one();
    out.push(BigRational::one());
    for m in 1..=m_max {
        let mut den = BigRational::from_integer(&nn * int(m as i64));
        for a in &js {
            den *= a + BigRational::from_integer(int(m as i64 - 1));
        }
        b = -b / den;
        for k in (n * (m - 1) + 1)..=(n * m) {
            fact *= int(k as i64);
        }
        out.push(&b * BigRational::from_integer(fact.clone()));
    }
    Ok(out)
}

/// Checks den(a_{nm}) | (nⁿ q^{n−1})^m for m ≤ m_max and reports the growth
/// rate of the common denominators.
pub fn efun_denominator_bound(n: usize, nu: &BigRational, m_max: usize) -> Result<DenominatorReport, EfunError> {
    check_range("n", n, 1, 30)?;
    check_range("m", m_max, 1, DENOMINATOR_MAX_M)?;
    let a = efun_coefficients(n, nu, m_max)?;
    let q = nu.denom().clone();
    let base = num_traits::pow(int(n as i64), n) * num_traits::pow(q, n - 1);
    let mut bound = BigInt::one();
    let mut lcm = BigInt::one();
    let mut growth = 0.0f64;
    let mut witness = 1;
    let mut first_failure = None;
    for (m, c) in a.iter().enumerate().skip(1) {
        bound *= &base;
        let den = c.denom();
        lcm = lcm.lcm(den);
        if first_failure.is_none() && !(&bound % den).is_zero() {
            first_failure = Some(DivisibilityFailure {
                m,
                denominator: den.to_string(),
                bound: bound.to_string(),
            });
        }
        let g = ln_big(&lcm) / m as f64;
        if g > growth {
            growth = g;
            witness = m;
        }
    }
    Ok(DenominatorReport {
        n,
        nu: if nu.is_integer() { nu.numer().to_string() } else { format!("{}/{}", nu.numer(), nu.denom()) },
        m_max,
        growth,
        witness,
        divisible: first_failure.is_none(),
        first_failure,
    })
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 900;
    let top: BigInt = x >> shift;
    num_traits::ToPrimitive::to_f64(&top).unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efun::q;

    #[test]
    fn bessel_nu_zero_divides_4_pow_m() {
        let r = efun_denominator_bound(2, &BigRational::zero(), 60).unwrap();
        assert!(r.divisible, "{:?}", r.first_failure);
        let a = efun_coefficients(2, &BigRational::zero(), 10).unwrap();
        // a_{2m} = (−1)^m C(2m, m)/4^m
        for (m, c) in a.iter().enumerate() {
            let binom = num_integer::binomial(int(2 * m as i64), int(m as i64));
            let sign = if m % 2 == 0 { 1 } else { -1 };
            assert_eq!(*c, BigRational::new(binom * int(sign), num_traits::pow(int(4), m)));
        }
    }

    #[test]
    fn n3_half_first_coefficient() {
        let a = efun_coefficients(3, &q(1, 2), 1).unwrap();
        // 3!·(−1)/(27 · (3/2) · 2)
        assert_eq!(a[1], q(-2, 27));
        assert!((int(108) % a[1].denom()).is_zero());
    }

    #[test]
    fn n3_third_first_coefficient() {
        let a = efun_coefficients(3, &q(1, 3), 1).unwrap();
        assert_eq!(a[1], q(-1, 10));
        let r = efun_denominator_bound(3, &q(1, 3), 60).unwrap();
        assert!(!r.divisible);
        assert_eq!(r.first_failure.unwrap().m, 1);
    }

    #[test]
    fn growth_is_bounded() {
        for (n, nu) in [(2, q(1, 2)), (3, q(1, 3)), (4, q(2, 3))] {
            let r40 = efun_denominator_bound(n, &nu, 40).unwrap();
            let r80 = efun_denominator_bound(n, &nu, 80).unwrap();
            assert!(r80.growth.is_finite());
            assert!(r80.growth < 3.0 * r40.growth.max(1.0));
        }
    }

    #[test]
    fn gamma_pole_rejected() {
        assert_eq!(efun_denominator_bound(3, &q(-1, 2), 5).unwrap_err().code(), "GammaPole");
        assert_eq!(efun_denominator_bound(3, &q(1, 2), 201).unwrap_err().code(), "RangeError");
    }
}
