use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::combinatorics::{c_coeff, ser_ints, sigma_coeffs};
use super::series::RationalSeries;
use super::{check_range, int, EfunError};

pub const ODE_MAX_N: usize = 20;

/// A_{1,n} xⁿ y⁽ⁿ⁾ + A_{2,n} x^{n−1} y⁽ⁿ⁻¹⁾ + … + A_{n,n} x y′ + (A_{n+1,n} + xⁿ) y = 0,
/// each A_{r,n} an integer polynomial in ν (ascending powers).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeSpec {
    pub n: usize,
    pub a: Vec<PolyNu>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyNu(#[serde(serialize_with = "ser_ints")] pub Vec<BigInt>);

impl PolyNu {
    pub fn eval(&self, nu: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * nu + BigRational::from_integer(c.clone()))
    }

    pub fn pretty(&self) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let coef = if mag.is_one() && k > 0 { String::new() } else { mag.to_string() };
            let var = match k {
                0 => String::new(),
                1 => "nu".to_string(),
                _ => format!("nu^{k}"),
            };
            let sign = if c.is_negative() { "-" } else { "+" };
            parts.push((sign, format!("{coef}{var}")));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (sign, t)) in parts.iter().enumerate() {
            if i == 0 {
                if *sign == "-" {
                    s.push('-');
                }
            } else {
                s.push_str(&format!(" {sign} "));
            }
            s.push_str(t);
        }
        s
    }
}

/// A_{r,n} = Σ_{k<r} σ_{k,n} C_{n−k,n+1−r} ν^k for r ≤ n, A_{n+1,n} = σ_{n,n} νⁿ.
pub fn ode_coeffs(n: usize) -> Result<OdeSpec, EfunError> {
    check_range("n", n, 1, ODE_MAX_N)?;
    let sigma = sigma_coeffs(n)?.values;
    let mut a = Vec::with_capacity(n + 1);
    for r in 1..=n {
        let coeffs = (0..r).map(|k| &sigma[k] * c_coeff(n - k, n + 1 - r)).collect();
        a.push(PolyNu(coeffs));
    }
    let mut last = vec![BigInt::zero(); n + 1];
    last[n] = sigma[n].clone();
    a.push(PolyNu(last));
    Ok(OdeSpec { n, a })
}

fn falling(e: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, i| acc * (e - BigRational::from_integer(int(i as i64))))
}

impl OdeSpec {
    /// A_{r,n}(ν), r = 1..n+1.
    pub fn at(&self, nu: &BigRational) -> Vec<BigRational> {
        self.a.iter().map(|p| p.eval(nu)).collect()
    }

    /// Indicial polynomial Σ_r A_r (e)_{n+1−r} + A_{n+1}: the operator on x^e, minus the xⁿ shift.
    pub fn indicial(&self, a: &[BigRational], e: &BigRational) -> BigRational {
        let n = self.n;
        let mut s = a[n].clone();
        for r in 1..=n {
            s += &a[r - 1] * falling(e, n + 1 - r);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeResidual {
    pub n: usize,
    pub p: usize,
    pub terms: usize,
    pub max_residual: f64,
    pub per_point: Vec<(f64, f64)>,
}

/// Applies the operator to the truncated Y_p term by term with exact
/// coefficients and returns |L[Y_p]| relative to the sum of |operator terms|.
pub fn ode_residual(n: usize, nu: &BigRational, p: usize, xs: &[f64], terms: usize) -> Result<OdeResidual, EfunError> {
    let spec = ode_coeffs(n)?;
    let y = RationalSeries::y(n, nu, p, terms)?;
    for &x in xs {
        if !(x > 0.0 && x <= 3.0) {
            return Err(EfunError::BadInput(format!("x = {x} outside (0, 3]")));
        }
    }
    let a = spec.at(nu);
    let nn = BigRational::from_integer(num_traits::pow(int(n as i64), n));
    let m = y.terms();
    // residual coefficients at exponents e_0..e_M
    let mut rho = Vec::with_capacity(m + 1);
    for h in 0..=m {
        let mut r = BigRational::zero();
        if h < m {
            r += &y.coeffs[h] * spec.indicial(&a, &y.term_exponent(h));
        }
        if h >= 1 {
            r += &nn * &y.coeffs[h - 1];
        }
        rho.push(r.to_f64().unwrap_or(f64::NAN));
    }
    // operator-term magnitudes: coefficient tables for each derivative order
    let af: Vec<f64> = a.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
    let fall: Vec<Vec<f64>> = (0..m)
        .map(|h| {
            let e = y.term_exponent(h);
            (0..=n).map(|k| (&y.coeffs[h] * falling(&e, k)).to_f64().unwrap_or(0.0)).collect()
        })
        .collect();
    let exps: Vec<f64> = (0..=m).map(|h| y.term_exponent(h).to_f64().unwrap_or(f64::NAN)).collect();
    let nf = n as f64;
    let mut per_point = Vec::with_capacity(xs.len());
    let mut worst = 0.0f64;
    for &x in xs {
        let ln_s = (x / nf).ln();
        let pw: Vec<f64> = exps.iter().map(|e| (e * ln_s).exp()).collect();
        let mut scale = 0.0;
        for r in 1..=n + 1 {
            let k = n + 1 - r;
            let t: f64 = (0..m).map(|h| fall[h][k] * pw[h]).sum();
            scale += (af[r - 1] * t).abs();
        }
        let shift: f64 = (0..m).map(|h| fall[h][0] * pw[h + 1]).sum::<f64>() * nf.powi(n as i32);
        scale += shift.abs();
        let res: f64 = rho.iter().zip(&pw).map(|(c, w)| c * w).sum();
        let rel = (res * y.prefactor).abs() / (scale * y.prefactor.abs());
        worst = worst.max(rel);
        per_point.push((x, rel));
    }
    Ok(OdeResidual {
        n,
        p,
        terms,
        max_residual: worst,
        per_point,
    })
}
