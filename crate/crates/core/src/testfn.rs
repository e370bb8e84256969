//! Built-in test-function families, addressable by string id.
//!
//! Univariate: `pow<k>` (t^k), `exp`, `sin`, `cos`.
//! Multivariate on x ∈ ℝ^d:
//! `const:c`, `affine:c0,c1,..` (c0 + Σ c_i x_i), `prod` (∏ x_i),
//! `<uni>:w1,w2,..` (uni(Σ w_i x_i); weights default to 1).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::poly::RationalPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniFn {
    Pow(u32),
    Exp,
    Sin,
    Cos,
}

impl UniFn {
    pub fn eval(&self, t: Complex64) -> Complex64 {
        match self {
            UniFn::Pow(k) => t.powu(*k),
            UniFn::Exp => t.exp(),
            UniFn::Sin => t.sin(),
            UniFn::Cos => t.cos(),
        }
    }

    pub fn eval_real(&self, t: f64) -> f64 {
        match self {
            UniFn::Pow(k) => t.powi(*k as i32),
            UniFn::Exp => t.exp(),
            UniFn::Sin => t.sin(),
            UniFn::Cos => t.cos(),
        }
    }

    /// k-th derivative.
    pub fn derivative(&self, k: u32, t: Complex64) -> Complex64 {
        match self {
            UniFn::Pow(d) => {
                if k > *d {
                    Complex64::zero()
                } else {
                    let c: f64 = (d - k + 1..=*d).map(f64::from).product();
                    t.powu(d - k) * c
                }
            }
            UniFn::Exp => t.exp(),
            UniFn::Sin => match k % 4 {
                0 => t.sin(),
                1 => t.cos(),
                2 => -t.sin(),
                _ => -t.cos(),
            },
            UniFn::Cos => match k % 4 {
                0 => t.cos(),
                1 => -t.sin(),
                2 => -t.cos(),
                _ => t.sin(),
            },
        }
    }

    pub fn degree(&self) -> Option<u32> {
        match self {
            UniFn::Pow(k) => Some(*k),
            _ => None,
        }
    }
}

impl FromStr for UniFn {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exp" => Ok(UniFn::Exp),
            "sin" => Ok(UniFn::Sin),
            "cos" => Ok(UniFn::Cos),
            _ => s
                .strip_prefix("pow")
                .and_then(|k| k.parse().ok())
                .map(UniFn::Pow)
                .ok_or_else(|| format!("unknown univariate function '{s}'")),
        }
    }
}

impl fmt::Display for UniFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UniFn::Pow(k) => write!(f, "pow{k}"),
            UniFn::Exp => write!(f, "exp"),
            UniFn::Sin => write!(f, "sin"),
            UniFn::Cos => write!(f, "cos"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MultiFn {
    Const(f64),
    Affine(f64, Vec<f64>),
    Prod,
    Ridge(UniFn, Vec<f64>),
}

impl MultiFn {
    fn ridge_arg<T>(w: &[f64], x: &[T]) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::iter::Sum<T>,
    {
        if w.is_empty() {
            x.iter().map(|&v| v * 1.0).sum()
        } else {
            x.iter().zip(w.iter().chain(std::iter::repeat(&0.0))).map(|(&v, &c)| v * c).sum()
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            MultiFn::Const(c) => *c,
            MultiFn::Affine(c0, c) => c0 + x.iter().zip(c).map(|(a, b)| a * b).sum::<f64>(),
            MultiFn::Prod => x.iter().product(),
            MultiFn::Ridge(u, w) => u.eval_real(Self::ridge_arg(w, x)),
        }
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        match self {
            MultiFn::Const(c) => Complex64::new(*c, 0.0),
            MultiFn::Affine(c0, c) => {
                x.iter().zip(c).map(|(a, b)| a * b).sum::<Complex64>() + c0
            }
            MultiFn::Prod => x.iter().product(),
            MultiFn::Ridge(u, w) => u.eval(Self::ridge_arg(w, x)),
        }
    }

    /// Exact polynomial form in `vars` variables, when the function is one.
    pub fn to_poly(&self, vars: usize) -> Option<RationalPoly> {
        let q = |v: f64| BigRational::from_float(v).expect("finite parameter");
        match self {
            MultiFn::Const(c) => Some(RationalPoly::constant(vars, q(*c))),
            MultiFn::Affine(c0, c) => {
                let mut p = RationalPoly::constant(vars, q(*c0));
                for (i, &ci) in c.iter().enumerate().take(vars) {
                    p = p + RationalPoly::var(vars, i).scale(&q(ci));
                }
                Some(p)
            }
            MultiFn::Prod => Some(
                (0..vars).fold(RationalPoly::one(vars), |p, i| p * RationalPoly::var(vars, i)),
            ),
            MultiFn::Ridge(UniFn::Pow(k), w) => {
                let coeffs: Vec<BigRational> = (0..vars)
                    .map(|i| {
                        if w.is_empty() {
                            BigRational::from_integer(BigInt::from(1))
                        } else {
                            q(w.get(i).copied().unwrap_or(0.0))
                        }
                    })
                    .collect();
                Some(RationalPoly::linear(&coeffs).pow(*k))
            }
            MultiFn::Ridge(..) => None,
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad number '{t}': {e}")))
        .collect()
}

impl FromStr for MultiFn {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        match head {
            "const" => {
                let v = parse_list(args)?;
                match v.as_slice() {
                    [c] => Ok(MultiFn::Const(*c)),
                    _ => Err(format!("const takes one value: '{s}'")),
                }
            }
            "affine" => {
                let v = parse_list(args)?;
                let (c0, rest) = v.split_first().ok_or("affine needs c0")?;
                Ok(MultiFn::Affine(*c0, rest.to_vec()))
            }
            "prod" => Ok(MultiFn::Prod),
            _ => Ok(MultiFn::Ridge(head.parse()?, parse_list(args)?)),
        }
    }
}

impl fmt::Display for MultiFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            MultiFn::Const(c) => write!(f, "const:{c}"),
            MultiFn::Affine(c0, c) => {
                write!(f, "affine:{c0}")?;
                if !c.is_empty() {
                    write!(f, ",{}", join(c))?;
                }
                Ok(())
            }
            MultiFn::Prod => write!(f, "prod"),
            MultiFn::Ridge(u, w) if w.is_empty() => write!(f, "{u}"),
            MultiFn::Ridge(u, w) => write!(f, "{u}:{}", join(w)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["const:1.5", "affine:1,0,2", "prod", "exp", "sin:0.5,-1", "pow3:1,2"] {
            let f: MultiFn = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("pow:1".parse::<MultiFn>().is_err());
        assert!("bogus".parse::<UniFn>().is_err());
    }

    #[test]
    fn polynomial_forms_agree_with_eval() {
        let x = [0.25, -1.5, 2.0];
        for s in ["const:2", "affine:1,0.5,-3", "prod", "pow3:1,0.5,2", "pow2"] {
            let f: MultiFn = s.parse().unwrap();
            let p = f.to_poly(3).unwrap();
            let q: Vec<BigRational> = x.iter().map(|&v| BigRational::from_float(v).unwrap()).collect();
            let exact = num_traits::ToPrimitive::to_f64(&p.eval_in(&q)).unwrap();
            assert!((exact - f.eval(&x)).abs() < 1e-12, "{s}");
        }
        assert!("sin".parse::<MultiFn>().unwrap().to_poly(2).is_none());
    }

    #[test]
    fn derivatives() {
        let t = Complex64::new(0.3, 0.2);
        assert!((UniFn::Sin.derivative(3, t) + t.cos()).norm() < 1e-15);
        assert!((UniFn::Pow(4).derivative(2, t) - t * t * 12.0).norm() < 1e-14);
        assert_eq!(UniFn::Pow(2).derivative(3, t), Complex64::zero());
    }
}
