//! Sparse multivariate polynomials with exact coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::Cyclotomic;

/// Exact coefficient ring usable in [`SparsePoly`].
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_integer(k: i64) -> Self;
    fn to_complex(&self) -> Complex64;
    fn domain() -> &'static str;
}

impl Coeff for BigRational {
    fn from_integer(k: i64) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn domain() -> &'static str {
        "rational"
    }
}

impl Coeff for Cyclotomic {
    fn from_integer(k: i64) -> Self {
        Cyclotomic::from_int(k)
    }
    fn to_complex(&self) -> Complex64 {
        Cyclotomic::to_complex(self)
    }
    fn domain() -> &'static str {
        "cyclotomic"
    }
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(vars: usize) -> Self {
        Monomial(vec![0; vars])
    }

    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `vars` variables; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePoly<C: Coeff> {
    vars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type RationalPoly = SparsePoly<BigRational>;
pub type CyclotomicPoly = SparsePoly<Cyclotomic>;

impl<C: Coeff> SparsePoly<C> {
    pub fn zero(vars: usize) -> Self {
        SparsePoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: C) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::one(vars), c);
        p
    }

    pub fn one(vars: usize) -> Self {
        Self::constant(vars, C::one())
    }

    pub fn var(vars: usize, i: usize) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Monomial::var(vars, i), C::one());
        p
    }

    /// `Σ_i coeffs[i] · x_i`
    pub fn linear(coeffs: &[C]) -> Self {
        let vars = coeffs.len();
        let mut p = Self::zero(vars);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(vars, i), c.clone());
        }
        p
    }

    pub fn from_terms(vars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), vars, "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    pub fn var_count(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self, degree: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == degree)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.vars);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// ∂/∂x_i
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] -= 1;
            out.add_term(dm, c.clone() * C::from_integer(e as i64));
        }
        out
    }

    /// Applies ∂^e = ∏ ∂_i^{e_i}.
    pub fn apply_partials(&self, e: &Monomial) -> Self {
        let mut out = Self::zero(self.vars);
        'terms: for (m, c) in &self.terms {
            let mut factor: i64 = 1;
            let mut dm = m.clone();
            for (i, &k) in e.0.iter().enumerate() {
                if dm.0[i] < k {
                    continue 'terms;
                }
                for j in 0..k {
                    factor *= (dm.0[i] - j) as i64;
                }
                dm.0[i] -= k;
            }
            out.add_term(dm, c.clone() * C::from_integer(factor));
        }
        out
    }

    /// Reads `self` as a constant-coefficient differential operator
    /// (x_i ↦ ∂_i) and applies it to `f`.
    pub fn apply_as_operator(&self, f: &Self) -> Self {
        assert_eq!(self.vars, f.vars);
        let mut out = Self::zero(self.vars);
        for (e, c) in &self.terms {
            out = out + f.apply_partials(e).scale(c);
        }
        out
    }

    pub fn eval<T>(&self, point: &[T]) -> C
    where
        T: Clone + Into<C>,
    {
        let pt: Vec<C> = point.iter().cloned().map(Into::into).collect();
        self.eval_in(&pt)
    }

    /// Exact evaluation at a point with coordinates in the coefficient ring.
    pub fn eval_in(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.vars);
        let max_exp: Vec<u32> = (0..self.vars)
            .map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<C>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &k)| {
                let mut v = Vec::with_capacity(k as usize + 1);
                v.push(C::one());
                for j in 0..k as usize {
                    let next = v[j].clone() * x.clone();
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t * powers[i][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(c.to_complex(), |acc, (&e, x)| acc * x.powu(e))
            })
            .sum()
    }

    /// Substitutes polynomial `subs[i]` for variable `i`.
    pub fn compose(&self, subs: &[SparsePoly<C>]) -> SparsePoly<C> {
        assert_eq!(subs.len(), self.vars);
        let target_vars = subs.first().map_or(0, |s| s.vars);
        let mut cache: Vec<Vec<SparsePoly<C>>> = subs
            .iter()
            .map(|s| vec![SparsePoly::one(s.vars)])
            .collect();
        let mut out = SparsePoly::zero(target_vars);
        for (m, c) in &self.terms {
            let mut t = SparsePoly::constant(target_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap() * &subs[i];
                    cache[i].push(next);
                }
                if e > 0 {
                    t = &t * &cache[i][e as usize];
                }
            }
            out = out + t;
        }
        out
    }

    /// Maps coefficients into another ring.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> SparsePoly<D> {
        let mut out = SparsePoly::zero(self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// `Σ_i x_i ∂P/∂x_i`
    pub fn euler_operator(&self) -> Self {
        let mut out = Self::zero(self.vars);
        for i in 0..self.vars {
            out = out + &Self::var(self.vars, i) * &self.derivative(i);
        }
        out
    }
}

impl SparsePoly<Cyclotomic> {
    /// Rational polynomial if every coefficient is rational.
    pub fn to_rational(&self) -> Option<RationalPoly> {
        let mut out = RationalPoly::zero(self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.as_rational()?);
        }
        Some(out)
    }
}

impl SparsePoly<BigRational> {
    pub fn to_cyclotomic(&self) -> CyclotomicPoly {
        self.map_coeffs(|c| Cyclotomic::from_rational(c.clone()))
    }
}

impl<C: Coeff> Add for SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn add(mut self, rhs: Self) -> Self {
        assert_eq!(self.vars, rhs.vars);
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<C: Coeff> Sub for SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn sub(mut self, rhs: Self) -> Self {
        assert_eq!(self.vars, rhs.vars);
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl<C: Coeff> Neg for SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn neg(self) -> Self {
        SparsePoly {
            vars: self.vars,
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl<'a, C: Coeff> Mul<&'a SparsePoly<C>> for &'a SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn mul(self, rhs: &SparsePoly<C>) -> SparsePoly<C> {
        assert_eq!(self.vars, rhs.vars);
        let mut out = SparsePoly::zero(self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coeff> Mul for SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

/// `{"num": "...", "den": "..."}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalJson {
    fn from(q: &BigRational) -> Self {
        RationalJson {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }
}

impl TryFrom<&RationalJson> for BigRational {
    type Error = String;
    fn try_from(j: &RationalJson) -> Result<Self, Self::Error> {
        let num: BigInt = j.num.parse().map_err(|_| format!("bad numerator {:?}", j.num))?;
        let den: BigInt = j.den.parse().map_err(|_| format!("bad denominator {:?}", j.den))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(num, den))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub num: String,
    pub den: String,
}

/// Polynomial interchange format, terms in descending graded-lex order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

impl RationalPoly {
    pub fn to_json(&self, names: &[String]) -> PolyJson {
        assert_eq!(names.len(), self.vars);
        PolyJson {
            vars: names.to_vec(),
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(m, c)| TermJson {
                    exps: m.0.clone(),
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self, String> {
        let vars = j.vars.len();
        let mut p = Self::zero(vars);
        for t in &j.terms {
            if t.exps.len() != vars {
                return Err(format!("term has {} exponents, expected {vars}", t.exps.len()));
            }
            let q = BigRational::try_from(&RationalJson {
                num: t.num.clone(),
                den: t.den.clone(),
            })?;
            p.add_term(Monomial(t.exps.clone()), q);
        }
        Ok(p)
    }

    /// Human-readable form, e.g. `X0^2 - X1^2`.
    pub fn pretty(&self, names: &[String]) -> String {
        use num_traits::Signed;
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let abs = c.abs();
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{e}", names[i])
                    }
                })
                .collect();
            if mono.is_empty() {
                s.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    s.push_str(&abs.to_string());
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
