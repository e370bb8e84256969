//! Exact arithmetic in cyclotomic fields Q(ζ_m).
//!
//! A value is a residue modulo the m-th cyclotomic polynomial, stored as its
//! coefficient vector in the power basis 1, ζ, …, ζ^{φ(m)-1}. Values of
//! different conductors are combined by lifting both to the lcm conductor.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

type IntPoly = Vec<i64>;

fn cyclotomic_cache() -> &'static RwLock<HashMap<usize, Arc<IntPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<IntPoly>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (low degree first) of the m-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(m: usize) -> Arc<IntPoly> {
    assert!(m >= 1, "conductor must be positive");
    if let Some(p) = cyclotomic_cache().read().unwrap().get(&m) {
        return Arc::clone(p);
    }
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut num: IntPoly = vec![0; m + 1];
    num[0] = -1;
    num[m] = 1;
    for d in (1..m).filter(|d| m % d == 0) {
        let div = cyclotomic_polynomial(d);
        num = exact_div_monic(&num, &div);
    }
    let out = Arc::new(num);
    cyclotomic_cache()
        .write()
        .unwrap()
        .insert(m, Arc::clone(&out));
    out
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> IntPoly {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dn];
        quot[k] = c;
        for (i, &d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

pub fn euler_phi(m: usize) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

/// An element of Q(ζ_m).
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    m: usize,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    /// Reduces `Σ c_k ζ_m^k` (arbitrary length) modulo Φ_m.
    pub fn from_power_coeffs(m: usize, mut c: Vec<BigRational>) -> Self {
        let phi = cyclotomic_polynomial(m);
        let deg = phi.len() - 1;
        if c.len() > deg {
            for top in (deg..c.len()).rev() {
                let lead = std::mem::replace(&mut c[top], BigRational::zero());
                if lead.is_zero() {
                    continue;
                }
                for (i, &p) in phi.iter().enumerate().take(deg) {
                    if p != 0 {
                        c[top - deg + i] -= &lead * BigRational::from_integer(BigInt::from(p));
                    }
                }
            }
        }
        c.resize(deg, BigRational::zero());
        Cyclotomic { m, coeffs: c }
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyclotomic {
            m: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(BigRational::from_integer(k.into()))
    }

    /// ζ_m^k for any integer k.
    pub fn root_of_unity(m: usize, k: i64) -> Self {
        let e = k.rem_euclid(m as i64) as usize;
        let mut c = vec![BigRational::zero(); e + 1];
        c[e] = BigRational::one();
        Self::from_power_coeffs(m, c)
    }

    pub fn conductor(&self) -> usize {
        self.m
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Re-expresses the value in Q(ζ_big) where `m | big`.
    pub fn lift(&self, big: usize) -> Self {
        assert!(big % self.m == 0, "cannot lift conductor {} to {big}", self.m);
        if big == self.m {
            return self.clone();
        }
        let step = big / self.m;
        let mut c = vec![BigRational::zero(); step * self.coeffs.len().max(1)];
        for (k, v) in self.coeffs.iter().enumerate() {
            if !v.is_zero() {
                c[k * step] = v.clone();
            }
        }
        Self::from_power_coeffs(big, c)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let l = num_integer::lcm(self.m, other.m);
        (self.lift(l), other.lift(l))
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let m = self.m;
        let mut c = vec![BigRational::zero(); m];
        for (k, v) in self.coeffs.iter().enumerate() {
            let e = (m - k % m) % m;
            c[e] += v;
        }
        Self::from_power_coeffs(m, c)
    }

    /// Rational value if every non-constant coefficient vanishes.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let w = std::f64::consts::TAU / self.m as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), w * k as f64))
            .sum()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Cyclotomic {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse via the norm: x^{-1} = (∏_{σ≠1} σ(x)) / N(x).
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let m = self.m;
        let mut others = Cyclotomic::one();
        for a in (2..m).filter(|&a| num_integer::gcd(a, m) == 1) {
            others = others * self.galois(a);
        }
        let norm = (self.clone() * others.clone()).as_rational()?;
        Some(others.scale(&norm.recip()))
    }

    /// Galois automorphism ζ ↦ ζ^a (a coprime to m).
    pub fn galois(&self, a: usize) -> Self {
        let m = self.m;
        let mut c = vec![BigRational::zero(); m];
        for (k, v) in self.coeffs.iter().enumerate() {
            c[(k * a) % m] += v;
        }
        Self::from_power_coeffs(m, c)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<'a> Add<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = self.common(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Self) -> Self {
        &self + &(-rhs)
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(mut self) -> Self {
        for c in &mut self.coeffs {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a Cyclotomic> for &'a Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = self.common(rhs);
        if a.is_zero() || b.is_zero() {
            return Cyclotomic::zero();
        }
        let mut c = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                c[i + j] += x * y;
            }
        }
        Cyclotomic::from_power_coeffs(a.m, c)
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::from_rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Cyclotomic::from_rational(BigRational::one())
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            match (k, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "z{}", self.m)?,
                (1, false) => write!(f, "{abs}*z{}", self.m)?,
                (_, true) => write!(f, "z{}^{k}", self.m)?,
                (_, false) => write!(f, "{abs}*z{}^{k}", self.m)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
