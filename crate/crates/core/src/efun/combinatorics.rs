use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{check_range, int, EfunError};

pub const COMBINATORICS_MAX_N: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffKind {
    StirlingS,
    HilbertA,
    CCoeff,
    Sigma,
}

/// Exact integer table. Indexing by kind:
/// `StirlingS`: values[k-1] = s_{k,n}, k = 1..n-1;
/// `HilbertA`, `CCoeff`: values[j-1], j = 1..n;
/// `Sigma`: values[h] = σ_{h,n}, h = 0..n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffTable {
    pub kind: CoeffKind,
    pub n: usize,
    #[serde(serialize_with = "ser_ints")]
    pub values: Vec<BigInt>,
}

pub(crate) fn ser_ints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// Coefficients of x(x−1)…(x−n+1) in descending powers (length n+1).
fn falling_poly(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::one()];
    for i in 0..n {
        // multiply by (x − i)
        let mut next = vec![BigInt::zero(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c * int(i as i64);
        }
        p = next;
    }
    p
}

/// s_{k,n} with x^{‾n} = Σ_k (−1)^k s_{k,n} x^{n−k}.
pub fn falling_factorial_coeffs(n: usize) -> Result<CoeffTable, EfunError> {
    check_range("n", n, 1, COMBINATORICS_MAX_N)?;
    let p = falling_poly(n);
    Ok(CoeffTable {
        kind: CoeffKind::StirlingS,
        n,
        values: (1..n).map(|k| p[k].abs()).collect(),
    })
}

/// s_{k,m} for 0 ≤ k ≤ m (s_{0,m} = 1, s_{m,m} = 0 for m ≥ 1).
pub(crate) fn stirling_s(k: usize, m: usize) -> BigInt {
    if k > m {
        return BigInt::zero();
    }
    falling_poly(m)[k].abs()
}

/// 𝒜_{n,j} = Δʲxⁿ|₀ = Σ_m (−1)^m C(j,m)(j−m)ⁿ.
pub fn hilbert_a_by_difference(n: usize) -> Vec<BigInt> {
    (1..=n)
        .map(|j| {
            (0..=j).fold(BigInt::zero(), |acc, m| {
                let t = binomial(int(j as i64), int(m as i64)) * num_traits::pow(int((j - m) as i64), n);
                if m % 2 == 0 {
                    acc + t
                } else {
                    acc - t
                }
            })
        })
        .collect()
}

/// 𝒜_{n+1,j} = j(𝒜_{n,j−1} + 𝒜_{n,j}), 𝒜_{1,1} = 1.
pub fn hilbert_a_by_recurrence(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for _ in 1..n {
        let len = row.len() + 1;
        row = (1..=len)
            .map(|j| {
                let prev = if j >= 2 { row[j - 2].clone() } else { BigInt::zero() };
                let same = row.get(j - 1).cloned().unwrap_or_default();
                int(j as i64) * (prev + same)
            })
            .collect();
    }
    row
}

/// (𝒜_{n,·}, C_{n,·}) with C_{n,j} = 𝒜_{n,j}/j!; both computations of 𝒜 must agree.
pub fn hilbert_c_coeffs(n: usize) -> Result<(CoeffTable, CoeffTable), EfunError> {
    check_range("n", n, 1, COMBINATORICS_MAX_N)?;
    let a = hilbert_a_by_difference(n);
    let b = hilbert_a_by_recurrence(n);
    assert_eq!(a, b, "difference and recurrence disagree for n = {n}");
    let mut fact = BigInt::one();
    let c = a
        .iter()
        .enumerate()
        .map(|(i, v)| {
            fact *= int(i as i64 + 1);
            v / &fact
        })
        .collect();
    Ok((
        CoeffTable {
            kind: CoeffKind::HilbertA,
            n,
            values: a,
        },
        CoeffTable {
            kind: CoeffKind::CCoeff,
            n,
            values: c,
        },
    ))
}

/// C_{m,j} for all m, j ≥ 0 (C_{0,0} = 1, C_{m,0} = 0 for m ≥ 1).
pub(crate) fn c_coeff(m: usize, j: usize) -> BigInt {
    if m == 0 {
        return if j == 0 { BigInt::one() } else { BigInt::zero() };
    }
    if j == 0 || j > m {
        return BigInt::zero();
    }
    let mut row = vec![BigInt::one()]; // C_{1,1}
    for _ in 1..m {
        let len = row.len() + 1;
        row = (1..=len)
            .map(|k| {
                let prev = if k >= 2 { row[k - 2].clone() } else { BigInt::zero() };
                let same = row.get(k - 1).cloned().unwrap_or_default();
                int(k as i64) * same + prev
            })
            .collect();
    }
    row[j - 1].clone()
}

/// Σ_{p=q+i}^{n} (−1)^{p−i−q} C_{n,p} C(p,i) s_{p−i−q,p−i} = C(n,q) C_{n−q,i}
/// for all q, i ≥ 0 with q + i ≤ n; returns the first failing (q, i).
pub fn convolution_identity_check(n: usize) -> Option<(usize, usize)> {
    let crow: Vec<BigInt> = (0..=n).map(|p| c_coeff(n, p)).collect();
    let s_rows: Vec<Vec<BigInt>> = (0..=n).map(|m| (0..=m).map(|k| stirling_s(k, m)).collect()).collect();
    for q in 0..=n {
        for i in 0..=n - q {
            let mut lhs = BigInt::zero();
            for p in q + i..=n {
                let t = &crow[p] * binomial(int(p as i64), int(i as i64)) * &s_rows[p - i][p - i - q];
                if (p - i - q) % 2 == 0 {
                    lhs += t;
                } else {
                    lhs -= t;
                }
            }
            let rhs = binomial(int(n as i64), int(q as i64)) * c_coeff(n - q, i);
            if lhs != rhs {
                return Some((q, i));
            }
        }
    }
    None
}

/// σ_{h,n}: ∏_{i=0}^{n−1}(z − ν(1 − i n)) = Σ_h σ_{h,n} ν^h z^{n−h}.
pub fn sigma_coeffs(n: usize) -> Result<CoeffTable, EfunError> {
    check_range("n", n, 1, COMBINATORICS_MAX_N)?;
    // elementary symmetric functions of c_i = i n − 1
    let mut e = vec![BigInt::one()];
    for i in 0..n {
        let c = int((i * n) as i64 - 1);
        let mut next = e.clone();
        next.push(BigInt::zero());
        for k in (1..next.len()).rev() {
            next[k] = &e.get(k).cloned().unwrap_or_default() + &e[k - 1] * &c;
        }
        e = next;
    }
    Ok(CoeffTable {
        kind: CoeffKind::Sigma,
        n,
        values: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, RationalPoly};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&k| int(k)).collect()
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(falling_factorial_coeffs(3).unwrap().values, ints(&[3, 2]));
        assert!(falling_factorial_coeffs(1).unwrap().values.is_empty());
        assert_eq!(falling_factorial_coeffs(4).unwrap().values, ints(&[6, 11, 6]));
        assert_eq!(falling_factorial_coeffs(31).unwrap_err().code(), "RangeError");
        assert_eq!(falling_factorial_coeffs(0).unwrap_err().code(), "RangeError");
    }

    #[test]
    fn stirling_against_brute_expansion() {
        for n in 1..=12usize {
            let x = RationalPoly::var(1, 0);
            let p = (0..n).fold(RationalPoly::one(1), |acc, i| {
                acc * (x.clone() - RationalPoly::constant(1, rat(i as i64, 1)))
            });
            let s = falling_factorial_coeffs(n).unwrap().values;
            for k in 1..n {
                let m = crate::poly::Monomial(vec![(n - k) as u32]);
                let sign = if k % 2 == 0 { 1 } else { -1 };
                assert_eq!(p.coeff(&m), rat(sign, 1) * num_rational::BigRational::from_integer(s[k - 1].clone()));
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        let (a, c) = hilbert_c_coeffs(4).unwrap();
        assert_eq!(c.values[1], int(7));
        let (a3, _) = hilbert_c_coeffs(3).unwrap();
        assert_eq!(a3.values[1], int(6));
        assert_eq!(a.values.len(), 4);
        for n in 1..=30 {
            let (_, c) = hilbert_c_coeffs(n).unwrap();
            assert_eq!(c.values[0], int(1));
            assert_eq!(c.values[n - 1], int(1));
        }
    }

    #[test]
    fn dual_computation_agrees() {
        for n in 1..=30 {
            assert_eq!(hilbert_a_by_difference(n), hilbert_a_by_recurrence(n), "n={n}");
        }
    }

    #[test]
    fn reconstruction_of_powers() {
        // xⁿ = Σ_j C_{n,j} x^{‾j}
        for n in 1..=30usize {
            let (_, c) = hilbert_c_coeffs(n).unwrap();
            let mut total = vec![BigInt::zero(); n + 1]; // ascending powers
            for j in 1..=n {
                let fp = falling_poly(j); // descending, degree j
                for (k, v) in fp.iter().enumerate() {
                    total[j - k] += &c.values[j - 1] * v;
                }
            }
            let mut want = vec![BigInt::zero(); n + 1];
            want[n] = BigInt::one();
            assert_eq!(total, want, "n={n}");
        }
    }

    #[test]
    fn c_coeff_matches_table() {
        for n in 1..=10 {
            let (_, c) = hilbert_c_coeffs(n).unwrap();
            for j in 1..=n {
                assert_eq!(c_coeff(n, j), c.values[j - 1]);
            }
        }
    }

    #[test]
    fn convolution_identity_holds() {
        for n in 0..=12 {
            assert_eq!(convolution_identity_check(n), None, "n={n}");
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_coeffs(3).unwrap().values, ints(&[1, 6, 3, -10]));
        assert_eq!(sigma_coeffs(1).unwrap().values, ints(&[1, -1]));
        assert_eq!(sigma_coeffs(4).unwrap().values, ints(&[1, 20, 110, 100, -231]));
        assert_eq!(sigma_coeffs(5).unwrap().values, ints(&[1, 45, 685, 3915, 4930, -9576]));
    }
}
