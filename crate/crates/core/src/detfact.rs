//! The group determinant Θ(G) = det(X_{g h^{-1}}) and its factorizations.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chartable::{abelian_characters, CharacterTable};
use crate::cyclotomic::Cyclotomic;
use crate::group::{FiniteGroup, GroupError};
use crate::linalg::{self, CMatrix};
use crate::poly::{CyclotomicPoly, Monomial, RationalPoly};

/// Largest order for which Θ(G) is expanded symbolically.
pub const SYMBOLIC_MAX_ORDER: usize = 8;
/// Column-selection tolerance for projector bases.
pub const RANK_TOL: f64 = 1e-10;
/// Off-block mass tolerance (relative to ‖M‖).
pub const LEAKAGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetError {
    #[error("OrderTooLarge: order {order} exceeds {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("NotAbelian: {a}*{b} != {b}*{a}")]
    NotAbelian { a: usize, b: usize },
    #[error("FactorizationMismatch: product of linear forms differs from the expansion at {monomial:?}")]
    FactorizationMismatch { monomial: Vec<u32> },
    #[error("ProjectorRankMismatch: character {character} has projector rank {rank}, expected {expected}")]
    ProjectorRankMismatch {
        character: usize,
        rank: usize,
        expected: usize,
    },
    #[error("BlockLeakage: character {character} block leaks {leakage:e}")]
    BlockLeakage { character: usize, leakage: f64 },
    #[error("BadInput: {0}")]
    BadInput(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl DetError {
    pub fn code(&self) -> &'static str {
        match self {
            DetError::OrderTooLarge { .. } => "OrderTooLarge",
            DetError::NotAbelian { .. } => "NotAbelian",
            DetError::FactorizationMismatch { .. } => "FactorizationMismatch",
            DetError::ProjectorRankMismatch { .. } => "ProjectorRankMismatch",
            DetError::BlockLeakage { .. } => "BlockLeakage",
            DetError::BadInput(_) => "BadInput",
            DetError::Group(e) => e.code(),
        }
    }
}

/// `M[g][h] = a_{g h^{-1}}`
pub fn frobenius_matrix<T: Clone>(group: &FiniteGroup, coeffs: &[T]) -> Vec<Vec<T>> {
    let n = group.order();
    assert_eq!(coeffs.len(), n, "one coefficient per group element");
    (0..n)
        .map(|g| {
            (0..n)
                .map(|h| coeffs[group.mul(g, group.inv(h))].clone())
                .collect()
        })
        .collect()
}

/// Variable names X0, X1, ... in element order.
pub fn variable_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("X{i}")).collect()
}

fn check_symbolic_order(group: &FiniteGroup) -> Result<(), DetError> {
    if group.order() > SYMBOLIC_MAX_ORDER {
        return Err(DetError::OrderTooLarge {
            order: group.order(),
            max: SYMBOLIC_MAX_ORDER,
        });
    }
    Ok(())
}

/// Packs an exponent vector (entries ≤ 8, length ≤ 8) into 4-bit lanes.
#[inline]
fn pack_var(var: usize) -> u64 {
    1u64 << (4 * var)
}

fn unpack(key: u64, n: usize) -> Vec<u32> {
    (0..n).map(|i| ((key >> (4 * i)) & 0xf) as u32).collect()
}

/// Heap's algorithm over permutations of `rest`, calling `visit(perm, sign)`.
pub fn heap_permutations(rest: &mut [usize], mut visit: impl FnMut(&[usize], i64)) {
    let k = rest.len();
    let mut c = vec![0usize; k];
    let mut sign = 1i64;
    visit(rest, sign);
    let mut i = 1;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                rest.swap(0, i);
            } else {
                rest.swap(c[i], i);
            }
            sign = -sign;
            visit(rest, sign);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Leibniz expansion of Θ(G) with exact integer coefficients.
pub fn expand_group_det(group: &FiniteGroup) -> Result<RationalPoly, DetError> {
    check_symbolic_order(group)?;
    let n = group.order();
    // entry[g][h] = variable index of X_{g h^{-1}}
    let entry = frobenius_matrix(group, &(0..n).collect::<Vec<_>>());
    // Fix σ(0) = j and enumerate the rest.
    let partials: Vec<HashMap<u64, i64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc: HashMap<u64, i64> = HashMap::new();
            let mut cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
            // (j, 0, .., j-1, j+1, ..) is a (j+1)-cycle
            let base_sign = if j % 2 == 0 { 1 } else { -1 };
            heap_permutations(&mut cols, |perm, s| {
                let mut key = pack_var(entry[0][j]);
                for (k, &col) in perm.iter().enumerate() {
                    key += pack_var(entry[k + 1][col]);
                }
                *acc.entry(key).or_insert(0) += base_sign * s;
            });
            acc
        })
        .collect();
    let mut total: HashMap<u64, i64> = HashMap::new();
    for part in partials {
        for (k, v) in part {
            *total.entry(k).or_insert(0) += v;
        }
    }
    let mut poly = RationalPoly::zero(n);
    for (key, v) in total {
        if v != 0 {
            poly.add_term(
                Monomial(unpack(key, n)),
                BigRational::from_integer(BigInt::from(v)),
            );
        }
    }
    Ok(poly)
}

/// Linear factor Σ_g β_g X_g.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    pub coeffs: Vec<Cyclotomic>,
}

impl LinearForm {
    pub fn to_poly(&self) -> CyclotomicPoly {
        CyclotomicPoly::linear(&self.coeffs)
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Complex64 {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(c, v)| c.to_complex() * v)
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct DedekindFactorization {
    pub forms: Vec<LinearForm>,
    pub expansion: RationalPoly,
    pub verified: bool,
}

/// Θ(G) = ∏_χ Σ_g χ(g) X_g for abelian G, checked exactly against the
/// Leibniz expansion.
pub fn dedekind_factorization(group: &FiniteGroup) -> Result<DedekindFactorization, DetError> {
    if let Some((a, b)) = group.commutator_witness() {
        return Err(DetError::NotAbelian { a, b });
    }
    check_symbolic_order(group)?;
    let table = abelian_characters(group)?;
    let n = group.order();
    let forms: Vec<LinearForm> = (0..n)
        .map(|i| LinearForm {
            coeffs: (0..n)
                .map(|g| table.exact_value(i, g).expect("exact table").clone())
                .collect(),
        })
        .collect();
    let product = forms
        .iter()
        .fold(CyclotomicPoly::one(n), |acc, f| &acc * &f.to_poly());
    let expansion = expand_group_det(group)?;
    let Some(rational) = product.to_rational() else {
        let bad = product
            .terms()
            .find(|(_, c)| c.as_rational().is_none())
            .map(|(m, _)| m.0.clone())
            .unwrap_or_default();
        return Err(DetError::FactorizationMismatch { monomial: bad });
    };
    if rational != expansion {
        let diff = rational - expansion.clone();
        let monomial = diff.terms().next().map(|(m, _)| m.0.clone()).unwrap_or_default();
        return Err(DetError::FactorizationMismatch { monomial });
    }
    Ok(DedekindFactorization {
        forms,
        expansion,
        verified: true,
    })
}

/// ∏_{ω^n = 1} Σ_k ω^k c_k
pub fn circulant_eval(coeffs: &[Complex64]) -> Complex64 {
    let n = coeffs.len();
    (0..n)
        .map(|j| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    c * Complex64::from_polar(
                        1.0,
                        std::f64::consts::TAU * ((j * k) % n) as f64 / n as f64,
                    )
                })
                .sum::<Complex64>()
        })
        .product()
}

/// One isotypic component of the regular representation.
#[derive(Debug, Clone, Serialize)]
pub struct IsotypicBlock {
    pub character: usize,
    pub degree: usize,
    pub size: usize,
    #[serde(serialize_with = "ser_complex")]
    pub det: Complex64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("complex", 2)?;
    st.serialize_field("re", &z.re)?;
    st.serialize_field("im", &z.im)?;
    st.end()
}

/// Left regular representation: L(w) e_h = e_{w h}.
fn left_regular(group: &FiniteGroup, w: usize) -> CMatrix {
    let n = group.order();
    let mut m = vec![vec![Complex64::zero(); n]; n];
    for h in 0..n {
        m[group.mul(w, h)][h] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Restricts M(a) to each isotypic component im P_i with
/// P_i = (f_i/n) Σ_g conj(χ_i(g)) L(g); returns the block determinants
/// (each equal to Φ_i(a)^{f_i}).
pub fn isotypic_block_dets(
    group: &FiniteGroup,
    table: &CharacterTable,
    coeffs: &[Complex64],
) -> Result<Vec<IsotypicBlock>, DetError> {
    let n = group.order();
    if coeffs.len() != n {
        return Err(DetError::BadInput(format!(
            "{} coefficients for a group of order {n}",
            coeffs.len()
        )));
    }
    let m = frobenius_matrix(group, coeffs);
    let m_norm = m
        .iter()
        .flat_map(|r| r.iter().map(|v| v.norm_sqr()))
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let regular: Vec<CMatrix> = (0..n).map(|g| left_regular(group, g)).collect();
    let mut blocks = Vec::with_capacity(table.count());
    for (i, &f) in table.degrees.iter().enumerate() {
        let mut p = vec![vec![Complex64::zero(); n]; n];
        for (g, lg) in regular.iter().enumerate() {
            let w = table.value(i, g).conj() * (f as f64 / n as f64);
            for r in 0..n {
                for c in 0..n {
                    p[r][c] += w * lg[r][c];
                }
            }
        }
        let basis = linalg::column_basis(&p, RANK_TOL);
        if basis.len() != f * f {
            return Err(DetError::ProjectorRankMismatch {
                character: i,
                rank: basis.len(),
                expected: f * f,
            });
        }
        let k = basis.len();
        // M Q
        let mq: Vec<Vec<Complex64>> = basis
            .iter()
            .map(|q| (0..n).map(|r| (0..n).map(|c| m[r][c] * q[c]).sum()).collect())
            .collect();
        // B = Q^H M Q
        let block: CMatrix = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| {
                        basis[a]
                            .iter()
                            .zip(&mq[b])
                            .map(|(x, y)| x.conj() * y)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        // ‖M Q − Q B‖ measures mass leaving the component.
        let mut leak = 0.0;
        for b in 0..k {
            for r in 0..n {
                let qb: Complex64 = (0..k).map(|a| basis[a][r] * block[a][b]).sum();
                leak += (mq[b][r] - qb).norm_sqr();
            }
        }
        let leak = leak.sqrt() / m_norm;
        if leak > LEAKAGE_TOL {
            return Err(DetError::BlockLeakage {
                character: i,
                leakage: leak,
            });
        }
        blocks.push(IsotypicBlock {
            character: i,
            degree: f,
            size: k,
            det: linalg::det_c(&block),
        });
    }
    Ok(blocks)
}

/// Dedekind's S_3 factors (Φ1, Φ2, Φ3) in the enumeration
/// (1), (123), (132), (23), (13), (12).
pub fn s3_phi_eval<T: Num + Clone>(x: &[T; 6]) -> (T, T, T) {
    let [x1, x2, x3, x4, x5, x6] = x.clone();
    let phi1 = x1.clone() + x2.clone() + x3.clone() + x4.clone() + x5.clone() + x6.clone();
    let phi2 = x1.clone() + x2.clone() + x3.clone() - x4.clone() - x5.clone() - x6.clone();
    let sq = |a: &T| a.clone() * a.clone();
    let phi3 = sq(&x1) + sq(&x2) + sq(&x3) - sq(&x4) - sq(&x5) - sq(&x6)
        - x1.clone() * x2.clone()
        - x1.clone() * x3.clone()
        - x2.clone() * x3.clone()
        + x4.clone() * x5.clone()
        + x4.clone() * x6.clone()
        + x5 * x6;
    (phi1, phi2, phi3)
}

/// Σ_g X_g ∂Θ/∂X_g − n·Θ, which vanishes for a homogeneous Θ of degree n.
pub fn euler_defect(theta: &RationalPoly, n: usize) -> RationalPoly {
    theta.euler_operator()
        - theta.scale(&BigRational::from_integer(BigInt::from(n as i64)))
}
