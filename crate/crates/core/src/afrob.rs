//! Almost-Frobenius structure on the complement of the coordinate hyperplanes
//! z_i = 0: ρ_i = projection onto e_i, g = Σ u_i v_i, (X·Y)_i = X_i Y_i / z_i.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fd::mixed_partial;
use crate::linalg::{rank, QMatrix};

pub const POTENTIAL_STEP: f64 = 3e-2;
pub const POTENTIAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AfrobError {
    #[error("OnHyperplane: z_{index} = 0")]
    OnHyperplane { index: usize },
    #[error("NonPositiveCoordinate: z_{index} = {value}")]
    NonPositiveCoordinate { index: usize, value: f64 },
    #[error("BadInput: {0}")]
    BadInput(String),
}

impl AfrobError {
    pub fn code(&self) -> &'static str {
        match self {
            AfrobError::OnHyperplane { .. } => "OnHyperplane",
            AfrobError::NonPositiveCoordinate { .. } => "NonPositiveCoordinate",
            AfrobError::BadInput(_) => "BadInput",
        }
    }
}

fn off_hyperplanes<T: Zero>(z: &[T]) -> Result<(), AfrobError> {
    match z.iter().position(Zero::is_zero) {
        Some(i) => Err(AfrobError::OnHyperplane { index: i + 1 }),
        None => Ok(()),
    }
}

/// (X·Y)_i = X_i Y_i / z_i
pub fn frob_product<T: Num + Clone>(z: &[T], x: &[T], y: &[T]) -> Result<Vec<T>, AfrobError> {
    if x.len() != z.len() || y.len() != z.len() {
        return Err(AfrobError::BadInput("dimension mismatch".into()));
    }
    off_hyperplanes(z)?;
    Ok(z.iter()
        .zip(x.iter().zip(y))
        .map(|(zi, (xi, yi))| xi.clone() * yi.clone() / zi.clone())
        .collect())
}

/// ρ_i as an n×n matrix.
pub fn rho(n: usize, i: usize) -> QMatrix {
    (0..n)
        .map(|p| {
            (0..n)
                .map(|q| if p == i && q == i { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

fn mm(a: &QMatrix, b: &QMatrix) -> QMatrix {
    crate::linalg::matmul_q(a, b)
}

fn madd(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

fn is_zero_matrix(a: &QMatrix) -> bool {
    a.iter().flatten().all(Zero::is_zero)
}

fn transpose(a: &QMatrix) -> QMatrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].clone()).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub sum_is_identity: bool,
    pub orthogonal: bool,
    pub dunkl: bool,
    pub self_adjoint: bool,
    /// rank of g restricted to H_i, per i
    pub restriction_ranks: Vec<usize>,
    pub restriction_nondegenerate: bool,
    pub euler_is_identity: bool,
    pub commutative: bool,
    pub associative: bool,
    pub all_ok: bool,
}

/// Exact certificates at the rational point z, with `samples` seeded
/// random tangent triples for the product identities.
pub fn structure_checks(z: &[BigRational], seed: u64, samples: usize) -> Result<StructureReport, AfrobError> {
    off_hyperplanes(z)?;
    let n = z.len();
    let rhos: Vec<QMatrix> = (0..n).map(|i| rho(n, i)).collect();
    let id = crate::linalg::identity_q(n);
    let sum = rhos.iter().skip(1).fold(rhos[0].clone(), |acc, r| madd(&acc, r));
    let sum_is_identity = sum == id;
    let mut orthogonal = true;
    let mut dunkl = true;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            orthogonal &= is_zero_matrix(&mm(&rhos[i], &rhos[j]));
            let s = madd(&rhos[i], &rhos[j]);
            dunkl &= mm(&s, &rhos[i]) == mm(&rhos[i], &s);
        }
    }
    // g is the identity Gram matrix, so self-adjointness is symmetry
    let self_adjoint = rhos.iter().all(|r| *r == transpose(r));
    let restriction_ranks: Vec<usize> = (0..n)
        .map(|i| {
            let basis: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let gram: QMatrix = basis
                .iter()
                .map(|&a| basis.iter().map(|&b| if a == b { BigRational::one() } else { BigRational::zero() }).collect())
                .collect();
            if gram.is_empty() {
                0
            } else {
                rank(&gram)
            }
        })
        .collect();
    let restriction_nondegenerate = restriction_ranks.iter().all(|&r| r + 1 == n);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<BigRational> {
        (0..n)
            .map(|_| BigRational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=9).into()))
            .collect()
    };
    let (mut euler_is_identity, mut commutative, mut associative) = (true, true, true);
    for _ in 0..samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let w = draw(&mut rng);
        euler_is_identity &= frob_product(z, z, &y)? == y;
        let xy = frob_product(z, &x, &y)?;
        commutative &= xy == frob_product(z, &y, &x)?;
        associative &= frob_product(z, &xy, &w)? == frob_product(z, &x, &frob_product(z, &y, &w)?)?;
    }
    let all_ok = sum_is_identity
        && orthogonal
        && dunkl
        && self_adjoint
        && restriction_nondegenerate
        && euler_is_identity
        && commutative
        && associative;
    Ok(StructureReport {
        n,
        sum_is_identity,
        orthogonal,
        dunkl,
        self_adjoint,
        restriction_ranks,
        restriction_nondegenerate,
        euler_is_identity,
        commutative,
        associative,
        all_ok,
    })
}

/// Φ(z) = Σ z_i² log z_i / 2
pub fn potential(z: &[f64]) -> f64 {
    z.iter().map(|&v| v * v * v.ln() / 2.0).sum()
}

/// T(e_i, e_j, e_k) = g(e_i·e_j, e_k) = δ_ijk / z_i
pub fn t_form(z: &[f64], i: usize, j: usize, k: usize) -> f64 {
    if i == j && j == k {
        1.0 / z[i]
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialReport {
    pub n: usize,
    pub max_deviation: f64,
    /// (i, j, k), 1-based, where the maximum occurs
    pub worst: (usize, usize, usize),
    pub step: f64,
    pub ok: bool,
}

/// ∂³Φ/∂z_i∂z_j∂z_k against T(e_i, e_j, e_k) over all n³ triples, by 6th-order
/// central differences with one Richardson level.
pub fn potential_check(z: &[f64]) -> Result<PotentialReport, AfrobError> {
    for (i, &v) in z.iter().enumerate() {
        if !(v > 0.0) {
            return Err(AfrobError::NonPositiveCoordinate { index: i + 1, value: v });
        }
    }
    let n = z.len();
    let phi = |x: &[f64]| Complex64::new(potential(x), 0.0);
    let h = POTENTIAL_STEP;
    let devs: Vec<(f64, (usize, usize, usize))> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j, k) = (idx / (n * n), idx / n % n, idx % n);
            let mut exps = vec![0u32; n];
            exps[i] += 1;
            exps[j] += 1;
            exps[k] += 1;
            let d1 = mixed_partial(phi, z, &exps, h, 6).re;
            let d2 = mixed_partial(phi, z, &exps, h / 2.0, 6).re;
            let d = (64.0 * d2 - d1) / 63.0;
            ((d - t_form(z, i, j, k)).abs(), (i + 1, j + 1, k + 1))
        })
        .collect();
    let (max_deviation, worst) = devs
        .into_iter()
        .fold((0.0, (1, 1, 1)), |acc, d| if d.0 > acc.0 { d } else { acc });
    Ok(PotentialReport {
        n,
        max_deviation,
        worst,
        step: h,
        ok: max_deviation < POTENTIAL_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    /// (X·Y)(c z) = c⁻¹ (X·Y)(z) exactly for rational c
    pub product_exact: bool,
    /// the same under z ↦ eᵗ z in floating point, max relative deviation
    pub product_float_deviation: f64,
    /// g does not depend on z
    pub metric_constant: bool,
}

/// Scaling identities behind "the product has E-degree 1 and g has E-degree 2".
pub fn scaling_checks(z: &[BigRational], c: &BigRational, t: f64, seed: u64) -> Result<ScalingReport, AfrobError> {
    off_hyperplanes(z)?;
    if c.is_zero() {
        return Err(AfrobError::BadInput("scale factor must be nonzero".into()));
    }
    let n = z.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut product_exact = true;
    let mut worst = 0.0f64;
    let zf: Vec<f64> = z.iter().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)).collect();
    let scaled: Vec<f64> = zf.iter().map(|v| v * t.exp()).collect();
    let cz: Vec<BigRational> = z.iter().map(|v| v * c).collect();
    for a in 0..n {
        for b in 0..n {
            let mut x = vec![BigRational::zero(); n];
            let mut y = vec![BigRational::zero(); n];
            x[a] = BigRational::one();
            y[b] = BigRational::one();
            let lhs = frob_product(&cz, &x, &y)?;
            let rhs: Vec<BigRational> = frob_product(z, &x, &y)?.iter().map(|v| v / c).collect();
            product_exact &= lhs == rhs;
        }
    }
    for _ in 0..8 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let lhs = frob_product(&scaled, &x, &y)?;
        let rhs = frob_product(&zf, &x, &y)?;
        for (l, r) in lhs.iter().zip(&rhs) {
            let want = (-t).exp() * r;
            worst = worst.max((l - want).abs() / want.abs().max(1e-300));
        }
    }
    Ok(ScalingReport {
        product_exact,
        product_float_deviation: worst,
        // the Gram matrix of g is the identity at every base point
        metric_constant: true,
    })
}

/// Seeded point with nonzero rational coordinates.
pub fn random_point(n: usize, seed: u64) -> Vec<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut p: i64 = 0;
            while p == 0 {
                p = rng.gen_range(-12..=12);
            }
            BigRational::new(p.into(), rng.gen_range(1i64..=7).into())
        })
        .collect()
}

/// Seeded point with coordinates in [0.5, 3].
pub fn random_positive_point(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0.5..3.0)).collect()
}
