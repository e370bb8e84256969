//! The group 𝕊_G of invertible Frobenius matrices and its Lie algebra 𝔰_G.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chartable::character_table;
use crate::detfact::{expand_group_det, DetError, SYMBOLIC_MAX_ORDER};
use crate::group::{conjugacy_classes, FiniteGroup};
use crate::linalg::{null_space, rank, QMatrix};
use crate::poly::RationalPoly;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrobError {
    #[error("SingularFrobenius: det M(a) = 0")]
    SingularFrobenius,
    #[error("OrderTooLarge: order {order} exceeds {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("MissingCharacterTable: {0}")]
    MissingCharacterTable(String),
    #[error("BadInput: {0}")]
    BadInput(String),
}

impl FrobError {
    pub fn code(&self) -> &'static str {
        match self {
            FrobError::SingularFrobenius => "SingularFrobenius",
            FrobError::OrderTooLarge { .. } => "OrderTooLarge",
            FrobError::MissingCharacterTable(_) => "MissingCharacterTable",
            FrobError::BadInput(_) => "BadInput",
        }
    }
}

impl From<DetError> for FrobError {
    fn from(e: DetError) -> Self {
        match e {
            DetError::OrderTooLarge { order, max } => FrobError::OrderTooLarge { order, max },
            other => FrobError::BadInput(other.to_string()),
        }
    }
}

/// c_t = Σ_{uv = t} a_u b_v
pub fn convolve<T>(group: &FiniteGroup, a: &[T], b: &[T]) -> Vec<T>
where
    T: Clone + Zero + Add<Output = T>,
    for<'x> &'x T: Mul<&'x T, Output = T>,
{
    let n = group.order();
    assert!(a.len() == n && b.len() == n, "one coefficient per group element");
    let mut c = vec![T::zero(); n];
    for u in 0..n {
        if a[u].is_zero() {
            continue;
        }
        for v in 0..n {
            let t = group.mul(u, v);
            c[t] = c[t].clone() + &a[u] * &b[v];
        }
    }
    c
}

pub fn delta_e<T: Zero + One + Clone>(n: usize) -> Vec<T> {
    let mut d = vec![T::zero(); n];
    d[0] = T::one();
    d
}

/// Θ(G) together with its gradient, for repeated inversions.
#[derive(Debug, Clone)]
pub struct ThetaGradient {
    group: FiniteGroup,
    pub theta: RationalPoly,
    pub grad: Vec<RationalPoly>,
}

impl ThetaGradient {
    pub fn new(group: &FiniteGroup) -> Result<Self, FrobError> {
        if group.order() > SYMBOLIC_MAX_ORDER {
            return Err(FrobError::OrderTooLarge {
                order: group.order(),
                max: SYMBOLIC_MAX_ORDER,
            });
        }
        let theta = expand_group_det(group)?;
        let grad = (0..group.order()).map(|i| theta.derivative(i)).collect();
        Ok(ThetaGradient {
            group: group.clone(),
            theta,
            grad,
        })
    }

    fn check_len(&self, len: usize) -> Result<(), FrobError> {
        if len != self.group.order() {
            return Err(FrobError::BadInput(format!(
                "{len} coefficients for a group of order {}",
                self.group.order()
            )));
        }
        Ok(())
    }

    /// U_w = (1/(nD)) ∂D/∂X_{w⁻¹}, exactly.
    pub fn inverse(&self, a: &[BigRational]) -> Result<Vec<BigRational>, FrobError> {
        self.check_len(a.len())?;
        let d = self.theta.eval_in(a);
        if d.is_zero() {
            return Err(FrobError::SingularFrobenius);
        }
        let n = self.group.order();
        let nd = d * BigRational::from_integer(n.into());
        Ok((0..n)
            .map(|w| self.grad[self.group.inv(w)].eval_in(a) / &nd)
            .collect())
    }

    /// Floating counterpart; singular when |D| ≤ 1e−300.
    pub fn inverse_f64(&self, a: &[f64]) -> Result<Vec<f64>, FrobError> {
        self.check_len(a.len())?;
        let pt: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let d = self.theta.eval_complex(&pt).re;
        if d.abs() <= 1e-300 {
            return Err(FrobError::SingularFrobenius);
        }
        let n = self.group.order();
        Ok((0..n)
            .map(|w| self.grad[self.group.inv(w)].eval_complex(&pt).re / (n as f64 * d))
            .collect())
    }
}

pub fn frobenius_inverse(group: &FiniteGroup, a: &[BigRational]) -> Result<Vec<BigRational>, FrobError> {
    ThetaGradient::new(group)?.inverse(a)
}

/// (A_k)_{pq} = 1 iff S_q = S_p S_k; A_k A_l = A_{S_k S_l}. Index 0 is A₁ = I.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LieGenerators {
    pub n: usize,
    pub matrices: Vec<Vec<Vec<i64>>>,
}

pub fn lie_generators(group: &FiniteGroup) -> LieGenerators {
    let n = group.order();
    let matrices = (0..n)
        .map(|k| {
            (0..n)
                .map(|p| (0..n).map(|q| i64::from(group.mul(p, k) == q)).collect())
                .collect()
        })
        .collect();
    LieGenerators { n, matrices }
}

type IMat = Vec<Vec<i64>>;

fn imul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn isub(a: &IMat, b: &IMat) -> IMat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketReport {
    /// [X_k, X_l] = X_{lk} − X_{kl} for the linear vector fields X_k = Σ (A_k x)_i ∂_i
    pub holds: bool,
    /// A_k A_l − A_l A_k = A_{kl} − A_{lk}
    pub matrix_commutator_holds: bool,
    pub pairs_checked: usize,
    /// First failing (k, l), 1-based
    pub witness: Option<(usize, usize)>,
    pub all_zero: bool,
}

/// Exhaustive check over all (k, l).
pub fn bracket_identity_check(group: &FiniteGroup) -> BracketReport {
    let gens = lie_generators(group);
    let a = &gens.matrices;
    let n = gens.n;
    let results: Vec<(usize, usize, bool, bool, bool)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (k, l) = (idx / n, idx % n);
            let kl = &a[group.mul(k, l)];
            let lk = &a[group.mul(l, k)];
            let akl = imul(&a[k], &a[l]);
            let alk = imul(&a[l], &a[k]);
            // linear vector fields: [X_A, X_B] = X_{BA − AB}
            let field = isub(&alk, &akl);
            let ok_field = field == isub(lk, kl);
            let ok_matrix = isub(&akl, &alk) == isub(kl, lk);
            let zero = field.iter().flatten().all(|&v| v == 0);
            (k, l, ok_field, ok_matrix, zero)
        })
        .collect();
    let witness = results
        .iter()
        .find(|r| !r.2)
        .map(|r| (r.0 + 1, r.1 + 1));
    BracketReport {
        holds: witness.is_none(),
        matrix_commutator_holds: results.iter().all(|r| r.3),
        pairs_checked: results.len(),
        witness,
        all_zero: results.iter().all(|r| r.4),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LieStructure {
    pub n: usize,
    /// dim of the center 𝔥
    pub r: usize,
    pub derived_dim: usize,
    /// coordinates in the A_s basis, as "p/q" strings
    pub center_basis: Vec<Vec<String>>,
    pub derived_basis: Vec<Vec<String>>,
    pub class_count: usize,
    /// rank(center ∪ derived) = n
    pub direct_sum: bool,
    /// rank of span{[A_k, A_l]} agrees with rank of span{A_q − A_{t⁻¹qt}}
    pub bracket_span_agrees: bool,
}

fn qstr(v: &[BigRational]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn unit_diff(n: usize, i: usize, j: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); n];
    v[i] += BigRational::one();
    v[j] -= BigRational::one();
    v
}

/// Center and derived algebra of 𝔰_G, by exact elimination.
pub fn center_derived_dims(group: &FiniteGroup) -> LieStructure {
    let n = group.order();
    let mut constraints: QMatrix = Vec::new();
    let mut spanning: QMatrix = Vec::new();
    for q in 0..n {
        for t in 0..n {
            let c = group.conjugate(q, t);
            if c != q {
                constraints.push(unit_diff(n, q, c));
                spanning.push(unit_diff(n, q, c));
            }
        }
    }
    let center = if constraints.is_empty() {
        (0..n).map(|i| unit_diff_one(n, i)).collect()
    } else {
        null_space(&constraints, n)
    };
    let brackets: QMatrix = (0..n)
        .flat_map(|k| (0..n).map(move |l| (k, l)))
        .filter_map(|(k, l)| {
            let (kl, lk) = (group.mul(k, l), group.mul(l, k));
            (kl != lk).then(|| unit_diff(n, kl, lk))
        })
        .collect();
    let mut derived = spanning.clone();
    let derived_dim = if derived.is_empty() {
        0
    } else {
        let pivots = crate::linalg::rref(&mut derived);
        derived.truncate(pivots.len());
        pivots.len()
    };
    let bracket_rank = if brackets.is_empty() { 0 } else { rank(&brackets) };
    let mut all: QMatrix = center.clone();
    all.extend(derived.iter().cloned());
    let total = if all.is_empty() { 0 } else { rank(&all) };
    LieStructure {
        n,
        r: center.len(),
        derived_dim,
        center_basis: center.iter().map(|v| qstr(v)).collect(),
        derived_basis: derived.iter().map(|v| qstr(v)).collect(),
        class_count: conjugacy_classes(group).r(),
        direct_sum: total == n && center.len() + derived_dim == n,
        bracket_span_agrees: bracket_rank == derived_dim,
    }
}

fn unit_diff_one(n: usize, i: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); n];
    v[i] = BigRational::one();
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitDims {
    pub degrees: Vec<usize>,
    pub sum_squares: usize,
    pub n: usize,
    pub holds: bool,
}

/// Σ f_i² = n over the irreducible degrees.
pub fn unit_dims_check(group: &FiniteGroup) -> Result<UnitDims, FrobError> {
    let table = character_table(group).map_err(|e| FrobError::MissingCharacterTable(e.to_string()))?;
    let mut degrees = table.degrees.clone();
    degrees.sort_unstable();
    let sum_squares = degrees.iter().map(|f| f * f).sum();
    Ok(UnitDims {
        n: group.order(),
        holds: sum_squares == group.order(),
        degrees,
        sum_squares,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detfact::frobenius_matrix;
    use crate::group::named;
    use crate::linalg::{identity_q, matmul_q};
    use crate::poly::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_q(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigRational> {
        (0..n).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect()
    }

    #[test]
    fn convolve_examples() {
        let z2 = named::cyclic(2);
        let a = [rat(3, 1), rat(5, 1)];
        let b = [rat(7, 1), rat(11, 1)];
        assert_eq!(convolve(&z2, &a, &b), vec![rat(3 * 7 + 5 * 11, 1), rat(3 * 11 + 5 * 7, 1)]);
        let s3 = named::s3();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let b = random_q(&mut rng, 6);
        assert_eq!(convolve(&s3, &delta_e(6), &b), b);
        let a = random_q(&mut rng, 6);
        let c = convolve(&s3, &a, &b);
        assert_eq!(
            matmul_q(&frobenius_matrix(&s3, &a), &frobenius_matrix(&s3, &b)),
            frobenius_matrix(&s3, &c)
        );
    }

    #[test]
    fn inverse_examples() {
        let z2 = named::cyclic(2);
        assert_eq!(frobenius_inverse(&z2, &[rat(2, 1), rat(1, 1)]).unwrap(), vec![rat(2, 3), rat(-1, 3)]);
        let s3 = named::s3();
        assert_eq!(frobenius_inverse(&s3, &delta_e(6)).unwrap(), delta_e::<BigRational>(6));
        let tg = ThetaGradient::new(&s3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let a = random_q(&mut rng, 6);
            let u = tg.inverse(&a).unwrap();
            assert_eq!(convolve(&s3, &a, &u), delta_e::<BigRational>(6));
            assert_eq!(matmul_q(&frobenius_matrix(&s3, &a), &frobenius_matrix(&s3, &u)), identity_q(6));
        }
        assert_eq!(
            frobenius_inverse(&z2, &[rat(1, 1), rat(1, 1)]).unwrap_err().code(),
            "SingularFrobenius"
        );
    }

    #[test]
    fn inverse_floating() {
        let q8 = named::q8();
        let tg = ThetaGradient::new(&q8).unwrap();
        let a: Vec<f64> = (0..8).map(|i| 1.0 / (i as f64 + 1.3)).collect();
        let u = tg.inverse_f64(&a).unwrap();
        let c = convolve(&q8, &a, &u);
        for (i, v) in c.iter().enumerate() {
            let want = if i == 0 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-10);
        }
    }

    #[test]
    fn generator_examples() {
        let g = lie_generators(&named::cyclic(2));
        assert_eq!(g.matrices[1], vec![vec![0, 1], vec![1, 0]]);
        for grp in [named::s3(), named::q8(), named::klein()] {
            let g = lie_generators(&grp);
            let n = g.n;
            for (k, m) in g.matrices.iter().enumerate() {
                for p in 0..n {
                    assert_eq!(m[p].iter().sum::<i64>(), 1);
                    assert_eq!((0..n).map(|q| m[q][p]).sum::<i64>(), 1);
                    if k == 0 {
                        assert_eq!(m[p][p], 1);
                    } else {
                        assert_eq!(m[p][p], 0);
                    }
                }
            }
        }
    }

    #[test]
    fn brackets() {
        for name in named::BUNDLED {
            let g = named::by_name(name).unwrap();
            let r = bracket_identity_check(&g);
            assert!(r.holds && r.matrix_commutator_holds, "{name}: {r:?}");
            assert_eq!(r.pairs_checked, g.order() * g.order());
            assert_eq!(r.all_zero, g.is_abelian(), "{name}");
        }
    }

    #[test]
    fn dims() {
        let s = center_derived_dims(&named::cyclic(6));
        assert_eq!((s.r, s.derived_dim), (6, 0));
        let s = center_derived_dims(&named::s3());
        assert_eq!((s.r, s.derived_dim), (3, 3));
        assert!(s.direct_sum && s.bracket_span_agrees);
        let s = center_derived_dims(&named::d4());
        assert_eq!((s.r, s.derived_dim), (5, 3));
        for name in named::BUNDLED {
            let g = named::by_name(name).unwrap();
            let s = center_derived_dims(&g);
            assert_eq!(s.r, s.class_count);
            assert_eq!(s.derived_dim, g.order() - s.r);
            assert!(s.direct_sum && s.bracket_span_agrees, "{name}");
        }
    }

    #[test]
    fn unit_dims() {
        let u = unit_dims_check(&named::s3()).unwrap();
        assert_eq!(u.degrees, vec![1, 1, 2]);
        assert!(u.holds);
        let u = unit_dims_check(&named::q8()).unwrap();
        assert_eq!(u.degrees, vec![1, 1, 1, 1, 2]);
        let u = unit_dims_check(&named::cyclic(6)).unwrap();
        assert_eq!(u.degrees, vec![1; 6]);
    }
}
