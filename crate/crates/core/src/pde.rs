//! Differential operators Θ(G)(∂) and elements of their kernels.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::chartable::{abelian_characters, character_matrix_det};
use crate::cyclotomic::Cyclotomic;
use crate::detfact::{dedekind_factorization, expand_group_det, heap_permutations, DetError, LinearForm};
use crate::fd::{self, FdError, OperatorTerms};
use crate::group::{FiniteGroup, GroupError};
use crate::linalg::QMatrix;
use crate::poly::{Coeff, CyclotomicPoly, Monomial, RationalPoly};
use crate::quad::{self, QuadConfig, QuadError, QuadResult};
use crate::special::{self, SpecialError};
use crate::testfn::{MultiFn, UniFn};

/// Tolerance for Θ(α) = 0 (relative to Σ|c_m α^m|).
pub const VARIETY_TOL: f64 = 1e-10;
/// Largest matrix size for the Cayley operator.
pub const CAYLEY_MAX_SIZE: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdeError {
    #[error("NotOnVariety: |Θ(α)| = {value:e}")]
    NotOnVariety { value: f64 },
    #[error(transparent)]
    Stencil(#[from] FdError),
    #[error("ChartSingular: character matrix is not invertible")]
    ChartSingular,
    #[error("SizeTooLarge: size {size} exceeds {max}")]
    SizeTooLarge { size: usize, max: usize },
    #[error("PreconditionViolation: {0}")]
    Precondition(String),
    #[error("DomainViolation: {0}")]
    DomainViolation(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Det(#[from] DetError),
}

impl From<GroupError> for PdeError {
    fn from(e: GroupError) -> Self {
        PdeError::Det(DetError::Group(e))
    }
}

impl PdeError {
    pub fn code(&self) -> &'static str {
        match self {
            PdeError::NotOnVariety { .. } => "NotOnVariety",
            PdeError::Stencil(_) => "StencilOverflow",
            PdeError::ChartSingular => "ChartSingular",
            PdeError::SizeTooLarge { .. } => "SizeTooLarge",
            PdeError::Precondition(_) => "PreconditionViolation",
            PdeError::DomainViolation(_) => "DomainViolation",
            PdeError::Quadrature(_) => "QuadratureNonConvergence",
            PdeError::Special(SpecialError::GammaPole(_)) => "GammaPole",
            PdeError::Special(_) => "SeriesDomain",
            PdeError::Det(e) => e.code(),
        }
    }
}

/// Θ(G) read as a differential operator X_g ↦ ∂_g.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub symbol: RationalPoly,
    pub factors: Option<Vec<LinearForm>>,
    pub order: usize,
}

impl OperatorSpec {
    pub fn from_group(group: &FiniteGroup) -> Result<Self, PdeError> {
        let symbol = expand_group_det(group)?;
        let factors = if group.is_abelian() {
            Some(dedekind_factorization(group)?.forms)
        } else {
            None
        };
        Ok(OperatorSpec {
            symbol,
            factors,
            order: group.order(),
        })
    }

    /// Product of the factors equals the symbol exactly (vacuous without factors).
    pub fn factors_consistent(&self) -> bool {
        let Some(forms) = &self.factors else {
            return true;
        };
        let n = self.symbol.var_count();
        let prod = forms
            .iter()
            .fold(CyclotomicPoly::one(n), |acc, f| &acc * &f.to_poly());
        prod == self.symbol.to_cyclotomic()
    }

    pub fn terms(&self) -> OperatorTerms {
        self.symbol
            .terms()
            .map(|(m, c)| (m.0.clone(), c.to_complex()))
            .collect()
    }

    /// Θ(α) together with the scale Σ|c_m α^m|.
    pub fn symbol_at(&self, alpha: &[Complex64]) -> (Complex64, f64) {
        let mut v = Complex64::zero();
        let mut scale = 0.0;
        for (m, c) in self.symbol.terms() {
            let t = m
                .0
                .iter()
                .zip(alpha)
                .fold(c.to_complex(), |acc, (&e, a)| acc * a.powu(e));
            v += t;
            scale += t.norm();
        }
        (v, scale)
    }
}

/// Change of variables X_g = Σ_χ χ(g) u_χ for abelian G.
#[derive(Debug, Clone)]
pub struct SeparationChart {
    /// forward[g][χ] = χ(g)
    pub forward: Vec<Vec<Cyclotomic>>,
    /// inverse[χ][g] = conj(χ(g)) / n
    pub inverse: Vec<Vec<Cyclotomic>>,
    pub exact: bool,
}

impl SeparationChart {
    pub fn new(group: &FiniteGroup) -> Result<Self, PdeError> {
        let table = abelian_characters(group)?;
        match character_matrix_det(&table) {
            Some(d) if !d.is_zero() => {}
            _ => return Err(PdeError::ChartSingular),
        }
        let n = group.order();
        let inv_n = BigRational::new(1.into(), (n as i64).into());
        let forward: Vec<Vec<Cyclotomic>> = (0..n)
            .map(|g| (0..n).map(|i| table.exact_value(i, g).unwrap().clone()).collect())
            .collect();
        let inverse: Vec<Vec<Cyclotomic>> = (0..n)
            .map(|i| (0..n).map(|g| forward[g][i].conj().scale(&inv_n)).collect())
            .collect();
        let chart = SeparationChart {
            forward,
            inverse,
            exact: true,
        };
        if !chart.is_inverse_pair() {
            return Err(PdeError::ChartSingular);
        }
        Ok(chart)
    }

    pub fn is_inverse_pair(&self) -> bool {
        let n = self.forward.len();
        (0..n).all(|a| {
            (0..n).all(|b| {
                let s = (0..n).fold(Cyclotomic::zero(), |acc, k| acc + &self.forward[a][k] * &self.inverse[k][b]);
                s == if a == b { Cyclotomic::one() } else { Cyclotomic::zero() }
            })
        })
    }

    /// u = inverse · x
    pub fn to_u(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.inverse
            .iter()
            .map(|row| row.iter().zip(x).map(|(c, v)| c.to_complex() * v).sum())
            .collect()
    }

    /// u_χ as exact linear forms in the x-variables.
    pub fn u_polys(&self) -> Vec<CyclotomicPoly> {
        self.inverse.iter().map(|row| CyclotomicPoly::linear(row)).collect()
    }
}

/// Plane-wave direction: exact (cyclotomic) or floating.
#[derive(Debug, Clone)]
pub enum Alpha {
    Exact(Vec<Cyclotomic>),
    Float(Vec<Complex64>),
}

impl Alpha {
    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Alpha::Exact(v) => v.iter().map(Cyclotomic::to_complex).collect(),
            Alpha::Float(v) => v.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Alpha::Exact(v) => v.len(),
            Alpha::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelReport {
    pub method: &'static str,
    pub exact_zero: bool,
    pub residual: f64,
    pub evaluations: usize,
    pub step: Option<f64>,
}

impl KernelReport {
    fn symbolic(zero: bool, residual: f64) -> Self {
        KernelReport {
            method: "symbolic",
            exact_zero: zero,
            residual,
            evaluations: 0,
            step: None,
        }
    }
}

/// Default FD base point: x_g = 0.2 + 0.05 g.
pub fn default_point(n: usize) -> Vec<f64> {
    (0..n).map(|g| 0.2 + 0.05 * g as f64).collect()
}

/// Applies Θ(G)(∂) to F(Σ α_g x_g).
pub fn plane_wave_check(group: &FiniteGroup, alpha: &Alpha, f: UniFn) -> Result<KernelReport, PdeError> {
    plane_wave_check_at(group, alpha, f, &default_point(group.order()), None)
}

pub fn plane_wave_check_at(
    group: &FiniteGroup,
    alpha: &Alpha,
    f: UniFn,
    point: &[f64],
    step: Option<f64>,
) -> Result<KernelReport, PdeError> {
    let n = group.order();
    if alpha.len() != n || point.len() != n {
        return Err(PdeError::Precondition(format!(
            "expected {n} coordinates, got α of length {} and point of length {}",
            alpha.len(),
            point.len()
        )));
    }
    let op = OperatorSpec::from_group(group)?;
    if let Alpha::Exact(a) = alpha {
        let val = op.symbol.to_cyclotomic().eval_in(a);
        if !val.is_zero() {
            return Err(PdeError::NotOnVariety {
                value: val.to_complex().norm(),
            });
        }
        if let Some(k) = f.degree() {
            let wave = CyclotomicPoly::linear(a).pow(k);
            let out = op.symbol.to_cyclotomic().apply_as_operator(&wave);
            let residual = if out.is_zero() {
                0.0
            } else {
                out.eval_complex(&point.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>())
                    .norm()
            };
            return Ok(KernelReport::symbolic(out.is_zero(), residual));
        }
    } else {
        let a = alpha.to_complex();
        let (v, scale) = op.symbol_at(&a);
        if v.norm() > VARIETY_TOL * scale.max(1.0) {
            return Err(PdeError::NotOnVariety { value: v.norm() });
        }
    }
    let a = alpha.to_complex();
    let acc = fd::accuracy_for(n as u32);
    let h = step.unwrap_or_else(|| fd::default_step(n as u32, acc, point));
    let wave = |x: &[f64]| {
        let t: Complex64 = a.iter().zip(x).map(|(ai, xi)| ai * xi).sum();
        f.eval(t)
    };
    let r = fd::apply_operator(&op.terms(), wave, point, h, acc, fd::MAX_EVALUATIONS)?;
    Ok(KernelReport {
        method: "finite-difference",
        exact_zero: false,
        residual: r.relative(),
        evaluations: r.evaluations,
        step: Some(h),
    })
}

/// Assembles w = Σ_χ g_χ(u without u_χ) in x-coordinates and applies Θ(G)(∂).
pub fn separated_solution_residual(group: &FiniteGroup, g_list: &[MultiFn]) -> Result<KernelReport, PdeError> {
    separated_solution_residual_at(group, g_list, &default_point(group.order()))
}

pub fn separated_solution_residual_at(
    group: &FiniteGroup,
    g_list: &[MultiFn],
    point: &[f64],
) -> Result<KernelReport, PdeError> {
    let n = group.order();
    if let Some((a, b)) = group.commutator_witness() {
        return Err(DetError::NotAbelian { a, b }.into());
    }
    if g_list.len() != n {
        return Err(PdeError::Precondition(format!("need {n} functions, got {}", g_list.len())));
    }
    let chart = SeparationChart::new(group)?;
    let op = OperatorSpec::from_group(group)?;
    let polys: Option<Vec<RationalPoly>> = g_list.iter().map(|g| g.to_poly(n - 1)).collect();
    if let Some(polys) = polys {
        let u = chart.u_polys();
        let mut w = CyclotomicPoly::zero(n);
        for (chi, p) in polys.iter().enumerate() {
            let subs: Vec<CyclotomicPoly> = (0..n).filter(|&k| k != chi).map(|k| u[k].clone()).collect();
            w = w + p.to_cyclotomic().compose(&subs);
        }
        let out = op.symbol.to_cyclotomic().apply_as_operator(&w);
        let residual = if out.is_zero() {
            0.0
        } else {
            out.eval_complex(&point.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>())
                .norm()
        };
        return Ok(KernelReport::symbolic(out.is_zero(), residual));
    }
    let field = |x: &[f64]| {
        let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let u = chart.to_u(&xc);
        g_list
            .iter()
            .enumerate()
            .map(|(chi, g)| {
                let rest: Vec<Complex64> = (0..n).filter(|&k| k != chi).map(|k| u[k]).collect();
                g.eval_complex(&rest)
            })
            .sum::<Complex64>()
    };
    let acc = fd::accuracy_for(n as u32);
    let h = fd::default_step(n as u32, acc, point);
    let r = fd::apply_operator(&op.terms(), field, point, h, acc, fd::MAX_EVALUATIONS)?;
    Ok(KernelReport {
        method: "finite-difference",
        exact_zero: false,
        residual: r.relative(),
        evaluations: r.evaluations,
        step: Some(h),
    })
}

/// Polynomial in the f² entries z_{jl} of a square matrix, variable index j·f + l.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixVariablePoly {
    pub size: usize,
    pub poly: RationalPoly,
}

impl MatrixVariablePoly {
    pub fn new(size: usize, poly: RationalPoly) -> Self {
        assert_eq!(poly.var_count(), size * size);
        MatrixVariablePoly { size, poly }
    }

    pub fn entry(size: usize, j: usize, l: usize) -> Self {
        Self::new(size, RationalPoly::var(size * size, j * size + l))
    }

    /// det(Z)
    pub fn det(size: usize) -> Self {
        let mut acc = RationalPoly::zero(size * size);
        let mut perm: Vec<usize> = (0..size).collect();
        heap_permutations(&mut perm, |p, s| {
            let mut m = vec![0u32; size * size];
            for (j, &l) in p.iter().enumerate() {
                m[j * size + l] += 1;
            }
            acc.add_term(Monomial(m), BigRational::from_integer(s.into()));
        });
        Self::new(size, acc)
    }

    pub fn names(size: usize) -> Vec<String> {
        (0..size * size)
            .map(|i| format!("z{}{}", i / size + 1, i % size + 1))
            .collect()
    }

    /// A⋆q(Z) = q(AᵀZ)
    pub fn star(&self, a: &QMatrix) -> Self {
        let f = self.size;
        let subs: Vec<RationalPoly> = (0..f * f)
            .map(|idx| {
                let (j, l) = (idx / f, idx % f);
                let mut p = RationalPoly::zero(f * f);
                for (k, row) in a.iter().enumerate() {
                    if !row[j].is_zero() {
                        p = p + RationalPoly::var(f * f, k * f + l).scale(&row[j]);
                    }
                }
                p
            })
            .collect();
        Self::new(f, self.poly.compose(&subs))
    }

    /// Δ_jl q = Σ_h z_jh ∂q/∂z_lh (0-based rows).
    pub fn polarize(&self, j: usize, l: usize) -> Self {
        let f = self.size;
        let mut out = RationalPoly::zero(f * f);
        for h in 0..f {
            let d = self.poly.derivative(l * f + h);
            if !d.is_zero() {
                out = out + &RationalPoly::var(f * f, j * f + h) * &d;
            }
        }
        Self::new(f, out)
    }
}

/// Ω = det(∂/∂z_jl) applied by Leibniz expansion.
pub fn cayley_omega_apply(q: &MatrixVariablePoly) -> Result<MatrixVariablePoly, PdeError> {
    let f = q.size;
    if f > CAYLEY_MAX_SIZE {
        return Err(PdeError::SizeTooLarge {
            size: f,
            max: CAYLEY_MAX_SIZE,
        });
    }
    let mut out = RationalPoly::zero(f * f);
    let mut perm: Vec<usize> = (0..f).collect();
    heap_permutations(&mut perm, |p, s| {
        let mut e = vec![0u32; f * f];
        for (j, &l) in p.iter().enumerate() {
            e[j * f + l] = 1;
        }
        let d = q.poly.apply_partials(&Monomial(e));
        out = if s > 0 { out.clone() + d } else { out.clone() - d };
    });
    Ok(MatrixVariablePoly::new(f, out))
}

#[derive(Debug, Clone, Serialize)]
pub struct PolarizationReport {
    pub commutes: bool,
    pub witness: Option<Vec<u32>>,
    pub kernel_ok: bool,
    pub kernel_witness: Option<usize>,
}

/// Checks [Ω, Δ_jl^r] q = 0 and Ω(Δ_jl^r f(row l)) = 0 for a family of
/// row-l polynomials. `j`, `l` are 1-based row indices.
pub fn polarization_commutator_check(
    size: usize,
    j: usize,
    l: usize,
    r: u32,
    q: &MatrixVariablePoly,
) -> Result<PolarizationReport, PdeError> {
    if j == l {
        return Err(PdeError::Precondition(format!("j = l = {j}; polarization needs j != l")));
    }
    if size > 3 || r > 3 {
        return Err(PdeError::Precondition(format!("size {size} > 3 or r {r} > 3")));
    }
    if j == 0 || l == 0 || j > size || l > size || q.size != size {
        return Err(PdeError::Precondition(format!("rows ({j},{l}) out of range 1..={size}")));
    }
    let (j0, l0) = (j - 1, l - 1);
    let pol = |p: &MatrixVariablePoly| (0..r).fold(p.clone(), |acc, _| acc.polarize(j0, l0));
    let lhs = cayley_omega_apply(&pol(q))?;
    let rhs = pol(&cayley_omega_apply(q)?);
    let diff = lhs.poly - rhs.poly;
    let witness = diff.terms().next().map(|(m, _)| m.0.clone());
    let family = row_family(size, l0);
    let mut kernel_witness = None;
    for (i, p) in family.iter().enumerate() {
        if !cayley_omega_apply(&pol(p))?.poly.is_zero() {
            kernel_witness = Some(i);
            break;
        }
    }
    Ok(PolarizationReport {
        commutes: witness.is_none(),
        witness,
        kernel_ok: kernel_witness.is_none(),
        kernel_witness,
    })
}

/// Monomials of degree ≤ 3 in row `l` plus (Σ_h z_lh)^4.
fn row_family(size: usize, l: usize) -> Vec<MatrixVariablePoly> {
    let vars = size * size;
    let mut out = Vec::new();
    let mut exps = vec![0u32; size];
    loop {
        let deg: u32 = exps.iter().sum();
        if (1..=3).contains(&deg) {
            let mut m = vec![0u32; vars];
            for (h, &e) in exps.iter().enumerate() {
                m[l * size + h] = e;
            }
            out.push(MatrixVariablePoly::new(
                size,
                RationalPoly::from_terms(vars, [(Monomial(m), BigRational::one())]),
            ));
        }
        // odometer over 0..=3 per coordinate
        let mut i = 0;
        loop {
            if i == size {
                let sum = (0..size).fold(RationalPoly::zero(vars), |p, h| p + RationalPoly::var(vars, l * size + h));
                out.push(MatrixVariablePoly::new(size, sum.pow(4)));
                return out;
            }
            exps[i] += 1;
            if exps[i] <= 3 {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

/// Parameters of ψ_λ(α₁, α₂, β₁, β₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JohnParams {
    pub lambda: [f64; 3],
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error_estimate: f64,
}

impl From<QuadResult> for Estimate {
    fn from(r: QuadResult) -> Self {
        Estimate {
            value: r.value,
            error_estimate: r.error,
        }
    }
}

/// ∫ (α₁x+β₁)₊^{λ₁−1} (α₂x+β₂)₊^{λ₂−1} x₊^{λ₃−1} dx by adaptive quadrature.
pub fn john_transform_numeric(p: &JohnParams, cfg: &QuadConfig) -> Result<Estimate, PdeError> {
    let lam = p.lambda;
    if lam.iter().any(|&l| !(l > 0.0)) || lam.iter().sum::<f64>() >= 2.0 {
        return Err(PdeError::DomainViolation(format!(
            "need Re λ_i > 0 and Re(λ₁+λ₂+λ₃) < 2, got {lam:?}"
        )));
    }
    // factor k: slope·x + intercept, exponent λ_k − 1
    let slope = [p.alpha[0], p.alpha[1], 1.0];
    let icpt = [p.beta[0], p.beta[1], 0.0];
    let expo = [lam[0] - 1.0, lam[1] - 1.0, lam[2] - 1.0];
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for k in 0..3 {
        if slope[k] == 0.0 {
            if icpt[k] <= 0.0 {
                return Ok(Estimate { value: 0.0, error_estimate: 0.0 });
            }
        } else {
            let root = -icpt[k] / slope[k];
            if slope[k] > 0.0 {
                lo = lo.max(root);
            } else {
                hi = hi.min(root);
            }
        }
    }
    if lo >= hi {
        return Ok(Estimate { value: 0.0, error_estimate: 0.0 });
    }
    let root_of = |k: usize| -icpt[k] / slope[k];
    let at = |r: f64, e: f64| (r - e).abs() <= 1e-14 * r.abs().max(e.abs()).max(1.0);
    let vanishes_lo: Vec<bool> = (0..3).map(|k| slope[k] > 0.0 && at(root_of(k), lo)).collect();
    let vanishes_hi: Vec<bool> = (0..3).map(|k| slope[k] < 0.0 && at(root_of(k), hi)).collect();
    let ea: f64 = (0..3).filter(|&k| vanishes_lo[k]).map(|k| expo[k]).sum();
    let integrand = |x: f64, dl: f64, dh: f64| -> f64 {
        (0..3)
            .map(|k| {
                let v = if vanishes_lo[k] {
                    slope[k] * dl
                } else if vanishes_hi[k] {
                    -slope[k] * dh
                } else {
                    slope[k] * x + icpt[k]
                };
                if expo[k] == 0.0 {
                    1.0
                } else {
                    v.max(0.0).powf(expo[k])
                }
            })
            .product()
    };
    if hi.is_finite() {
        let eb: f64 = (0..3).filter(|&k| vanishes_hi[k]).map(|k| expo[k]).sum();
        return Ok(quad::integrate_singular(integrand, lo, hi, ea, eb, cfg)?.into());
    }
    let decay: f64 = (0..3).filter(|&k| slope[k] != 0.0).map(|k| expo[k]).sum();
    if decay >= -1.0 {
        return Err(PdeError::DomainViolation(format!(
            "integrand decays like x^{decay} on an unbounded support"
        )));
    }
    let split = lo + lo.abs().max(1.0);
    let half = QuadConfig {
        abs_tol: 0.5 * cfg.abs_tol,
        ..*cfg
    };
    let head = quad::integrate_singular(integrand, lo, split, ea, 0.0, &half)?;
    // x = split / u on the tail
    let tail = quad::integrate_singular(
        |u, _, _| {
            let x = split / u;
            integrand(x, x - lo, f64::INFINITY) * split / (u * u)
        },
        0.0,
        1.0,
        -decay - 2.0,
        0.0,
        &half,
    )?;
    Ok(Estimate {
        value: head.value + tail.value,
        error_estimate: head.error + tail.error,
    })
}

/// Γ(λ₂)Γ(λ₃)/Γ(λ₂+λ₃) β₁^{λ₁−1} β₂^{λ₂+λ₃−1} |α₂|^{−λ₃} ₂F₁(1−λ₁, λ₃; λ₂+λ₃; x),
/// x = α₁β₂/(α₂β₁).
pub fn john_hypergeometric_closed(p: &JohnParams) -> Result<f64, PdeError> {
    let [l1, l2, l3] = p.lambda;
    let [a1, a2] = p.alpha;
    let [b1, b2] = p.beta;
    if !(a1 < 0.0 && a2 < 0.0 && b1 > 0.0 && b2 > 0.0) {
        return Err(PdeError::DomainViolation(format!(
            "closed form needs α_i < 0 < β_i, got α={:?} β={:?}",
            p.alpha, p.beta
        )));
    }
    let x = a1 * b2 / (a2 * b1);
    if x >= 1.0 && !special::is_gamma_pole(1.0 - l1) {
        return Err(SpecialError::SeriesDomain(x).into());
    }
    let pre = special::gamma(l2)? * special::gamma(l3)? / special::gamma(l2 + l3)?
        * b1.powf(l1 - 1.0)
        * b2.powf(l2 + l3 - 1.0)
        * a2.abs().powf(-l3);
    Ok(pre * special::hyp2f1(1.0 - l1, l3, l2 + l3, x)?)
}

/// Schwartz integrand ∏ y_i^{p_i} · exp(−Σ y_i²) on ℝ⁵.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussPoly {
    pub powers: [u32; 5],
}

impl GaussPoly {
    pub fn eval(&self, y: &[f64; 5]) -> f64 {
        let mut v = (-y.iter().map(|t| t * t).sum::<f64>()).exp();
        for (t, &p) in y.iter().zip(&self.powers) {
            if p > 0 {
                v *= t.powi(p as i32);
            }
        }
        v
    }
}

impl std::str::FromStr for GaussPoly {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        if head != "gauss" {
            return Err(format!("unknown Schwartz function '{s}'"));
        }
        let mut powers = [0u32; 5];
        if !args.is_empty() {
            let v: Vec<u32> = args
                .split(',')
                .map(|t| t.trim().parse().map_err(|e| format!("bad power '{t}': {e}")))
                .collect::<Result<_, _>>()?;
            if v.len() > 5 {
                return Err("at most 5 powers".into());
            }
            powers[..v.len()].copy_from_slice(&v);
        }
        Ok(GaussPoly { powers })
    }
}

/// Half-width of the truncated (x₂, x₃) plane.
pub const OMEGA9_BOX: f64 = 9.0;

/// φ(α, β, γ) = ∫∫ f(αx₂ + βx₃ + γ, x₂, x₃) dx₂ dx₃; params in the order
/// (α₁, α₂, α₃, β₁, β₂, β₃, γ₁, γ₂, γ₃).
pub fn omega9_phi(f: &GaussPoly, params: &[f64], cfg: &QuadConfig) -> Result<QuadResult, QuadError> {
    let integrand = |x: &[f64]| {
        let (x2, x3) = (x[0], x[1]);
        let y = [
            params[0] * x2 + params[3] * x3 + params[6],
            params[1] * x2 + params[4] * x3 + params[7],
            params[2] * x2 + params[5] * x3 + params[8],
            x2,
            x3,
        ];
        f.eval(&y)
    };
    quad::integrate_box(&integrand, &[-OMEGA9_BOX, -OMEGA9_BOX], &[OMEGA9_BOX, OMEGA9_BOX], cfg)
}

#[derive(Debug, Clone, Serialize)]
pub struct Omega9Report {
    pub value: f64,
    pub max_term: f64,
    pub residual: f64,
    pub evaluations: usize,
    pub step: f64,
}

/// Ω₉φ at `point` by 4th-order central differences over the six signed
/// terms of the 3×3 determinant.
pub fn omega9_kernel_residual(f: &GaussPoly, point: &[f64; 9]) -> Result<Omega9Report, PdeError> {
    let cfg = QuadConfig::with_tol(1e-14, 1e-13);
    let mut terms: OperatorTerms = Vec::new();
    let mut perm = vec![0usize, 1, 2];
    heap_permutations(&mut perm, |p, s| {
        let mut e = vec![0u32; 9];
        for (row, &col) in p.iter().enumerate() {
            e[3 * row + col] = 1;
        }
        terms.push((e, Complex64::new(s as f64, 0.0)));
    });
    let failure = std::sync::Mutex::new(None);
    let phi = |x: &[f64]| match omega9_phi(f, x, &cfg) {
        Ok(r) => Complex64::new(r.value, 0.0),
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
            Complex64::zero()
        }
    };
    let h = 0.05;
    let r = fd::apply_operator(&terms, phi, point, h, 4, fd::MAX_EVALUATIONS)?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e.into());
    }
    Ok(Omega9Report {
        value: r.value.re,
        max_term: r.max_term,
        residual: r.relative(),
        evaluations: r.evaluations,
        step: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::named;
    use crate::linalg::det_q;
    use crate::poly::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ones(n: usize) -> Alpha {
        Alpha::Exact(vec![Cyclotomic::one(); n])
    }

    #[test]
    fn z2_plane_wave_cubic_is_exact() {
        let a = Alpha::Exact(vec![Cyclotomic::one(), Cyclotomic::one()]);
        let r = plane_wave_check(&named::cyclic(2), &a, UniFn::Pow(3)).unwrap();
        assert!(r.exact_zero);
    }

    #[test]
    fn z3_plane_wave_exp() {
        let a = Alpha::Exact((0..3).map(|k| Cyclotomic::root_of_unity(3, k)).collect());
        let r = plane_wave_check(&named::cyclic(3), &a, UniFn::Exp).unwrap();
        assert_eq!(r.method, "finite-difference");
        assert!(r.residual < 1e-5, "{}", r.residual);
        let r = plane_wave_check(&named::cyclic(3), &a, UniFn::Pow(6)).unwrap();
        assert!(r.exact_zero);
    }

    #[test]
    fn s3_plane_wave_on_phi2() {
        let r = plane_wave_check(&named::s3(), &ones(6), UniFn::Pow(12)).unwrap();
        assert!(r.exact_zero);
        let r = plane_wave_check(&named::s3(), &ones(6), UniFn::Sin).unwrap();
        assert!(r.residual < 1e-5, "{}", r.residual);
    }

    #[test]
    fn off_variety_is_rejected() {
        let a = Alpha::Exact(vec![Cyclotomic::one(), Cyclotomic::from_int(2)]);
        let e = plane_wave_check(&named::cyclic(2), &a, UniFn::Exp).unwrap_err();
        assert_eq!(e.code(), "NotOnVariety");
        let a = Alpha::Float(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]);
        assert!(plane_wave_check(&named::cyclic(2), &a, UniFn::Exp).is_err());
    }

    #[test]
    fn off_variety_functions_are_not_annihilated() {
        // sanity: the residual normalization detects a non-solution
        let op = OperatorSpec::from_group(&named::cyclic(3)).unwrap();
        let f = |x: &[f64]| Complex64::new((x[0] + 0.3 * x[1] - x[2]).exp(), 0.0);
        let p = default_point(3);
        let h = fd::default_step(3, 4, &p);
        let r = fd::apply_operator(&op.terms(), f, &p, h, 4, fd::MAX_EVALUATIONS).unwrap();
        assert!(r.relative() > 1e-2);
    }

    #[test]
    fn fd_convergence_order() {
        // along α = (1, -1) the two second differences coincide and the
        // residual vanishes identically, so only z3 and z4 are measured
        let g = named::cyclic(2);
        let a2 = Alpha::Exact(vec![Cyclotomic::one(), Cyclotomic::from_int(-1)]);
        let r = plane_wave_check_at(&g, &a2, UniFn::Sin, &default_point(2), Some(0.2)).unwrap();
        assert!(r.residual < 1e-14);
        for (name, order) in [("z3", 3.0), ("z4", 4.0)] {
            let g = named::by_name(name).unwrap();
            let n = g.order();
            let alpha = Alpha::Exact((0..n as i64).map(|k| Cyclotomic::root_of_unity(n, k)).collect());
            let p = default_point(n);
            let r1 = plane_wave_check_at(&g, &alpha, UniFn::Sin, &p, Some(0.2)).unwrap();
            let r2 = plane_wave_check_at(&g, &alpha, UniFn::Sin, &p, Some(0.1)).unwrap();
            let observed = (r1.residual / r2.residual).log2();
            assert!(observed >= order - 0.5, "{name}: observed order {observed} ({} -> {})", r1.residual, r2.residual);
        }
    }

    #[test]
    fn separated_solutions() {
        let g2 = named::cyclic(2);
        let fs: Vec<MultiFn> = vec!["pow2".parse().unwrap(), "sin".parse().unwrap()];
        let r = separated_solution_residual(&g2, &fs).unwrap();
        assert!(r.residual < 1e-5, "{}", r.residual);

        let g3 = named::cyclic(3);
        let fs: Vec<MultiFn> = ["pow3:1,2", "prod", "affine:1,2,3"].iter().map(|s| s.parse().unwrap()).collect();
        let r = separated_solution_residual(&g3, &fs).unwrap();
        assert!(r.exact_zero);

        let g4 = named::cyclic(4);
        let fs: Vec<MultiFn> = ["exp:0.5,0.2,0.1", "sin", "pow2:1,-1,0.5", "cos:0.3"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let r = separated_solution_residual(&g4, &fs).unwrap();
        assert!(r.residual < 1e-5, "{}", r.residual);
        assert!(separated_solution_residual(&named::s3(), &[]).is_err());
    }

    #[test]
    fn chart_is_inverse_and_factors_consistent() {
        for name in ["z2", "z3", "z4", "klein", "z6"] {
            let g = named::by_name(name).unwrap();
            assert!(SeparationChart::new(&g).unwrap().is_inverse_pair());
            let op = OperatorSpec::from_group(&g).unwrap();
            assert!(op.factors_consistent());
            assert_eq!(op.order, g.order());
        }
    }

    fn brute_det_squared_omega() -> RationalPoly {
        // Ω(det²) for f = 2 by differentiating the expanded polynomial
        let d = MatrixVariablePoly::det(2).poly;
        let q = d.pow(2);
        let a = q.derivative(0).derivative(3);
        let b = q.derivative(1).derivative(2);
        a - b
    }

    #[test]
    fn cayley_examples() {
        let q = MatrixVariablePoly::new(2, RationalPoly::var(4, 0) * RationalPoly::var(4, 3));
        assert_eq!(cayley_omega_apply(&q).unwrap().poly, RationalPoly::one(4));
        let d = MatrixVariablePoly::det(2);
        let sq = MatrixVariablePoly::new(2, d.poly.pow(2));
        let got = cayley_omega_apply(&sq).unwrap().poly;
        assert_eq!(got, brute_det_squared_omega());
        assert_eq!(got, d.poly.scale(&rat(6, 1)));
        let big = MatrixVariablePoly::det(5);
        assert_eq!(cayley_omega_apply(&big).unwrap_err().code(), "SizeTooLarge");
    }

    #[test]
    fn cayley_rank_deficient_star() {
        let a: QMatrix = vec![
            vec![rat(1, 1), rat(2, 1), rat(3, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
            vec![rat(1, 1), rat(3, 1), rat(4, 1)],
        ];
        assert!(det_q(&a).is_zero());
        let q = MatrixVariablePoly::new(3, MatrixVariablePoly::det(3).poly.pow(3));
        assert!(cayley_omega_apply(&q.star(&a)).unwrap().poly.is_zero());
    }

    #[test]
    fn cayley_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in 2..=3usize {
            for _ in 0..4 {
                let a: QMatrix = (0..f)
                    .map(|_| (0..f).map(|_| rat(rng.gen_range(-2..=2), 1)).collect())
                    .collect();
                let det = det_q(&a);
                let mut poly = RationalPoly::zero(f * f);
                for _ in 0..3 {
                    let m: Vec<u32> = (0..f * f).map(|_| rng.gen_range(0..=1)).collect();
                    poly.add_term(Monomial(m), rat(rng.gen_range(-3..=3), 1));
                }
                let q = MatrixVariablePoly::new(f, poly * MatrixVariablePoly::det(f).poly);
                let lhs = cayley_omega_apply(&q.star(&a)).unwrap().poly;
                let rhs = cayley_omega_apply(&q).unwrap().star(&a).poly.scale(&det);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn polarization() {
        let z = |j: usize, l: usize| RationalPoly::var(4, (j - 1) * 2 + (l - 1));
        let q = MatrixVariablePoly::new(2, z(2, 1).pow(2) * z(2, 2));
        let r = polarization_commutator_check(2, 1, 2, 1, &q).unwrap();
        assert!(r.commutes && r.kernel_ok);
        assert!(polarization_commutator_check(2, 1, 1, 1, &q).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut p = RationalPoly::zero(9);
        for _ in 0..6 {
            let mut m = vec![0u32; 9];
            for _ in 0..4 {
                m[rng.gen_range(0..9)] += 1;
            }
            p.add_term(Monomial(m), rat(rng.gen_range(1..=5), 1));
        }
        let q = MatrixVariablePoly::new(3, p);
        let r = polarization_commutator_check(3, 1, 3, 2, &q).unwrap();
        assert!(r.commutes && r.kernel_ok);
    }

    #[test]
    fn john_examples() {
        let cfg = QuadConfig::default();
        let p = JohnParams {
            lambda: [1.0, 1.0, 1.0],
            alpha: [-1.0, -1.0],
            beta: [1.0, 1.0],
        };
        // support [0, 1], integrand 1
        let q = john_transform_numeric(&p, &cfg);
        assert!(q.is_err(), "λ sum = 3 is outside the convergence domain");
        assert!((john_hypergeometric_closed(&p).unwrap() - 1.0).abs() < 1e-15);
        let p = JohnParams {
            lambda: [0.5, 0.5, 0.5],
            alpha: [-1.0, -2.0],
            beta: [3.0, 4.0],
        };
        let q = john_transform_numeric(&p, &cfg).unwrap();
        let c = john_hypergeometric_closed(&p).unwrap();
        assert!((q.value - 1.656_638_170_2).abs() < 1e-9, "{}", q.value);
        assert!((q.value - c).abs() < 1e-9);
        let p = JohnParams {
            lambda: [2.0, 1.0, 1.0],
            alpha: [-1.0, -1.0],
            beta: [1.0, 1.0],
        };
        assert_eq!(john_transform_numeric(&p, &cfg).unwrap_err().code(), "DomainViolation");
        let p = JohnParams {
            lambda: [0.5, 0.5, 0.5],
            alpha: [-2.0, -1.0],
            beta: [1.0, 1.0],
        };
        assert_eq!(john_hypergeometric_closed(&p).unwrap_err().code(), "SeriesDomain");
    }

    #[test]
    fn john_unbounded_support() {
        let cfg = QuadConfig::default();
        let p = JohnParams {
            lambda: [0.4, 0.6, 0.3],
            alpha: [0.5, 0.7],
            beta: [1.0, 2.0],
        };
        let q = john_transform_numeric(&p, &cfg).unwrap();
        // independent map x = t/(1-t) onto [0, 1)
        let g = |x: f64| (0.5 * x + 1.0).powf(-0.6) * (0.7 * x + 2.0).powf(-0.4) * x.powf(-0.7);
        let want = quad::integrate_singular(
            |t, _, dh| g(t / dh) / (dh * dh),
            0.0,
            1.0,
            -0.7,
            -0.3,
            &cfg,
        )
        .unwrap();
        assert!((q.value - want.value).abs() < 1e-8 * want.value, "{} vs {}", q.value, want.value);
        let p = JohnParams {
            lambda: [0.9, 0.9, 0.9],
            alpha: [0.0, 1.0],
            beta: [1.0, 1.0],
        };
        assert_eq!(john_transform_numeric(&p, &cfg).unwrap_err().code(), "DomainViolation");
    }

    #[test]
    fn omega9_kernel() {
        let f: GaussPoly = "gauss".parse().unwrap();
        let point = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.1, 0.2, -0.1];
        let r = omega9_kernel_residual(&f, &point).unwrap();
        assert!(r.residual < 1e-3, "{r:?}");
        assert!(r.max_term > 1e-3);
    }
}
