//! Finite-difference weights and mixed-partial application.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

/// Default cap on distinct function evaluations for one operator application.
pub const MAX_EVALUATIONS: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FdError {
    #[error("StencilOverflow: {needed} evaluations exceed the cap {cap}")]
    StencilOverflow { needed: usize, cap: usize },
}

/// Fornberg's algorithm: `w[k][j]` is the weight of node `x[j]` for the
/// k-th derivative at `z`, for k = 0..=m.
pub fn fornberg_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Central stencil on the unit grid for the `order`-th derivative with
/// even accuracy `accuracy`; zero weights are dropped.
pub fn central_stencil(order: u32, accuracy: u32) -> Vec<(i64, f64)> {
    if order == 0 {
        return vec![(0, 1.0)];
    }
    assert!(accuracy >= 2 && accuracy % 2 == 0, "accuracy must be even");
    let points = 2 * ((order as i64 + 1) / 2) - 1 + accuracy as i64;
    let r = (points - 1) / 2;
    let nodes: Vec<f64> = (-r..=r).map(|i| i as f64).collect();
    let w = fornberg_weights(0.0, &nodes, order as usize);
    (-r..=r)
        .zip(&w[order as usize])
        .filter(|(_, &v)| v.abs() > 1e-14)
        .map(|(i, &v)| (i, v))
        .collect()
}

/// Accuracy order used for an operator of total order `n`.
pub fn accuracy_for(n: u32) -> u32 {
    2 * n.div_ceil(2).max(1)
}

/// `eps^(1/(order+accuracy))` scaled to the point.
pub fn default_step(order: u32, accuracy: u32, point: &[f64]) -> f64 {
    let scale = point.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    f64::EPSILON.powf(1.0 / (order + accuracy) as f64) * scale
}

/// A constant-coefficient operator Σ c_m ∂^m.
pub type OperatorTerms = Vec<(Vec<u32>, Complex64)>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdResult {
    pub value: Complex64,
    /// largest single |c_m ∂^m f| estimate
    pub max_term: f64,
    pub evaluations: usize,
}

impl FdResult {
    pub fn relative(&self) -> f64 {
        if self.max_term == 0.0 {
            self.value.norm()
        } else {
            self.value.norm() / self.max_term
        }
    }
}

/// Tensor-product stencil for ∂^e: offsets (in steps) with weights (unscaled).
fn mixed_stencil(exps: &[u32], accuracy: u32) -> Vec<(Vec<i64>, f64)> {
    let mut out = vec![(vec![0i64; exps.len()], 1.0)];
    for (d, &k) in exps.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let st = central_stencil(k, accuracy);
        out = out
            .into_iter()
            .flat_map(|(off, w)| {
                st.iter().map(move |&(i, v)| {
                    let mut o = off.clone();
                    o[d] = i;
                    (o, w * v)
                })
            })
            .collect();
    }
    out
}

/// Applies Σ c_m ∂^m to `f` at `point` with uniform step `h`, sharing
/// function values across terms. Evaluations run in parallel; the final
/// sums are taken in a fixed order.
pub fn apply_operator<F>(
    terms: &OperatorTerms,
    f: F,
    point: &[f64],
    h: f64,
    accuracy: u32,
    cap: usize,
) -> Result<FdResult, FdError>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let stencils: Vec<_> = terms
        .iter()
        .map(|(e, c)| (mixed_stencil(e, accuracy), *c, e.iter().sum::<u32>()))
        .collect();
    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut needed = 0usize;
    for (st, _, _) in &stencils {
        for (off, _) in st {
            if !index.contains_key(off) {
                index.insert(off.clone(), needed);
                needed += 1;
                if needed > cap {
                    return Err(FdError::StencilOverflow { needed, cap });
                }
            }
        }
    }
    let offsets: Vec<&Vec<i64>> = {
        let mut v = vec![None; needed];
        for (off, &i) in &index {
            v[i] = Some(off);
        }
        v.into_iter().map(Option::unwrap).collect()
    };
    let values: Vec<Complex64> = offsets
        .par_iter()
        .map(|off| {
            let x: Vec<f64> = point
                .iter()
                .zip(off.iter())
                .map(|(p, &o)| p + o as f64 * h)
                .collect();
            f(&x)
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut max_term = 0.0f64;
    for (st, c, order) in &stencils {
        let scale = h.powi(*order as i32);
        let d: Complex64 = st
            .iter()
            .map(|(off, w)| values[index[off]] * *w)
            .sum::<Complex64>()
            / scale;
        let t = c * d;
        max_term = max_term.max(t.norm());
        total += t;
    }
    Ok(FdResult {
        value: total,
        max_term,
        evaluations: needed,
    })
}

/// Single mixed partial ∂^e f at `point`.
pub fn mixed_partial<F>(f: F, point: &[f64], exps: &[u32], h: f64, accuracy: u32) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let terms = vec![(exps.to_vec(), Complex64::new(1.0, 0.0))];
    apply_operator(&terms, f, point, h, accuracy, usize::MAX)
        .expect("no cap")
        .value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_weights() {
        let st = central_stencil(1, 2);
        assert_eq!(st, vec![(-1, -0.5), (1, 0.5)]);
        let st = central_stencil(2, 2);
        assert_eq!(st, vec![(-1, 1.0), (0, -2.0), (1, 1.0)]);
        let st = central_stencil(1, 4);
        let want = [(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];
        for ((i, w), (j, v)) in st.iter().zip(want) {
            assert_eq!(*i, j);
            assert!((w - v).abs() < 1e-14);
        }
    }

    #[test]
    fn stencils_are_exact_on_polynomials() {
        for k in 1..=6u32 {
            for acc in [2u32, 4, 6] {
                let st = central_stencil(k, acc);
                // exact for x^d, d < k + acc
                for d in 0..k + acc {
                    let got: f64 = st.iter().map(|&(i, w)| w * (i as f64).powi(d as i32)).sum();
                    let want = if d == k { (1..=k).product::<u32>() as f64 } else { 0.0 };
                    assert!((got - want).abs() < 1e-8 * want.max(1.0), "k={k} acc={acc} d={d}");
                }
            }
        }
    }

    #[test]
    fn mixed_partial_of_exponential() {
        let f = |x: &[f64]| Complex64::new((x[0] + 2.0 * x[1]).exp(), 0.0);
        let p = [0.3, -0.2];
        let h = default_step(2, 4, &p);
        let d = mixed_partial(f, &p, &[1, 1], h, 4);
        let want = 2.0 * (0.3f64 - 0.4).exp();
        assert!((d.re - want).abs() < 1e-8);
    }

    #[test]
    fn overflow_is_reported() {
        let terms = vec![(vec![1u32; 8], Complex64::new(1.0, 0.0))];
        let err = apply_operator(&terms, |_| Complex64::new(0.0, 0.0), &[0.0; 8], 0.1, 8, 1000)
            .unwrap_err();
        assert!(matches!(err, FdError::StencilOverflow { .. }));
    }
}
