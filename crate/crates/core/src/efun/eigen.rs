use rayon::prelude::*;
use serde::Serialize;

use super::series::f_kernel;
use super::{check_range, EfunError};
use crate::quad::{integrate_box, QuadConfig};
use crate::testfn::MultiFn;

pub const COMPATIBILITY_TOL: f64 = 1e-10;
pub const BOUNDARY_TOL: f64 = 1e-6;

fn substitute(x0: &[f64], mask: usize, x: &[f64], scope: &[usize]) -> Vec<f64> {
    let mut y = x.to_vec();
    for (b, &i) in scope.iter().enumerate() {
        if mask >> b & 1 == 1 {
            y[i] = x0[i];
        }
    }
    y
}

/// [f]_r(x) = Σ_{S, |S| ≤ r} (−1)^{|S|} f(x with x_S ← x⁽⁰⁾_S), S over all coordinates.
pub fn bracket_apply(f: &MultiFn, x0: &[f64], r: usize, x: &[f64]) -> Result<f64, EfunError> {
    let n = x.len();
    if x0.len() != n {
        return Err(EfunError::BadInput(format!("base point has {} coordinates, x has {n}", x0.len())));
    }
    check_range("r", r, 0, n)?;
    let scope: Vec<usize> = (0..n).collect();
    Ok((0usize..1 << n)
        .filter(|m| m.count_ones() as usize <= r)
        .map(|m| {
            let s = if m.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            s * f.eval(&substitute(x0, m, x, &scope))
        })
        .sum())
}

/// Inclusion–exclusion over every subset of `scope`.
pub fn bracket_scoped(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], scope: &[usize], x: &[f64]) -> f64 {
    (0usize..1 << scope.len())
        .map(|m| {
            let s = if m.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            s * f(&substitute(x0, m, x, scope))
        })
        .sum()
}

/// φ_(h) lives on x_h = x⁽⁰⁾_h; it is evaluated with that coordinate pinned.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub x0: Vec<f64>,
    pub phi: Vec<MultiFn>,
}

impl BoundaryData {
    pub fn new(x0: Vec<f64>, phi: Vec<MultiFn>) -> Result<Self, EfunError> {
        if x0.len() != phi.len() {
            return Err(EfunError::BadInput(format!(
                "{} boundary functions for {} coordinates",
                phi.len(),
                x0.len()
            )));
        }
        Ok(BoundaryData { x0, phi })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// φ_(h) at x (0-based h), with x_h replaced by x⁽⁰⁾_h.
    pub fn phi_at(&self, h: usize, x: &[f64]) -> f64 {
        let mut y = x.to_vec();
        y[h] = self.x0[h];
        self.phi[h].eval(&y)
    }

    /// φ_(h)|_{x_l = x⁽⁰⁾_l} = φ_(l)|_{x_h = x⁽⁰⁾_h} at every sample point.
    pub fn check_compatible(&self, samples: &[Vec<f64>]) -> Result<(), EfunError> {
        let n = self.dim();
        let mut pts: Vec<&[f64]> = vec![&self.x0];
        pts.extend(samples.iter().map(|p| p.as_slice()));
        for p in pts {
            for h in 0..n {
                for l in h + 1..n {
                    let mut y = p.to_vec();
                    y[h] = self.x0[h];
                    y[l] = self.x0[l];
                    let a = self.phi[h].eval(&y);
                    let b = self.phi[l].eval(&y);
                    if (a - b).abs() > COMPATIBILITY_TOL * a.abs().max(b.abs()).max(1.0) {
                        return Err(EfunError::IncompatibleBoundaryData {
                            h: h + 1,
                            l: l + 1,
                            point: y,
                            diff: (a - b).abs(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Σ_h [φ_(h)]_{h−1}, the bracket for φ_(h) running over the first h−1 coordinates.
    pub fn boundary_part(&self, x: &[f64]) -> f64 {
        (0..self.dim())
            .map(|h| {
                let scope: Vec<usize> = (0..h).collect();
                bracket_scoped(&|y: &[f64]| self.phi_at(h, y), &self.x0, &scope, x)
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPoint {
    pub x: Vec<f64>,
    pub u: f64,
    pub quad_error: f64,
    pub pde_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution {
    pub n: usize,
    pub points: Vec<EigenPoint>,
    pub boundary_error: f64,
    pub max_pde_residual: f64,
    pub fd_step: f64,
    pub residual_tol: f64,
    pub boundary_ok: bool,
    pub residual_ok: bool,
}

/// Solver for ∂ⁿu/∂x₁⋯∂x_n + u = λ with u|_{x_i = x⁽⁰⁾_i} = φ_(i).
pub struct EigenProblem<'a> {
    pub lambda: &'a MultiFn,
    pub data: &'a BoundaryData,
    pub quad: QuadConfig,
}

impl<'a> EigenProblem<'a> {
    pub fn new(lambda: &'a MultiFn, data: &'a BoundaryData) -> Self {
        EigenProblem {
            lambda,
            data,
            quad: QuadConfig::with_tol(1e-14, 1e-12),
        }
    }

    /// u(x) = v(x) + Σ_h [φ_(h)]_{h−1}(x), v = ∫_{x⁽⁰⁾}^{x} G(α) F_n(x − α) dα.
    pub fn u(&self, x: &[f64]) -> Result<(f64, f64), EfunError> {
        let n = self.data.dim();
        let g = |a: &[f64]| -> f64 {
            let d: Vec<f64> = x.iter().zip(a).map(|(xi, ai)| xi - ai).collect();
            (self.lambda.eval(a) - self.data.boundary_part(a)) * f_kernel(n, &d)
        };
        let v = integrate_box(&g, &self.data.x0, x, &self.quad)?;
        Ok((v.value + self.data.boundary_part(x), v.error))
    }

    /// ∂ⁿu/∂x₁⋯∂x_n + u − λ at x by central first differences of step h.
    pub fn residual(&self, x: &[f64], h: f64) -> Result<f64, EfunError> {
        let n = x.len();
        let mut mixed = 0.0;
        for corner in 0usize..1 << n {
            let mut y = x.to_vec();
            let mut sign = 1.0;
            for (i, yi) in y.iter_mut().enumerate() {
                if corner >> i & 1 == 1 {
                    *yi += h;
                } else {
                    *yi -= h;
                    sign = -sign;
                }
            }
            mixed += sign * self.u(&y)?.0;
        }
        mixed /= (2.0 * h).powi(n as i32);
        Ok(mixed + self.u(x)?.0 - self.lambda.eval(x))
    }
}

/// Solves on the grid and checks boundary values and the PDE residual
/// (n = 2: step 1e−3, tolerance 1e−4; n = 3: step 1e−2, tolerance 5e−3).
pub fn eigen_solve(n: usize, lambda: &MultiFn, data: &BoundaryData, grid: &[Vec<f64>]) -> Result<EigenSolution, EfunError> {
    check_range("n", n, 2, 3)?;
    if data.dim() != n || grid.iter().any(|p| p.len() != n) {
        return Err(EfunError::BadInput(format!("dimension mismatch: expected {n} coordinates")));
    }
    data.check_compatible(grid)?;
    let (fd_step, residual_tol) = if n == 2 { (1e-3, 1e-4) } else { (1e-2, 5e-3) };
    let problem = EigenProblem::new(lambda, data);

    let points = grid
        .par_iter()
        .map(|x| {
            let (u, err) = problem.u(x)?;
            let r = problem.residual(x, fd_step)?;
            Ok(EigenPoint {
                x: x.clone(),
                u,
                quad_error: err,
                pde_residual: r.abs(),
            })
        })
        .collect::<Result<Vec<_>, EfunError>>()?;

    // boundary: project each grid point onto every hyperplane x_i = x⁽⁰⁾_i
    let boundary_error = grid
        .par_iter()
        .map(|x| {
            let mut worst = 0.0f64;
            for i in 0..n {
                let mut y = x.clone();
                y[i] = data.x0[i];
                let (u, _) = problem.u(&y)?;
                worst = worst.max((u - data.phi_at(i, &y)).abs());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>, EfunError>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let max_pde_residual = points.iter().map(|p| p.pde_residual).fold(0.0, f64::max);
    Ok(EigenSolution {
        n,
        points,
        boundary_error,
        max_pde_residual,
        fd_step,
        residual_tol,
        boundary_ok: boundary_error <= BOUNDARY_TOL,
        residual_ok: max_pde_residual <= residual_tol,
    })
}

/// Tensor grid with `k` points per axis on [lo, hi]^n.
pub fn tensor_grid(n: usize, lo: f64, hi: f64, k: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = if k <= 1 {
        vec![hi]
    } else {
        (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
    };
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mf(s: &str) -> MultiFn {
        s.parse().unwrap()
    }

    #[test]
    fn bracket_examples() {
        let f = mf("sin:1,2");
        assert_eq!(bracket_apply(&f, &[0.3, 0.1], 0, &[0.7, 0.2]).unwrap(), f.eval(&[0.7, 0.2]));
        let v = bracket_apply(&mf("prod"), &[0.0, 0.0], 2, &[0.6, 1.5]).unwrap();
        assert!((v - 0.9).abs() < 1e-15);
        let v = bracket_apply(&mf("affine:0,1,1"), &[1.0, 1.0], 1, &[0.4, 2.5]).unwrap();
        assert!((v + 2.0).abs() < 1e-15);
        assert_eq!(bracket_apply(&f, &[0.0, 0.0], 3, &[0.0, 0.0]).unwrap_err().code(), "RangeError");
    }

    #[test]
    fn boundary_part_reproduces_data() {
        // compatible data: φ_(h) = restriction of a common function
        let data = BoundaryData::new(vec![0.2, -0.1, 0.3], vec![mf("exp:1,0.5,-1"); 3]).unwrap();
        for x in tensor_grid(3, -0.5, 0.8, 3) {
            for i in 0..3 {
                let mut y = x.clone();
                y[i] = data.x0[i];
                assert!((data.boundary_part(&y) - data.phi_at(i, &y)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn unit_data_gives_kernel() {
        let data = BoundaryData::new(vec![0.0, 0.0], vec![mf("const:1"), mf("const:1")]).unwrap();
        let grid = tensor_grid(2, 0.3, 1.2, 3);
        let sol = eigen_solve(2, &mf("const:0"), &data, &grid).unwrap();
        for p in &sol.points {
            assert!((p.u - f_kernel(2, &p.x)).abs() < 1e-6, "{:?}", p);
        }
        assert!(sol.boundary_ok && sol.residual_ok, "{sol:?}");
    }

    #[test]
    fn constant_rhs_zero_data() {
        let data = BoundaryData::new(vec![0.0, 0.0], vec![mf("const:0"), mf("const:0")]).unwrap();
        let grid = tensor_grid(2, 0.2, 1.0, 3);
        let sol = eigen_solve(2, &mf("const:1"), &data, &grid).unwrap();
        assert!(sol.boundary_ok && sol.residual_ok, "{sol:?}");
    }

    #[test]
    fn incompatible_rejected() {
        let data = BoundaryData::new(vec![0.0, 0.0], vec![mf("affine:0,0,1"), mf("affine:1,1,0")]).unwrap();
        let err = eigen_solve(2, &mf("const:0"), &data, &tensor_grid(2, 0.0, 1.0, 2)).unwrap_err();
        assert_eq!(err.code(), "IncompatibleBoundaryData");
    }

    #[test]
    fn three_dimensional() {
        let data = BoundaryData::new(vec![0.0; 3], vec![mf("cos:1,1,1"); 3]).unwrap();
        let grid = vec![vec![0.5, 0.4, 0.6]];
        let sol = eigen_solve(3, &mf("affine:0.5,1,0,0"), &data, &grid).unwrap();
        assert!(sol.boundary_ok && sol.residual_ok, "{sol:?}");
    }
}
