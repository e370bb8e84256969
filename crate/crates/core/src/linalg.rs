//! Dense linear algebra: exact over Q, floating over C.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type QMatrix = Vec<Vec<BigRational>>;
pub type CMatrix = Vec<Vec<Complex64>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut QMatrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMatrix) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of the right null space {x : m x = 0}.
pub fn null_space(m: &QMatrix, cols: usize) -> Vec<Vec<BigRational>> {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); cols];
            v[f] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -w[row][f].clone();
            }
            v
        })
        .collect()
}

/// Exact determinant by Gaussian elimination over Q.
pub fn det_q(m: &QMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

pub fn matmul_q(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..k).fold(BigRational::zero(), |acc, l| {
                        if a[i][l].is_zero() || b[l][j].is_zero() {
                            acc
                        } else {
                            acc + &a[i][l] * &b[l][j]
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn identity_q(n: usize) -> QMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

pub fn matmul_c(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

pub fn identity_c(n: usize) -> CMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::zero() })
                .collect()
        })
        .collect()
}

/// Determinant by LU with partial pivoting.
pub fn det_c(m: &CMatrix) -> Complex64 {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))
            .unwrap();
        if a[p][c].norm() == 0.0 {
            return Complex64::zero();
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            if f == Complex64::zero() {
                continue;
            }
            for j in c..n {
                let t = f * a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Solves `m x = b`; `None` when a pivot falls below `tol`.
pub fn solve_c(m: &CMatrix, b: &[Complex64], tol: f64) -> Option<Vec<Complex64>> {
    let n = m.len();
    let mut a: CMatrix = m
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().total_cmp(&a[j][c].norm()))?;
        if a[p][c].norm() <= tol {
            return None;
        }
        a.swap(p, c);
        for i in 0..n {
            if i == c {
                continue;
            }
            let f = a[i][c] / a[c][c];
            for j in c..=n {
                let t = f * a[c][j];
                a[i][j] -= t;
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

pub fn inverse_c(m: &CMatrix, tol: f64) -> Option<CMatrix> {
    let n = m.len();
    let id = identity_c(n);
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Complex64> = id.iter().map(|r| r[j]).collect();
        cols.push(solve_c(m, &e, tol)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
}

/// Orthonormal basis of the column space, choosing columns greedily by
/// residual norm (pivoted Gram–Schmidt). Columns with residual below
/// `tol · max column norm` are treated as dependent.
pub fn column_basis(m: &CMatrix, tol: f64) -> Vec<Vec<Complex64>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut resid: Vec<Vec<Complex64>> =
        (0..cols).map(|j| (0..rows).map(|i| m[i][j]).collect()).collect();
    let scale = resid.iter().map(|c| norm(c)).fold(0.0, f64::max);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut used = vec![false; cols];
    loop {
        let best = (0..cols)
            .filter(|&j| !used[j])
            .max_by(|&a, &b| norm(&resid[a]).total_cmp(&norm(&resid[b])));
        let Some(j) = best else { break };
        let nj = norm(&resid[j]);
        if nj <= tol * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        used[j] = true;
        let q: Vec<Complex64> = resid[j].iter().map(|v| v / nj).collect();
        for (k, r) in resid.iter_mut().enumerate() {
            if used[k] {
                continue;
            }
            // two passes for numerical orthogonality
            for _ in 0..2 {
                let proj: Complex64 = q.iter().zip(r.iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, qa) in r.iter_mut().zip(&q) {
                    *x -= proj * qa;
                }
            }
        }
        basis.push(q);
    }
    basis
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a real square matrix (possibly complex).
pub fn real_eigenvalues(m: &[Vec<f64>]) -> Vec<Complex64> {
    let n = m.len();
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    mat.complex_eigenvalues().iter().copied().collect()
}

/// Eigenvector for a (simple) eigenvalue by inverse iteration.
pub fn eigenvector(m: &CMatrix, lambda: Complex64) -> Option<Vec<Complex64>> {
    let n = m.len();
    let scale = m
        .iter()
        .flat_map(|r| r.iter().map(|v| v.norm()))
        .fold(1.0, f64::max);
    let shift = lambda + Complex64::new(1e-10 * scale, 1e-10 * scale);
    let shifted: CMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { m[i][j] - shift } else { m[i][j] })
                .collect()
        })
        .collect();
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.3 - 0.05 * i as f64))
        .collect();
    for _ in 0..3 {
        let w = solve_c(&shifted, &v, 0.0)?;
        let nw = norm(&w);
        if !nw.is_finite() || nw == 0.0 {
            return None;
        }
        v = w.iter().map(|x| x / nw).collect();
    }
    Some(v)
}
