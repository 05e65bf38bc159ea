//! Column-block utilities for the iterative eigensolver and for subspace
//! comparisons in tests.

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// y += alpha * x
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Relative threshold below which a column counts as linearly dependent.
const DEFLATION_TOL: f64 = 1e-10;

/// In-place modified Gram-Schmidt with one unconditional reorthogonalization
/// pass. Columns come out orthonormal in order; if a column collapses below
/// `1e-10` of its original norm the caller gets the offending index so it can
/// deflate or replace it. Contents are unspecified after an error.
pub fn orthonormalize(cols: &mut [Vec<f64>]) -> Result<()> {
    for j in 0..cols.len() {
        let original = norm(&cols[j]);
        if original == 0.0 {
            return Err(Error::RankDeficient { column: j });
        }
        for _pass in 0..2 {
            for i in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let c = dot(&head[i], &tail[0]);
                axpy(-c, &head[i], &mut tail[0]);
            }
        }
        let remaining = norm(&cols[j]);
        if remaining <= DEFLATION_TOL * original {
            return Err(Error::RankDeficient { column: j });
        }
        let inv = 1.0 / remaining;
        for x in cols[j].iter_mut() {
            *x *= inv;
        }
    }
    Ok(())
}

/// Eigendecomposition of a small dense symmetric matrix (row-major) by cyclic
/// Jacobi rotations. Returns eigenvalues ascending with matching orthonormal
/// eigenvector columns.
///
/// Used for the projected problems inside the matrix-free solver (tridiagonal
/// Krylov matrices, k x k Rayleigh quotients), keeping that path independent
/// of the dense reference eigensolver.
pub fn sym_eig_small(n: usize, a: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())).max(1.0);
    let tol = 1e-15 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                off = off.max(m[p * n + r].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = m[p * n + r];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[r * n + r];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + r];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + r] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[r * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[r * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkq = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkq;
                    q[k * n + r] = s * qkp + c * qkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values: Vec<f64> = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&c| (0..n).map(|r| q[r * n + c]).collect())
        .collect();
    (values, vectors)
}

/// Largest principal angle (radians) between the spans of two orthonormal
/// column sets of equal shape.
///
/// Computed through the sine form: the singular values of B - A (A^T B) are
/// exactly the sines of the principal angles, which stays accurate for tiny
/// angles where the cosine form loses digits.
pub fn max_principal_angle(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let k = a.len();
    if k == 0 || k != b.len() {
        return Err(Error::InvalidParameter(
            "principal angles need two nonempty column sets of equal width".into(),
        ));
    }
    let n = a[0].len();
    if a.iter().chain(b.iter()).any(|c| c.len() != n) {
        return Err(Error::InvalidParameter(
            "principal angles need columns of equal length".into(),
        ));
    }
    for set in [a, b] {
        for i in 0..k {
            for j in i..k {
                let d = dot(&set[i], &set[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                if (d - want).abs() > 1e-8 {
                    return Err(Error::InvalidParameter(
                        "principal angles require orthonormal inputs".into(),
                    ));
                }
            }
        }
    }
    // E = B - A (A^T B), column by column.
    let mut e: Vec<Vec<f64>> = b.to_vec();
    for col in e.iter_mut() {
        let coeffs: Vec<f64> = a.iter().map(|ac| dot(ac, col)).collect();
        for (ac, &c) in a.iter().zip(&coeffs) {
            axpy(-c, ac, col);
        }
    }
    // Largest singular value of E via the k x k Gram matrix.
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = dot(&e[i], &e[j]);
        }
    }
    let (vals, _) = sym_eig_small(k, &gram);
    let sin2 = vals.last().copied().unwrap_or(0.0).max(0.0);
    Ok(sin2.sqrt().min(1.0).asin())
}
