//! Lanczos approximation of A^p y for the shifted Laplacian.
//!
//! With A symmetric positive definite and p < 0, A^p y lives almost entirely
//! in a low-dimensional Krylov space K_s(A, y). The iteration builds an
//! orthonormal basis V_s of that space by the three-term recurrence, keeps
//! the recurrence coefficients as the tridiagonal H_s = V_s^T A V_s, and
//! reads off the candidate
//!
//! ```text
//! x_s = V_s (H_s)^p e_1 ||y||
//! ```
//!
//! The candidate sequence stalls once the Krylov space captures the action of
//! A^p on y, so the stopping rule compares consecutive candidates.

use crate::error::{Error, Result};
use crate::graphs::ShiftedLaplacianOp;
use crate::linalg::{axpy, dot, norm, sym_eig_small};

/// Norm below which a new Lanczos vector counts as a breakdown (the Krylov
/// space became invariant; the candidate is then exact in that subspace).
const BREAKDOWN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct PksmInfo {
    /// Krylov dimension actually used.
    pub dim: usize,
    pub converged: bool,
    /// Exact invariant subspace found before `dim` reached `max_dim`.
    pub breakdown: bool,
}

/// Approximates `(L_sym + eps I)^p y` for p < 0 without forming the matrix.
///
/// Full reorthogonalization keeps the basis orthonormal to machine precision;
/// dimensions are capped at `max_dim`, so the O(s^2 n) cost stays negligible
/// next to the matrix-vector products.
pub fn pksm_apply(
    a: &ShiftedLaplacianOp<'_>,
    y: &[f64],
    p: f64,
    tol: f64,
    max_dim: usize,
) -> Result<(Vec<f64>, PksmInfo)> {
    if !(p < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Krylov matrix powers are used for p < 0 only, got p = {p}; \
             nonnegative exponents take the dense route"
        )));
    }
    if !(tol > 0.0) || max_dim == 0 {
        return Err(Error::InvalidParameter(
            "Krylov solve needs tol > 0 and max_dim >= 1".into(),
        ));
    }
    let n = a.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let beta0 = norm(y);
    if beta0 == 0.0 {
        return Err(Error::InvalidParameter(
            "Krylov solve needs a nonzero right-hand side".into(),
        ));
    }
    let max_dim = max_dim.min(n);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_dim);
    basis.push(y.iter().map(|v| v / beta0).collect());
    let mut alphas: Vec<f64> = Vec::with_capacity(max_dim);
    let mut betas: Vec<f64> = Vec::with_capacity(max_dim);
    let mut w = vec![0.0; n];
    let mut x_prev: Option<Vec<f64>> = None;

    for step in 0..max_dim {
        a.apply(&basis[step], &mut w)?;
        let alpha = dot(&w, &basis[step]);
        axpy(-alpha, &basis[step], &mut w);
        if step > 0 {
            axpy(-betas[step - 1], &basis[step - 1], &mut w);
        }
        // Full reorthogonalization pass against the whole basis.
        for v in &basis {
            let c = dot(&w, v);
            axpy(-c, v, &mut w);
        }
        alphas.push(alpha);
        let beta = norm(&w);

        let x = candidate(&basis, &alphas, &betas, p, beta0)?;
        let converged = match &x_prev {
            Some(prev) => {
                let diff: f64 = x
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                diff <= tol * norm(&x)
            }
            None => false,
        };
        let breakdown = beta < BREAKDOWN_TOL;
        if converged || breakdown || step + 1 == max_dim {
            return Ok((
                x,
                PksmInfo {
                    dim: step + 1,
                    converged: converged || breakdown,
                    breakdown,
                },
            ));
        }
        x_prev = Some(x);
        betas.push(beta);
        basis.push(w.iter().map(|v| v / beta).collect());
    }
    unreachable!("loop exits via the convergence branch");
}

/// x_s = V_s (H_s)^p e_1 * beta0 with H_s the tridiagonal of the recurrence.
fn candidate(
    basis: &[Vec<f64>],
    alphas: &[f64],
    betas: &[f64],
    p: f64,
    beta0: f64,
) -> Result<Vec<f64>> {
    let s = alphas.len();
    let mut h = vec![0.0; s * s];
    for i in 0..s {
        h[i * s + i] = alphas[i];
        if i + 1 < s {
            h[i * s + i + 1] = betas[i];
            h[(i + 1) * s + i] = betas[i];
        }
    }
    let (vals, vecs) = sym_eig_small(s, &h);
    let lambda_min = vals[0];
    if lambda_min <= 1e-12 {
        // Cannot happen for a shifted Laplacian with eps > 0; a projected
        // matrix that lost definiteness means the operator itself is wrong.
        return Err(Error::Singular { lambda_min });
    }
    // coeffs = Q diag(vals^p) Q^T e_1 * beta0
    let mut coeffs = vec![0.0; s];
    for (lam, q) in vals.iter().zip(&vecs) {
        let f = lam.powf(p) * q[0] * beta0;
        for (c, qi) in coeffs.iter_mut().zip(q) {
            *c += f * qi;
        }
    }
    let n = basis[0].len();
    let mut x = vec![0.0; n];
    for (c, v) in coeffs.iter().zip(basis) {
        axpy(*c, v, &mut x);
    }
    Ok(x)
}
