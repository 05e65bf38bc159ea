//! Dense matrix power means. This is the reference route: direct
//! eigendecompositions, no iterative approximation anywhere.

use crate::error::{Error, Result};
use crate::graphs::{dense_shifted_laplacian, MultilayerGraph};
use crate::linalg::{dense_sym_eig, sym_matrix_power, DenseSymMatrix};

/// ((1/T) sum A_i^p)^(1/p) for finite nonzero p; the log-Euclidean mean
/// exp((1/T) sum log A_i) for p = 0.
///
/// p < 0 requires every input to be positive definite. For p > 0 positive
/// semi-definite inputs are fine: fractional powers clamp roundoff-negative
/// eigenvalues at zero.
pub fn dense_power_mean(mats: &[DenseSymMatrix], p: f64) -> Result<DenseSymMatrix> {
    let first = mats
        .first()
        .ok_or_else(|| Error::InvalidParameter("power mean of zero matrices".into()))?;
    let n = first.n();
    if mats.iter().any(|m| m.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mats.iter().map(DenseSymMatrix::n).find(|&m| m != n).unwrap(),
        });
    }
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "matrix power mean requires finite p, got {p}"
        )));
    }
    let scale = 1.0 / mats.len() as f64;
    if p == 0.0 {
        let mut acc = DenseSymMatrix::zeros(n);
        for m in mats {
            let eig = dense_sym_eig(m)?;
            let lambda_min = eig.values.first().copied().unwrap_or(0.0);
            if lambda_min <= 1e-12 {
                return Err(Error::Singular { lambda_min });
            }
            acc.add_scaled(&eig.assemble(f64::ln), scale);
        }
        let eig = dense_sym_eig(&acc)?;
        return Ok(eig.assemble(f64::exp));
    }
    let mut acc = DenseSymMatrix::zeros(n);
    for m in mats {
        acc.add_scaled(&sym_matrix_power(m, p)?, scale);
    }
    sym_matrix_power(&acc, 1.0 / p)
}

/// Densely assembled power mean Laplacian of a whole graph: shifts every
/// layer's normalized Laplacian by `eps` and takes the matrix p-mean.
pub fn dense_power_mean_laplacian(
    graph: &MultilayerGraph,
    p: f64,
    eps: f64,
) -> Result<DenseSymMatrix> {
    let mats: Vec<DenseSymMatrix> = graph
        .layers()
        .iter()
        .map(|w| dense_shifted_laplacian(&DenseSymMatrix::from_sparse(w), eps))
        .collect::<Result<_>>()?;
    dense_power_mean(&mats, p)
}
