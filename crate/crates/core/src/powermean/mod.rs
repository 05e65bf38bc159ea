//! Power means of scalars and of shifted layer Laplacians.

mod dense;
mod krylov;
mod scalar;
mod solver;

pub use dense::{dense_power_mean, dense_power_mean_laplacian};
pub use krylov::{pksm_apply, PksmInfo};
pub use scalar::scalar_power_mean;
pub use solver::{power_mean_eigs, EigenSolveResult, PowerMeanOp, PowerMeanSolveSpec};

use crate::error::{Error, Result};

/// Exact-recovery condition for the planted partition in expectation: with
/// per-layer assortativity rho_t, the informative eigenvectors sit below the
/// uninformative bulk of L_p if and only if
///
/// ```text
/// m_p(mu + eps * 1) < 1 + eps,    mu_t = 1 - rho_t.
/// ```
///
/// For p = -inf / +inf the shift cancels and the condition degenerates to
/// min(mu) < 1 / max(mu) < 1: one good layer suffices / every layer must be
/// good.
pub fn recovery_condition(p: f64, eps: f64, rhos: &[f64]) -> Result<bool> {
    if rhos.is_empty() {
        return Err(Error::InvalidParameter(
            "recovery condition needs at least one layer".into(),
        ));
    }
    for &r in rhos {
        if !r.is_finite() || !(-1.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "assortativity {r} outside [-1, 1]"
            )));
        }
    }
    if p == f64::NEG_INFINITY {
        return Ok(rhos.iter().any(|&r| r > 0.0));
    }
    if p == f64::INFINITY {
        return Ok(rhos.iter().all(|&r| r > 0.0));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "finite nonnegative shift required, got {eps}"
        )));
    }
    let shifted: Vec<f64> = rhos.iter().map(|&r| 1.0 - r + eps).collect();
    // rho_t = 1 with eps = 0 puts a zero in the tuple; the mean's limit is 0,
    // which always satisfies the condition.
    if p <= 0.0 && shifted.iter().any(|&m| m == 0.0) {
        return Ok(true);
    }
    Ok(scalar_power_mean(&shifted, p)? < 1.0 + eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_mean_misses_borderline_pair() {
        // Second layer has p_in = 0: rho_2 = -1, mu = (0.2, 2.0),
        // m_1 = 1.1 >= 1.
        assert!(!recovery_condition(1.0, 0.0, &[0.8, -1.0]).unwrap());
    }

    #[test]
    fn harmonic_mean_recovers_borderline_pair() {
        let eps = 2.0f64.ln();
        // m_{-1}(0.8931..., 2.6931...) ~ 1.3414 < 1.6931
        assert!(recovery_condition(-1.0, eps, &[0.8, -1.0]).unwrap());
    }

    #[test]
    fn minimum_rule_needs_one_good_layer() {
        assert!(recovery_condition(f64::NEG_INFINITY, 0.0, &[0.01, -0.9, -0.9]).unwrap());
        assert!(!recovery_condition(f64::NEG_INFINITY, 0.0, &[0.0, -0.5]).unwrap());
    }

    #[test]
    fn maximum_rule_needs_all_layers_good() {
        assert!(recovery_condition(f64::INFINITY, 0.0, &[0.2, 0.7]).unwrap());
        assert!(!recovery_condition(f64::INFINITY, 0.0, &[0.2, -0.1]).unwrap());
    }

    #[test]
    fn perfectly_assortative_layers_always_recover() {
        for p in [-10.0, -1.0, 0.0, 1.0, 10.0] {
            let eps = crate::graphs::shift_for(p);
            assert!(
                recovery_condition(p, eps, &[1.0, 1.0]).unwrap(),
                "p = {p}"
            );
        }
    }

    #[test]
    fn out_of_range_assortativity_rejected() {
        assert!(recovery_condition(1.0, 0.0, &[1.2]).is_err());
        assert!(recovery_condition(1.0, 0.0, &[-1.2]).is_err());
    }
}
