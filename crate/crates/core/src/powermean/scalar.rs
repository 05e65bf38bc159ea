use crate::error::{Error, Result};

/// Scalar power mean m_p(x) = ((1/T) sum x_i^p)^(1/p), with the usual limit
/// cases: p = 0 geometric, p = -inf min, p = +inf max.
///
/// Entries must be nonnegative, and strictly positive when p <= 0. The
/// computation factors out the extreme entry so large |p| neither overflows
/// nor underflows: ratios are at most 1 before powering.
pub fn scalar_power_mean(xs: &[f64], p: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter(
            "power mean of an empty tuple".into(),
        ));
    }
    for (i, &x) in xs.iter().enumerate() {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::NonPositiveEntry { index: i, value: x });
        }
        if x == 0.0 && p <= 0.0 {
            return Err(Error::NonPositiveEntry { index: i, value: x });
        }
    }
    let t = xs.len() as f64;
    if p == f64::NEG_INFINITY {
        return Ok(xs.iter().copied().fold(f64::INFINITY, f64::min));
    }
    if p == f64::INFINITY {
        return Ok(xs.iter().copied().fold(0.0, f64::max));
    }
    if p == 0.0 {
        let log_mean = xs.iter().map(|&x| x.ln()).sum::<f64>() / t;
        return Ok(log_mean.exp());
    }
    // Anchor at the entry that dominates the sum: max for p > 0, min for
    // p < 0. Every ratio is then <= 1.
    let anchor = if p > 0.0 {
        xs.iter().copied().fold(0.0, f64::max)
    } else {
        xs.iter().copied().fold(f64::INFINITY, f64::min)
    };
    if anchor == 0.0 {
        // p > 0 with all entries zero
        return Ok(0.0);
    }
    let sum: f64 = xs.iter().map(|&x| (x / anchor).powf(p)).sum();
    Ok(anchor * (sum / t).powf(1.0 / p))
}
