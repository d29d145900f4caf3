//! Moment-sum bounds: the polynomial coupling bound and the variance-difference sum
//! for Gaussians rescaled after upper truncation at k^{1/q}.

use serde::{Deserialize, Serialize};

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::serde_ext;

/// C_S Σ E|X_i|^q.
pub fn sakhanenko_poly_bound(q: f64, moments: &[f64], cs: f64) -> Result<f64> {
    if !(q > 2.0) {
        return Err(Error::InvalidArgument(format!("q must exceed 2, got {q}")));
    }
    if !(cs > 0.0 && cs.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "C_S must be positive and finite, got {cs}"
        )));
    }
    if let Some(bad) = moments.iter().find(|m| !(**m >= 0.0 && m.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "moment {bad} is not finite and nonnegative"
        )));
    }
    Ok(cs * moments.iter().sum::<f64>())
}

/// q/(q − 2): satisfies Σ_{k ≤ j} k^{−2/q} ≤ C_q (j + 1)^{1 − 2/q} for every j ≥ 1.
pub fn partial_sum_constant(q: f64) -> f64 {
    q / (q - 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceDiff {
    /// partial + tail_majorant.
    pub lhs: f64,
    /// Σ_{k=m}^{H} (σ − σ̃_k)² / k^{2/q}.
    pub partial: f64,
    /// Bound on the terms past the horizon: (2q/(q − 2)) E[|X|^q 1{|X|^q > H}].
    pub tail_majorant: f64,
    /// 4 C_q E[|X|^q 1{|X|^q > m}].
    #[serde(with = "serde_ext")]
    pub rhs: f64,
    pub holds: bool,
}

/// Σ_{k ≥ m} Var(Ỹ_k − Ŷ_k)/k^{2/q} against 4 C_q E[|X|^q 1{|X|^q > m}], where
/// σ̃_k² = Var(X 1{|X| ≤ k^{1/q}}) and Var(Ỹ_k − Ŷ_k) = (σ − σ̃_k)².
pub fn variance_diff_bound(spec: &DistributionSpec, q: f64, m: usize, cq: f64, horizon: usize) -> Result<VarianceDiff> {
    if !(q > 2.0) {
        return Err(Error::InvalidArgument(format!("q must exceed 2, got {q}")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if !(cq > 0.0) {
        return Err(Error::InvalidArgument(format!("C_q must be positive, got {cq}")));
    }
    if spec.ln_abs_moment(q)?.is_infinite() {
        return Err(Error::DivergentMoment { order: q });
    }
    let sigma = spec.std_dev();
    let horizon = horizon.max(m);
    let mut partial = 0.0;
    for k in m..=horizon {
        let kf = k as f64;
        let st = spec.truncated_variance(kf.powf(1.0 / q))?.sqrt();
        partial += (sigma - st).powi(2) / kf.powf(2.0 / q);
    }
    let tail_majorant = 2.0 * partial_sum_constant(q) * spec.tail_moment(q, horizon as f64)?;
    let lhs = partial + tail_majorant;
    let rhs = 4.0 * cq * spec.tail_moment(q, m as f64)?;
    Ok(VarianceDiff {
        lhs,
        partial,
        tail_majorant,
        rhs,
        holds: rhs - lhs >= -1e-12 * rhs.abs().max(1.0),
    })
}
