//! The epoch series 2 Σ_{n ≥ n_m} (1 + λσ 2^{2^{n−1}}) exp(−cλz 2^n ln 2) and the
//! single-block exponential inequality it is assembled from.

use std::f64::consts::LN_2;

use super::epoch::epoch_index;
use super::BoundValue;
use crate::error::{Error, Result};
use crate::numeric::log_add_exp;

const MAX_EPOCH: u32 = 1000;
const RELATIVE_CUTOFF: f64 = 1e-16;

fn check_positive(pairs: &[(&str, f64)]) -> Result<()> {
    for (name, v) in pairs {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(())
}

/// ℓ_n = ln(1 + λσ 2^{2^{n−1}}) − cλz 2^n ln 2, evaluated as
/// ln(2^{−2^{n−1}} + λσ) − (cλz − 1/2) 2^n ln 2 to avoid cancellation.
pub fn kmt_log_term(lambda: f64, sigma: f64, z: f64, c: f64, n: u32) -> f64 {
    let half = 2f64.powi(n as i32 - 1) * LN_2;
    log_add_exp(-half, (lambda * sigma).ln()) - (c * lambda * z - 0.5) * 2.0 * half
}

/// Evaluates the epoch series starting at n_m.
///
/// The series diverges exactly when cλz ≤ 1/2. Otherwise terms are summed until the
/// remainder bound 2(1 + λσ) e^{−κ}/(1 − e^{−κ}), κ = (cλz − 1/2) 2^{N+1} ln 2, drops
/// below 1e−16 of the partial sum; that remainder bound is kept as `truncation_bound`.
pub fn kmt_exponential_bound(lambda: f64, sigma: f64, z: f64, m: u64, c: f64) -> Result<BoundValue> {
    check_positive(&[("lambda", lambda), ("sigma", sigma), ("z", z), ("c", c)])?;
    let n_m = epoch_index(m)?;
    let rate = c * lambda * z;
    if rate <= 0.5 {
        return Ok(BoundValue::divergent());
    }
    let excess = rate - 0.5;
    let log_front = (lambda * sigma).ln_1p();
    let mut terms = Vec::new();
    let mut running = f64::NEG_INFINITY;
    let mut remainder = f64::INFINITY;
    let mut n = n_m;
    while n <= MAX_EPOCH {
        let term = kmt_log_term(lambda, sigma, z, c, n);
        terms.push(term);
        running = log_add_exp(running, term);
        let kappa = excess * 2f64.powi(n as i32 + 1) * LN_2;
        // ln of (1+λσ) e^{−κ}/(1−e^{−κ}), prefactor 2 applied below.
        let log_rem = log_front - kappa - (-(-kappa).exp()).ln_1p();
        remainder = log_rem;
        if log_rem < running + RELATIVE_CUTOFF.ln() {
            break;
        }
        n += 1;
    }
    Ok(BoundValue::from_terms(LN_2, terms, 2.0 * remainder.exp()))
}

/// 1 + λ√n σ: the bound on E exp(cλ max_k |Λ_k|) over a block of n variables.
pub fn sakhanenko_exp_mgf_bound(lambda: f64, n: u64, sigma: f64) -> Result<f64> {
    check_positive(&[("lambda", lambda), ("sigma", sigma)])?;
    if n == 0 {
        return Err(Error::InvalidArgument("block length must be at least 1".into()));
    }
    Ok(1.0 + lambda * (n as f64).sqrt() * sigma)
}

/// (1 + λ√n σ) e^{−cλz}: the Markov tail bound derived from the MGF bound.
pub fn sakhanenko_exp_tail_bound(lambda: f64, n: u64, sigma: f64, z: f64, c: f64) -> Result<f64> {
    check_positive(&[("z", z), ("c", c)])?;
    Ok(sakhanenko_exp_mgf_bound(lambda, n, sigma)? * (-c * lambda * z).exp())
}
