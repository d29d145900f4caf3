//! Finite-horizon construction of a slower normalizing sequence ā = a / v.
//!
//! Given a nondecreasing a and the uniform tail function j ↦ sup_i Σ_{k≥j} b_k^{(i)}/a_k,
//! pick n(1) < n(2) < … greedily with a_{n(k+1)} ≥ 2a_{n(k)} and tail(n(k)) ≤ 1/(k+1)³,
//! then interpolate v linearly in a between consecutive n(k).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlowerSequence {
    /// n(1), n(2), … (1-based indices).
    pub levels: Vec<usize>,
    /// v(1), …, v(H).
    pub v: Vec<f64>,
    /// ā_m = a_m / v(m).
    pub ubar_a: Vec<f64>,
    /// First index past the last level; v is held constant from here on because the
    /// next level lies beyond the horizon.
    pub held_from: Option<usize>,
}

/// j ↦ max_i Σ_{k ≥ j} b_k^{(i)} / a_k over a finite family, plus an optional
/// per-sequence bound on the part beyond the horizon.
pub fn sup_tails(b: &[Vec<f64>], a: &[f64], beyond: Option<&[f64]>) -> Result<Vec<f64>> {
    let h = a.len();
    let mut out = vec![0.0f64; h];
    for (i, seq) in b.iter().enumerate() {
        if seq.len() != h {
            return Err(Error::InvalidArgument(format!(
                "sequence {i} has length {}, expected {h}",
                seq.len()
            )));
        }
        let mut acc = beyond.map_or(0.0, |r| r[i]);
        for j in (0..h).rev() {
            acc += seq[j] / a[j];
            out[j] = out[j].max(acc);
        }
    }
    Ok(out)
}

/// Builds ā from `a` and the uniform tails. With `levels = Some(k)` the construction
/// must find k levels inside the horizon; otherwise as many as fit (at least one).
pub fn slower_sequence(tails: &[f64], a: &[f64], levels: Option<usize>) -> Result<SlowerSequence> {
    let h = a.len();
    if h == 0 || tails.len() != h {
        return Err(Error::InvalidArgument(format!(
            "tails and a must have the same positive length, got {} and {h}",
            tails.len()
        )));
    }
    if a[0] <= 0.0 || a.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Monotonicity("a must be positive and nondecreasing".into()));
    }
    if tails.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Monotonicity("sup-tail function must be nonincreasing".into()));
    }
    let bound = |k: usize| 1.0 / ((k + 1) as f64).powi(3);

    let mut picks: Vec<usize> = Vec::new();
    let mut j = 0;
    loop {
        let k = picks.len() + 1;
        if levels.is_some_and(|want| picks.len() == want) {
            break;
        }
        let found = (j..h).find(|&i| tails[i] <= bound(k) && picks.last().is_none_or(|&prev| a[i] >= 2.0 * a[prev]));
        match found {
            Some(i) => {
                picks.push(i);
                j = i + 1;
            }
            None if levels.is_none() && !picks.is_empty() => break,
            None => return Err(Error::HorizonExhausted { k }),
        }
    }

    let mut v = vec![1.0; h];
    for w in picks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        for m in lo + 1..=hi {
            v[m] = v[lo] + (a[m] - a[lo]) / a[hi];
        }
    }
    let last = *picks.last().expect("at least one level");
    let held_from = (last + 1 < h).then_some(last + 2);
    for m in last + 1..h {
        v[m] = v[last];
    }
    let ubar_a = a.iter().zip(&v).map(|(x, w)| x / w).collect();
    Ok(SlowerSequence {
        levels: picks.into_iter().map(|i| i + 1).collect(),
        v,
        ubar_a,
        held_from,
    })
}
