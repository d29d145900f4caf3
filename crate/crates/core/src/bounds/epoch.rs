//! Doubly exponential epochs: d(n) = 2^{2^n}, D(n) = d(1) + … + d(n), D(0) = 0.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest n with D(n) representable in `u128`.
pub const MAX_EXACT_EPOCH: u32 = 6;

/// log₂ d(n) = 2^n.
pub fn epoch_size_log2(n: u32) -> f64 {
    2f64.powi(n as i32)
}

/// D(n) as a big integer.
pub fn cumulative_exact(n: u32) -> BigUint {
    (1..=n).fold(BigUint::ZERO, |acc, k| acc + (BigUint::from(1u8) << (1usize << k)))
}

/// log₂ D(n) for n ≥ 1, without forming D(n).
pub fn cumulative_log2(n: u32) -> f64 {
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    // D(n) = d(n) (1 + D(n−1)/d(n)) and D(n−1)/d(n) ≤ 2^{2^{n−1}+1−2^n} is tiny past n = 4.
    let mut log2 = epoch_size_log2(1);
    for k in 2..=n {
        let top = epoch_size_log2(k);
        log2 = top + (2f64.powf(log2 - top)).ln_1p() / std::f64::consts::LN_2;
    }
    log2
}

fn cumulative_u128(n: u32) -> u128 {
    debug_assert!(n <= MAX_EXACT_EPOCH);
    (1..=n).map(|k| 1u128 << (1u32 << k)).sum()
}

/// n_m: the largest n with D(n − 1) + 1 ≤ m, for m ≥ 4.
pub fn epoch_index(m: u64) -> Result<u32> {
    if m < 4 {
        return Err(Error::InvalidArgument(format!("epoch index needs m >= 4, got {m}")));
    }
    let m = u128::from(m);
    // D(6) + 1 > u64::MAX, so the answer never exceeds 6.
    let mut n = 1;
    while n < MAX_EXACT_EPOCH && cumulative_u128(n) < m {
        n += 1;
    }
    Ok(n)
}

/// The index range {D(n−1)+1, …, D(n)} of epoch n, clipped at `len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpochBlock {
    pub epoch: u32,
    /// First index (1-based).
    pub start: usize,
    /// Last index (1-based, inclusive).
    pub end: usize,
    /// True when the epoch was cut short by `len`.
    pub truncated: bool,
}

impl EpochBlock {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }
}

/// Epochs covering {1, …, len}.
pub fn epoch_blocks(len: usize) -> Vec<EpochBlock> {
    let mut out = Vec::new();
    let mut start = 1usize;
    let mut n = 1u32;
    while start <= len {
        let size = if n < 6 { 1usize << (1u32 << n) } else { usize::MAX };
        let full_end = start.saturating_add(size - 1);
        out.push(EpochBlock {
            epoch: n,
            start,
            end: full_end.min(len),
            truncated: full_end > len,
        });
        start = full_end.saturating_add(1);
        n += 1;
    }
    out
}
