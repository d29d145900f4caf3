//! Dyadic blocks of a summable weight sequence and the power-moment bound built on them.
//!
//! With T_n = Σ_{k ≥ n} u_k and U = T_1, block N_b collects the n with
//! 2^{−b} U < T_n ≤ 2^{−b+1} U. All comparisons against 2^{−b} U are exact.

use serde::{Deserialize, Serialize};

use super::BoundValue;
use crate::error::{Error, Result};

/// Analytic bound on Σ_{k > horizon} u_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TailBound {
    Zero,
    /// u_{k+1} ≤ ratio · u_k beyond the horizon, so the remainder is at most u_H r/(1 − r).
    Geometric {
        ratio: f64,
    },
}

impl TailBound {
    pub fn remainder(&self, last: f64) -> Result<f64> {
        match *self {
            TailBound::Zero => Ok(0.0),
            TailBound::Geometric { ratio } => {
                if !(0.0..1.0).contains(&ratio) {
                    return Err(Error::InvalidArgument(format!(
                        "geometric ratio must lie in [0, 1), got {ratio}"
                    )));
                }
                Ok(last * ratio / (1.0 - ratio))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub b: u32,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub u: Vec<f64>,
    pub tail: TailBound,
    /// Σ_{k > horizon} u_k bound used in every T_n.
    pub remainder: f64,
    pub total: f64,
    /// T_1, …, T_H.
    pub tails: Vec<f64>,
    /// b(1), …, b(H).
    pub b_of: Vec<u32>,
    /// Nonempty blocks in increasing b.
    pub blocks: Vec<Block>,
}

impl BlockPartition {
    pub fn horizon(&self) -> usize {
        self.u.len()
    }

    /// T_n for 1 ≤ n ≤ horizon.
    pub fn tail_at(&self, n: usize) -> f64 {
        self.tails[n - 1]
    }

    pub fn b(&self, n: usize) -> u32 {
        self.b_of[n - 1]
    }

    pub fn block(&self, b: u32) -> Option<&Block> {
        self.blocks.iter().find(|blk| blk.b == b)
    }
}

/// ⌊log₂(num/den)⌋ for positive finite floats, exact.
pub fn floor_log2_ratio(num: f64, den: f64) -> i64 {
    let (mn, en) = libm::frexp(num);
    let (md, ed) = libm::frexp(den);
    i64::from(en - ed) - i64::from(mn < md)
}

/// Smallest b ≥ 1 with t > 2^{−b} total, given 0 < t ≤ total.
fn level(t: f64, total: f64) -> u32 {
    let guess = (floor_log2_ratio(total, t) + 1).max(1) as i32;
    let mut b = (guess - 1).max(1);
    while !(t > libm::ldexp(total, -b)) {
        b += 1;
    }
    b as u32
}

pub fn block_partition(u: &[f64], tail: TailBound) -> Result<BlockPartition> {
    if u.is_empty() {
        return Err(Error::InvalidArgument("weight sequence is empty".into()));
    }
    if let Some((k, w)) = u.iter().enumerate().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "weight u_{} = {w} is not a nonnegative finite number",
            k + 1
        )));
    }
    let remainder = tail.remainder(*u.last().unwrap())?;
    let mut tails = vec![0.0; u.len()];
    let mut acc = remainder;
    for k in (0..u.len()).rev() {
        acc += u[k];
        tails[k] = acc;
    }
    let total = tails[0];
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "total weight U = {total} must be positive and finite"
        )));
    }
    if let Some(n) = tails.iter().position(|t| *t <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tail sum vanishes from n = {}; blocks would be unbounded",
            n + 1
        )));
    }
    let b_of: Vec<u32> = tails.iter().map(|&t| level(t, total)).collect();
    let mut blocks: Vec<Block> = Vec::new();
    for (i, &b) in b_of.iter().enumerate() {
        match blocks.last_mut() {
            Some(last) if last.b == b => last.end = i + 1,
            _ => blocks.push(Block {
                b,
                start: i + 1,
                end: i + 1,
            }),
        }
    }
    Ok(BlockPartition {
        u: u.to_vec(),
        tail,
        remainder,
        total,
        tails,
        b_of,
        blocks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerNm {
    pub m: usize,
    pub b_m: u32,
    /// min N_{b(m)}.
    pub n_m: usize,
    /// min{n : log₂(U/T_n) ≥ ⌊log₂(U/T_m)⌋}.
    pub closed_form: usize,
}

pub fn power_nm(partition: &BlockPartition, m: usize) -> Result<PowerNm> {
    if m == 0 || m > partition.horizon() {
        return Err(Error::InvalidArgument(format!(
            "m = {m} outside 1..={}",
            partition.horizon()
        )));
    }
    let b_m = partition.b(m);
    let n_m = partition
        .block(b_m)
        .map(|blk| blk.start)
        .expect("m lies in its own block");
    let u = partition.total;
    let target = floor_log2_ratio(u, partition.tail_at(m));
    // floor_log2_ratio(U, T_n) is nondecreasing in n.
    let closed_form = partition.tails.partition_point(|&t| floor_log2_ratio(u, t) < target) + 1;
    if closed_form != n_m {
        return Err(Error::Inconsistent(format!(
            "block minimum {n_m} and closed-form index {closed_form} disagree at m = {m}"
        )));
    }
    Ok(PowerNm {
        m,
        b_m,
        n_m,
        closed_form,
    })
}

fn check_sequences(a: &[f64], ubar_a: &[f64], horizon: usize) -> Result<()> {
    if a.len() < horizon || ubar_a.len() < horizon {
        return Err(Error::InvalidArgument(format!(
            "a and ubar_a need at least {horizon} entries, got {} and {}",
            a.len(),
            ubar_a.len()
        )));
    }
    for k in 0..horizon {
        if !(ubar_a[k] > 0.0 && a[k] >= ubar_a[k]) {
            return Err(Error::Monotonicity(format!(
                "need 0 < ubar_a_k <= a_k at k = {}, got {} and {}",
                k + 1,
                ubar_a[k],
                a[k]
            )));
        }
        if k > 0 {
            if a[k] < a[k - 1] {
                return Err(Error::Monotonicity(format!("a decreases at k = {}", k + 1)));
            }
            if ubar_a[k] < ubar_a[k - 1] {
                return Err(Error::Monotonicity(format!("ubar_a decreases at k = {}", k + 1)));
            }
            if ubar_a[k] * a[k - 1] > ubar_a[k - 1] * a[k] * (1.0 + 1e-14) {
                return Err(Error::Monotonicity(format!("ubar_a/a increases at k = {}", k + 1)));
            }
        }
    }
    Ok(())
}

/// (C/ε^q)(T_m + (ā_{n_m}/a_{n_m})^q U).
pub fn power_bound(
    partition: &BlockPartition,
    a: &[f64],
    ubar_a: &[f64],
    m: usize,
    epsilon: f64,
    cq: f64,
    q: f64,
) -> Result<BoundValue> {
    if !(q > 2.0) {
        return Err(Error::InvalidArgument(format!("q must exceed 2, got {q}")));
    }
    for (name, v) in [("epsilon", epsilon), ("Cq", cq)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    check_sequences(a, ubar_a, partition.horizon())?;
    let nm = power_nm(partition, m)?;
    let ratio = ubar_a[nm.n_m - 1] / a[nm.n_m - 1];
    let log_prefactor = cq.ln() - q * epsilon.ln();
    let terms = vec![partition.tail_at(m).ln(), q * ratio.ln() + partition.total.ln()];
    Ok(BoundValue::from_terms(
        log_prefactor,
        terms,
        // Both T_m and U already contain the remainder bound, so it is part of the value.
        partition.remainder * (1.0 + ratio.powf(q)) * log_prefactor.exp(),
    ))
}
