//! Partition schemes and evaluators for the right-hand sides of the nonasymptotic
//! coupling bounds.
//!
//! Universal constants (`c`, `C_S(q)`, `C(q)`, `C_q`) have no known numeric values;
//! they are explicit inputs. The value 1.0 used as a default by the CLI makes the
//! output a statement about bound shape only.

mod blocks;
mod epoch;
mod exponential;
mod slower;
mod variance;

pub use blocks::{block_partition, floor_log2_ratio, power_bound, power_nm, Block, BlockPartition, PowerNm, TailBound};
pub use epoch::{
    cumulative_exact, cumulative_log2, epoch_blocks, epoch_index, epoch_size_log2, EpochBlock, MAX_EXACT_EPOCH,
};
pub use exponential::{kmt_exponential_bound, kmt_log_term, sakhanenko_exp_mgf_bound, sakhanenko_exp_tail_bound};
pub use slower::{slower_sequence, sup_tails, SlowerSequence};
pub use variance::{partial_sum_constant, sakhanenko_poly_bound, variance_diff_bound, VarianceDiff};

use serde::{Deserialize, Serialize};

use crate::numeric::log_sum_exp;
use crate::serde_ext;

pub const NON_RIGOROUS_DEFAULT: &str =
    "universal constants left at the default 1.0; values describe bound shape, not rigorous probabilities";

/// Log-space value of a bound together with the ledger it was summed from.
///
/// `log_value = log_prefactor + log_sum_exp(log_terms)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    #[serde(with = "serde_ext")]
    pub log_value: f64,
    #[serde(with = "serde_ext")]
    pub value: f64,
    pub vacuous: bool,
    pub terms_used: usize,
    /// Upper bound on what the truncated remainder adds to `value`.
    #[serde(with = "serde_ext")]
    pub truncation_bound: f64,
    #[serde(default, with = "serde_ext")]
    pub log_prefactor: f64,
    #[serde(default, with = "serde_ext::vec")]
    pub log_terms: Vec<f64>,
}

impl BoundValue {
    pub fn from_terms(log_prefactor: f64, log_terms: Vec<f64>, truncation_bound: f64) -> Self {
        let log_value = log_prefactor + log_sum_exp(&log_terms);
        let value = log_value.exp();
        Self {
            log_value,
            value,
            vacuous: !(value < 1.0),
            terms_used: log_terms.len(),
            truncation_bound,
            log_prefactor,
            log_terms,
        }
    }

    pub fn divergent() -> Self {
        Self {
            log_value: f64::INFINITY,
            value: f64::INFINITY,
            vacuous: true,
            terms_used: 0,
            truncation_bound: f64::INFINITY,
            log_prefactor: 0.0,
            log_terms: Vec::new(),
        }
    }

    pub fn is_divergent(&self) -> bool {
        self.log_value == f64::INFINITY
    }

    /// Recomputes `log_value` from the ledger.
    pub fn replay(&self) -> f64 {
        if self.is_divergent() {
            return f64::INFINITY;
        }
        self.log_prefactor + log_sum_exp(&self.log_terms)
    }
}
