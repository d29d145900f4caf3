//! Numerical companion to distribution-uniform strong Gaussian approximation of partial sums.
//!
//! - [`dist`]: centred reference laws with closed-form or quadrature moments.
//! - [`regularity`]: the Sakhanenko and Bernstein parameters and the relations between them.
//! - [`bounds`]: epoch and block partitions and the time-uniform tail bound evaluators.
//! - [`coupling`]: explicit surrogate couplings and Monte Carlo tail estimates.
//! - [`oracles`]: exact checkers for the self-contained inequalities.
//!
//! The numeric kernels and the oracle checks are generic over [`Real`]; the aliases
//! below fix the scalar to `f64`, which is what the distribution layer uses.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod coupling;
pub mod dist;
pub mod error;
pub mod numeric;
pub mod oracles;
pub mod regularity;
pub mod scalar;
pub mod serde_ext;

pub use bounds::{BlockPartition, BoundValue, TailBound};
pub use coupling::{CouplingRun, CouplingStrategy, TailConfig, TailEstimate, Weight};
pub use dist::{DistributionSpec, Family};
pub use error::{Error, Result};
pub use regularity::{BernsteinParameter, RegularityReport, RelationReport, SakhanenkoParameter};
pub use scalar::Real;

pub type CheckResult = oracles::CheckResult<f64>;
pub type MaximalWeighted = oracles::MaximalWeighted<f64>;
pub type MomentSplit = oracles::MomentSplit<f64>;
pub type TruncationSum = oracles::TruncationSum<f64>;
pub type QuadResult = numeric::QuadResult<f64>;
pub type QuadOptions = numeric::QuadOptions<f64>;
