use crate::numeric::{QuadError, RootError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("vacuous constant: log argument {argument} does not exceed 1")]
    VacuousConstant { argument: f64 },
    #[error("moment of order {order} diverges")]
    DivergentMoment { order: f64 },
    #[error("horizon exhausted while searching for subsequence level k = {k}")]
    HorizonExhausted { k: usize },
    #[error("strategy {strategy} does not support family {family}")]
    Unsupported { family: String, strategy: String },
    #[error("monotonicity violated: {0}")]
    Monotonicity(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Root(#[from] RootError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
