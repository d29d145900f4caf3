//! Scalar numerical kernels shared by the distribution, regularity and bound modules.

pub mod normal;
pub mod quad;
pub mod roots;
pub mod seed;
pub mod series;

pub use quad::{integrate, QuadError, QuadOptions, QuadResult};
pub use roots::{bisect_increasing, expand_upper, Bracket, RootError};
pub use series::{log1p_exp, log_add_exp, log_sum_exp, LogAccumulator};

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Γ(x) for x > 0.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Regularized upper incomplete gamma Q(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    statrs::function::gamma::gamma_ur(a, x)
}

/// ln(n!) for integer n ≥ 0.
pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma(f64::from(n) + 1.0)
}
