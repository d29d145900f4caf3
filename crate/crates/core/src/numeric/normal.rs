//! Standard normal distribution function and its inverse.

use libm::erfc;
use statrs::function::erf::erfc_inv;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Φ(x).
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// 1 − Φ(x), accurate in the upper tail.
pub fn sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Lower-tail quantile for `p ∈ (0, 1/2]`, refined with one Newton step.
fn lower_quantile(p: f64) -> f64 {
    let mut x = -SQRT_2 * erfc_inv(2.0 * p);
    let d = pdf(x);
    if d > 0.0 {
        x -= (cdf(x) - p) / d;
    }
    x
}

/// Φ⁻¹(u) for `u ∈ (0, 1)`, evaluated on whichever tail is smaller so that
/// `quantile(u)` and `-quantile(1 - u)` agree to rounding.
pub fn quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    if u <= 0.5 {
        lower_quantile(u)
    } else {
        -lower_quantile(1.0 - u)
    }
}
