//! Log-space accumulation helpers.

use crate::scalar::Real;

/// `log(sum(exp(values)))` with max subtraction.
///
/// Empty input and all `-inf` inputs give `-inf`; any `+inf` gives `+inf`; NaN propagates.
pub fn log_sum_exp<T: Real>(values: &[T]) -> T {
    let mut max = T::neg_infinity();
    for &v in values {
        if v.is_nan() {
            return T::nan();
        }
        if v == T::infinity() {
            return T::infinity();
        }
        if v > max {
            max = v;
        }
    }
    if max == T::neg_infinity() {
        return max;
    }
    let sum = values.iter().fold(T::zero(), |acc, &v| acc + (v - max).exp());
    max + sum.ln()
}

/// `log(exp(a) + exp(b))`.
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a.is_nan() || b.is_nan() {
        return T::nan();
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == T::infinity() {
        return hi;
    }
    if lo == T::neg_infinity() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `log(1 + exp(x))` without overflow for large `x`.
pub fn log1p_exp<T: Real>(x: T) -> T {
    if x > T::lit(36.0) {
        x + (-x).exp()
    } else if x < T::lit(-36.0) {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// Streaming log-space accumulator keeping the running maximum.
#[derive(Debug, Clone, Copy)]
pub struct LogAccumulator<T: Real> {
    max: T,
    scaled: T,
}

impl<T: Real> Default for LogAccumulator<T> {
    fn default() -> Self {
        Self {
            max: T::neg_infinity(),
            scaled: T::zero(),
        }
    }
}

impl<T: Real> LogAccumulator<T> {
    pub fn push(&mut self, log_term: T) {
        if log_term == T::neg_infinity() {
            return;
        }
        if log_term > self.max {
            self.scaled = self.scaled * (self.max - log_term).exp() + T::one();
            self.max = log_term;
        } else {
            self.scaled = self.scaled + (log_term - self.max).exp();
        }
    }

    /// Current value of `log(sum(exp(terms)))`.
    pub fn value(&self) -> T {
        if self.max == T::neg_infinity() {
            T::neg_infinity()
        } else {
            self.max + self.scaled.ln()
        }
    }
}
