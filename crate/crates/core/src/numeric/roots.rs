//! Bracketing root finders for monotone functions.

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("interval [{lo}, {hi}] does not bracket a sign change")]
    NoBracket { lo: f64, hi: f64 },
    #[error("bracket expansion stopped at {limit} without a sign change")]
    ExpansionLimit { limit: f64 },
    #[error("function returned NaN at {at}")]
    NotANumber { at: f64 },
}

/// Final bracket for an increasing function: `f(lo) <= 0 < f(hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    pub f_lo: T,
    pub f_hi: T,
    pub iterations: usize,
}

/// Bisection for a nondecreasing `f` with `f(lo) <= 0 < f(hi)`.
///
/// Stops once `hi <= lo * (1 + tol) + tol`, so `lo` is the largest point found
/// on the feasible side and the root lies in `[lo, hi)`.
pub fn bisect_increasing<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<Bracket<T>, RootError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo.is_nan() {
        return Err(RootError::NotANumber { at: lo.as_f64() });
    }
    if f_hi.is_nan() {
        return Err(RootError::NotANumber { at: hi.as_f64() });
    }
    if !(f_lo <= T::zero() && f_hi > T::zero()) {
        return Err(RootError::NoBracket {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    let two = T::lit(2.0);
    let mut iterations = 0;
    while hi > lo * (T::one() + tol) + tol {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm.is_nan() {
            return Err(RootError::NotANumber { at: mid.as_f64() });
        }
        if fm <= T::zero() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
        iterations += 1;
    }
    Ok(Bracket {
        lo,
        hi,
        f_lo,
        f_hi,
        iterations,
    })
}

/// Doubles `hi` starting from `start` until `f(hi) > 0`, never exceeding `limit`.
/// Returns `(lo, hi)` where `lo` is the last point with `f <= 0`.
pub fn expand_upper<T, F>(mut f: F, start: T, limit: T) -> Result<(T, T), RootError>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let mut lo = T::zero();
    let mut hi = start.min(limit);
    loop {
        let v = f(hi);
        if v.is_nan() {
            return Err(RootError::NotANumber { at: hi.as_f64() });
        }
        if v > T::zero() {
            return Ok((lo, hi));
        }
        if hi >= limit {
            return Err(RootError::ExpansionLimit { limit: limit.as_f64() });
        }
        lo = hi;
        hi = (hi * T::lit(2.0)).min(limit);
    }
}
