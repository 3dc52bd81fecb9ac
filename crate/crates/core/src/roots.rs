//! Scalar root finding, Lambert W on the lower branch, and bracketed maximization.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Lower real branch `W₋₁(x)` for `x ∈ [−1/e, 0)`.
///
/// Starts from the asymptotic guess `ln(−x) − ln(−ln(−x))` and runs Newton on
/// `w·eʷ − x` until the relative step falls below machine precision.
pub fn lambert_w_m1(x: f64) -> Result<f64> {
    let branch_point = -(-1.0f64).exp();
    if !(x >= branch_point && x < 0.0) {
        return Err(Error::InvalidInput(format!(
            "W_-1 is real only on [-1/e, 0), got {x}"
        )));
    }
    if x == branch_point {
        return Ok(-1.0);
    }
    let l1 = (-x).ln();
    let l2 = (-l1).ln();
    // The asymptotic guess lands above -1 close to the branch point.
    let mut w = if l1 - l2 < -1.0 { l1 - l2 } else { -1.0 - (2.0 * (1.0 + std::f64::consts::E * x)).sqrt() };
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - x;
        let step = f / (ew * (w + 1.0));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence(format!("W_-1({x}) Newton iteration")))
}

/// Root of `f` on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs.
///
/// Bisection down to adjacent floats, so the result is the closest representable
/// bracket end to the sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::NoConvergence(format!(
            "root not bracketed on [{lo}, {hi}] (f = {f_lo}, {f_hi})"
        )));
    }
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // pick the end with the smaller residual
            return Ok(if f(lo).abs() <= f(hi).abs() { lo } else { hi });
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence(format!("bisection on [{lo}, {hi}]")))
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `rel_tol · |x|`. Returns `(x, f(x))`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) {
            let best = [(x1, f1), (x2, f2), (mid, f(mid))]
                .into_iter()
                .fold((mid, f64::NEG_INFINITY), |acc, p| if p.1 > acc.1 { p } else { acc });
            return Ok(best);
        }
        // `>=` keeps the left (earlier) point on ties
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    Err(Error::NoConvergence(format!(
        "golden-section search stalled on [{lo}, {hi}]"
    )))
}
