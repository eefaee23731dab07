//! Composite trapezoid quadrature with dyadic refinement.
//!
//! For integrands that are smooth and decay to negligible values at both
//! ends of the interval the trapezoid rule converges geometrically, so a few
//! halvings of the step size are enough to reach near machine precision.

use crate::error::{Error, Result};

const INITIAL_INTERVALS: usize = 256;
const MAX_LEVELS: u32 = 10;
/// Refinement stops once successive estimates agree to this relative level.
const TARGET_REL: f64 = 1e-12;
/// Agreement worse than this after the last level is reported as non-convergence.
pub const ACCEPT_REL: f64 = 1e-6;

/// Integrates `f` over `[lo, hi]`.
///
/// Convergence is judged relative to `∫|f|`, so integrals that cancel to
/// (nearly) zero still terminate.
pub fn integrate<F>(f: F, lo: f64, hi: f64, what: &'static str) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut n = INITIAL_INTERVALS;
    let mut h = (hi - lo) / n as f64;
    let (mut sum, mut abs_sum) = (0.0, 0.0);
    for i in 0..=n {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let y = f(lo + i as f64 * h);
        sum += w * y;
        abs_sum += w * y.abs();
    }
    let mut estimate = sum * h;
    let mut rel_change = f64::INFINITY;

    for _ in 0..MAX_LEVELS {
        // Only the new midpoints need evaluating.
        for i in 0..n {
            let y = f(lo + (i as f64 + 0.5) * h);
            sum += y;
            abs_sum += y.abs();
        }
        n *= 2;
        h *= 0.5;
        let refined = sum * h;
        let scale = (abs_sum * h).max(refined.abs());
        rel_change = if scale == 0.0 {
            0.0
        } else {
            (refined - estimate).abs() / scale
        };
        estimate = refined;
        if rel_change <= TARGET_REL {
            return Ok(estimate);
        }
    }
    if rel_change <= ACCEPT_REL {
        Ok(estimate)
    } else {
        Err(Error::NonConvergent { what, rel_change })
    }
}

/// Trapezoid rule over uniformly spaced samples with spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])) * h,
    }
}
