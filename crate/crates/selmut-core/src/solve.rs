//! Bracketed bisection for the monotone scalar equations appearing in the
//! cycle-time and limit-distribution solvers.

use crate::error::{Error, Result};

/// Outcome of a bracketed root solve, reporting the defining-equation
/// residual actually achieved and the number of bisection iterations spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSolve {
    pub value: f64,
    pub residual: f64,
    pub iterations: u32,
}

/// Iteration cap shared by all solvers.
pub const MAX_BISECT_ITER: u32 = 200;

/// Bisects `f` on `[lo, hi]` down to a root of `f = 0`.
///
/// `f` returns `None` when the argument is too close to a singularity to
/// evaluate; such points are treated as lying on the `lo` side when
/// `singular_near_lo` is set, otherwise on the `hi` side. The caller
/// guarantees a sign change over the bracket: `sign_at_lo` is the sign of
/// `f` at (or arbitrarily near) `lo`, and `f` has the opposite sign at `hi`.
/// This lets a bracket start exactly at a singular endpoint whose sign is
/// known analytically without being evaluated.
///
/// Stops when `|f| <= residual_tol` or the bracket collapses to floating
/// point resolution, whichever comes first; always returns the evaluated
/// point with the smallest residual seen.
pub fn bisect<F>(
    mut lo: f64,
    mut hi: f64,
    f: F,
    sign_at_lo: f64,
    singular_near_lo: bool,
    residual_tol: f64,
) -> Result<RootSolve>
where
    F: Fn(f64) -> Option<f64>,
{
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::BracketFailure(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut best: Option<RootSolve> = None;
    let mut iterations = 0;
    while iterations < MAX_BISECT_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket no longer representable
        }
        iterations += 1;
        match f(mid) {
            Some(fm) => {
                if best.is_none_or(|b| fm.abs() < b.residual) {
                    best = Some(RootSolve {
                        value: mid,
                        residual: fm.abs(),
                        iterations,
                    });
                }
                if fm.abs() <= residual_tol {
                    break;
                }
                if fm.signum() == sign_at_lo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            None => {
                if singular_near_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    }
    let mut best = best.ok_or_else(|| {
        Error::BracketFailure("no evaluable point found inside the bracket".to_string())
    })?;
    best.iterations = iterations;
    Ok(best)
}
