//! Fourier-type tails `\int_a^\infty f(u) cos(wu) du` and the sine analogue.
//!
//! The range is cut at the zeros of the trigonometric factor, the
//! half-period contributions form an alternating series, and the partial
//! sums are accelerated with Wynn's epsilon algorithm.

use std::f64::consts::PI;

use super::quadrature::{adaptive, Estimate, QuadratureSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

impl Trig {
    fn eval(self, x: f64) -> f64 {
        match self {
            Trig::Cos => x.cos(),
            Trig::Sin => x.sin(),
        }
    }

    /// Phase offset of the zeros: `k * pi + offset`.
    fn zero_offset(self) -> f64 {
        match self {
            Trig::Cos => 0.5 * PI,
            Trig::Sin => 0.0,
        }
    }
}

/// Extrapolated limit of a sequence of partial sums.
pub fn wynn_epsilon(sums: &[f64]) -> Estimate {
    let n = sums.len();
    if n == 0 {
        return Estimate {
            value: 0.0,
            error: f64::INFINITY,
        };
    }
    if n < 3 {
        let last = sums[n - 1];
        let err = if n == 2 { (sums[1] - sums[0]).abs() } else { f64::INFINITY };
        return Estimate {
            value: last,
            error: err,
        };
    }
    // prev = column k-1, cur = column k; even columns hold estimates.
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut estimates = vec![sums[n - 1]];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        let mut broke = false;
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == 0.0 || !diff.is_finite() {
                broke = true;
                break;
            }
            next.push(prev[j + 1] + 1.0 / diff);
        }
        if broke {
            break;
        }
        prev = cur;
        cur = next;
        k += 1;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    estimates.push(v);
                }
            }
        }
    }
    let m = estimates.len();
    let value = estimates[m - 1];
    let error = if m >= 2 {
        (estimates[m - 1] - estimates[m - 2]).abs()
    } else {
        (sums[n - 1] - sums[n - 2]).abs()
    };
    Estimate { value, error }
}

/// `\int_a^\infty f(u) trig(omega u) du` for `omega > 0` and `f` of bounded
/// variation decaying to zero.
pub fn integrate_fourier<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    omega: f64,
    trig: Trig,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if !(omega > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "oscillatory tail needs omega > 0 and finite a, got omega = {omega}, a = {a}"
        )));
    }
    let g = |u: f64| f(u) * trig.eval(omega * u);
    let half = PI / omega;
    let k0 = ((omega * a - trig.zero_offset()) / PI).floor() + 1.0;
    let first_zero = (k0 * PI + trig.zero_offset()) / omega;
    let panel_spec = QuadratureSpec {
        abs_tol: 0.01 * spec.abs_tol,
        ..spec.regular()
    };
    let head = adaptive(&g, a, first_zero, &panel_spec)?;
    let mut partial = head.value;
    let mut quad_err = head.error;
    let mut sums = vec![partial];
    let mut left = first_zero;
    let mut best = Estimate {
        value: partial,
        error: f64::INFINITY,
    };
    let mut stable_runs = 0;
    const MAX_PANELS: usize = 400;
    for i in 0..MAX_PANELS {
        let right = first_zero + (i as f64 + 1.0) * half;
        let piece = adaptive(&g, left, right, &panel_spec)?;
        partial += piece.value;
        quad_err += piece.error;
        sums.push(partial);
        left = right;
        if sums.len() >= 6 {
            // Extrapolate from a bounded window to keep the table small.
            let window = &sums[sums.len().saturating_sub(40)..];
            let est = wynn_epsilon(window);
            let target = spec.abs_tol.max(spec.rel_tol * est.value.abs());
            let moved = (est.value - best.value).abs();
            best = Estimate {
                value: est.value,
                error: est.error.max(moved) + quad_err,
            };
            if best.error <= target {
                stable_runs += 1;
                if stable_runs >= 2 {
                    return Ok(best);
                }
            } else {
                stable_runs = 0;
            }
        }
    }
    Err(Error::NonConvergence {
        estimate: best.value,
        error: best.error,
        subdivisions: MAX_PANELS,
    })
}
