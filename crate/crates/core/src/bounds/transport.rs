//! Empirical distances between equal-size samples.

use crate::error::{Error, Result};
use crate::stein::test_function::TestFunction;

/// Largest size solved exactly; above it the sorted coupling is used.
pub const EXACT_LIMIT: usize = 2000;

/// `min(|x - y|, |x - y|^delta)`.
pub fn delta_cost(x: f64, y: f64, delta: f64) -> f64 {
    let r = (x - y).abs();
    r.min(r.powf(delta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportDistance {
    pub value: f64,
    /// Set when the sorted coupling stood in for the optimal one.
    pub surrogate: bool,
}

/// Optimal assignment for the `n x n` cost `cost(i, j)`, as `row -> column`.
///
/// Shortest augmenting paths with potentials, `O(n^3)`.
pub fn min_cost_assignment(n: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    // 1-based arrays, column 0 is the virtual root.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut min_to = vec![f64::INFINITY; n + 1];
    let mut used = vec![false; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        min_to.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < min_to[j] {
                    min_to[j] = cur;
                    way[j] = j0;
                }
                if min_to[j] < delta {
                    delta = min_to[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_to[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[row_of[j] - 1] = j - 1;
    }
    assignment
}

/// Transport distance with cost `d_delta` between the empirical measures of
/// `x` and `y`.
pub fn empirical_wdelta(x: &[f64], y: &[f64], delta: f64) -> Result<TransportDistance> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    let n = x.len();
    if n <= EXACT_LIMIT {
        let plan = min_cost_assignment(n, |i, j| delta_cost(x[i], y[j], delta));
        let total: f64 = plan.iter().enumerate().map(|(i, &j)| delta_cost(x[i], y[j], delta)).sum();
        return Ok(TransportDistance {
            value: total / n as f64,
            surrogate: false,
        });
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let total: f64 = xs.iter().zip(&ys).map(|(&a, &b)| delta_cost(a, b, delta)).sum();
    Ok(TransportDistance {
        value: total / n as f64,
        surrogate: true,
    })
}

/// Test functions with `||h||, ||h'||, ||h''|| <= 1`.
#[derive(Debug, Clone)]
pub struct W2Dictionary {
    functions: Vec<TestFunction>,
}

impl W2Dictionary {
    pub fn new(functions: Vec<TestFunction>) -> Result<Self> {
        for h in &functions {
            let (a, b, c) = h.sup_norms;
            if a > 1.0 + 1e-9 || b > 1.0 + 1e-9 || c > 1.0 + 1e-9 {
                return Err(Error::InvalidTestFunction(format!(
                    "{}: sup norms ({a}, {b}, {c}) exceed one",
                    h.name()
                )));
            }
        }
        Ok(Self { functions })
    }

    pub fn functions(&self) -> &[TestFunction] {
        &self.functions
    }
}

/// Divide by the largest of the three sup norms when it exceeds one.
fn normalized(h: TestFunction) -> TestFunction {
    let (a, b, c) = h.sup_norms;
    let m = a.max(b).max(c);
    if m > 1.0 {
        h.scaled(1.0 / m)
    } else {
        h
    }
}

/// `sin(wx), cos(wx)` over `max(1, w^2)` for `w` in `{1/4, 1/2, 1, 2}`,
/// `tanh(x)`, and Gaussian bumps of width one at `-1, 0, 1`.
pub fn w2h_dictionary() -> W2Dictionary {
    let mut fs = Vec::new();
    for w in [0.25, 0.5, 1.0, 2.0] {
        let amp = 1.0 / f64::max(1.0, w * w);
        fs.push(TestFunction::sinusoid(w, 0.0, amp));
        fs.push(TestFunction::sinusoid(w, std::f64::consts::FRAC_PI_2, amp));
    }
    fs.push(TestFunction::tanh());
    for c in [-1.0, 0.0, 1.0] {
        fs.push(TestFunction::gaussian_bump(c, 1.0));
    }
    W2Dictionary::new(fs.into_iter().map(normalized).collect()).expect("norms bounded by construction")
}

/// `max_h |mean h(x) - mean h(y)|` over the dictionary; a lower estimate of
/// the smooth Wasserstein distance.
pub fn empirical_w2h(x: &[f64], y: &[f64], dictionary: &W2Dictionary) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySample);
    }
    if x.len() != y.len() {
        return Err(Error::SizeMismatch(x.len(), y.len()));
    }
    let mean = |h: &TestFunction, s: &[f64]| s.iter().map(|&v| h.value(v)).sum::<f64>() / s.len() as f64;
    Ok(dictionary
        .functions()
        .iter()
        .map(|h| (mean(h, x) - mean(h, y)).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::{normal_stream, uniform_stream, RngStream};

    fn brute_force(x: &[f64], y: &[f64], delta: f64) -> f64 {
        fn rec(k: usize, x: &[f64], y: &[f64], used: &mut [bool], delta: f64) -> f64 {
            if k == x.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..y.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(delta_cost(x[k], y[j], delta) + rec(k + 1, x, y, used, delta));
                    used[j] = false;
                }
            }
            best
        }
        rec(0, x, y, &mut vec![false; y.len()], delta) / x.len() as f64
    }

    #[test]
    fn exact_solver_matches_permutations() {
        for seed in 0..20 {
            let x: Vec<f64> = normal_stream(RngStream::with_stream(seed, 1), 8).iter().map(|v| 3.0 * v).collect();
            let y: Vec<f64> = uniform_stream(RngStream::with_stream(seed, 2), 8).iter().map(|v| 8.0 * v - 2.0).collect();
            let d = empirical_wdelta(&x, &y, 0.5).unwrap();
            assert!(!d.surrogate);
            assert!((d.value - brute_force(&x, &y, 0.5)).abs() < 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn simple_cases() {
        let d = empirical_wdelta(&[0.0], &[3.0], 0.5).unwrap();
        assert!((d.value - 3f64.sqrt()).abs() < 1e-15);
        let x = normal_stream(RngStream::new(1), 50);
        assert_eq!(empirical_wdelta(&x, &x, 0.5).unwrap().value, 0.0);
        assert!(matches!(empirical_wdelta(&x, &x[..3], 0.5), Err(Error::SizeMismatch(50, 3))));
        let big = normal_stream(RngStream::new(2), EXACT_LIMIT + 1);
        assert!(empirical_wdelta(&big, &big, 0.5).unwrap().surrogate);
    }

    #[test]
    fn sorted_coupling_is_not_always_optimal() {
        // A shared point stays put under a concave cost.
        let x = [0.0, 1.0];
        let y = [2.0, 1.0];
        let exact = empirical_wdelta(&x, &y, 0.5).unwrap().value;
        let mut xs = x;
        let mut ys = y;
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        let sorted = (delta_cost(xs[0], ys[0], 0.5) + delta_cost(xs[1], ys[1], 0.5)) / 2.0;
        assert!((exact - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((sorted - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dictionary_distance() {
        let dict = w2h_dictionary();
        for h in dict.functions() {
            let (a, b, c) = h.sup_norms;
            assert!(a <= 1.0 + 1e-9 && b <= 1.0 + 1e-9 && c <= 1.0 + 1e-9, "{}", h.name());
        }
        let z = normal_stream(RngStream::new(4), 20_000);
        let z2 = normal_stream(RngStream::new(5), 20_000);
        assert_eq!(empirical_w2h(&z, &z, &dict).unwrap(), 0.0);
        let shifted = |s: f64| z2.iter().map(|v| v + s).collect::<Vec<_>>();
        let d1 = empirical_w2h(&z, &shifted(0.5), &dict).unwrap();
        let d2 = empirical_w2h(&z, &shifted(1.0), &dict).unwrap();
        assert!(d1 > 0.05 && d2 > d1, "{d1} {d2}");
        let sin_only = W2Dictionary::new(vec![TestFunction::sinusoid(1.0, 0.0, 1.0)]).unwrap();
        let direct = (z.iter().map(|v| v.sin()).sum::<f64>() - z2.iter().map(|v| v.sin()).sum::<f64>()).abs() / 20_000.0;
        assert!((empirical_w2h(&z, &z2, &sin_only).unwrap() - direct).abs() < 1e-12);
        assert!(W2Dictionary::new(vec![TestFunction::sinusoid(2.0, 0.0, 1.0)]).is_err());
    }
}
