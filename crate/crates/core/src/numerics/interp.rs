//! Cubic splines on non-uniform knots and the sinh-stretched grids used to
//! tabulate functions with algebraic tails.

use crate::error::{Error, Result};

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::SizeMismatch(n, y.len()));
        }
        if n < 3 {
            return Err(Error::InvalidParameter("spline needs at least 3 knots".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("spline knots must increase".into()));
        }
        // Tridiagonal system for the second derivatives, natural end conditions.
        let mut diag = vec![1.0; n];
        let mut upper = vec![0.0; n];
        let mut lower = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            lower[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            upper[i] = h1 / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        for i in 1..n {
            let w = lower[i] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
        }
        Ok(Self { x, y, m })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Value, first and second derivative at `t`, clamped to the knot range.
    pub fn eval_all(&self, t: f64) -> (f64, f64, f64) {
        let t = t.clamp(self.x_min(), self.x_max());
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let value = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) * h / 6.0 * m0
            + (3.0 * b * b - 1.0) * h / 6.0 * m1;
        let d2 = a * m0 + b * m1;
        (value, d1, d2)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_all(t).0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.eval_all(t).1
    }
}

/// `n` points `center + scale * sinh(s)` with `s` uniform on
/// `[-asinh(reach / scale), asinh(reach / scale)]`: fine near `center`,
/// geometric far away.
pub fn sinh_grid(center: f64, scale: f64, reach: f64, n: usize) -> Vec<f64> {
    let s_max = (reach / scale).asinh();
    (0..n)
        .map(|i| {
            let s = -s_max + 2.0 * s_max * i as f64 / (n - 1) as f64;
            center + scale * s.sinh()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_interior_accurately() {
        let x: Vec<f64> = (0..200).map(|i| -3.0 + 6.0 * i as f64 / 199.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let s = CubicSpline::new(x, y).unwrap();
        for t in [-2.0, -0.3, 0.0, 1.234, 2.5] {
            let (v, d1, d2) = s.eval_all(t);
            assert!((v - f64::sin(t)).abs() < 1e-7);
            assert!((d1 - f64::cos(t)).abs() < 1e-5);
            assert!((d2 + f64::sin(t)).abs() < 1e-3);
        }
    }

    #[test]
    fn interpolates_knots_exactly() {
        let x = sinh_grid(0.0, 0.5, 100.0, 101);
        let y: Vec<f64> = x.iter().map(|v| 1.0 / (1.0 + v * v)).collect();
        let s = CubicSpline::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-14);
        }
    }

    #[test]
    fn sinh_grid_is_symmetric_and_reaches() {
        let g = sinh_grid(0.0, 1.0, 1e6, 51);
        assert!((g[0] + 1e6).abs() < 1e-3 && (g[50] - 1e6).abs() < 1e-3);
        assert!(g[25].abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(CubicSpline::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
        assert!(CubicSpline::new(vec![0.0, 1.0], vec![0.0; 2]).is_err());
    }
}
