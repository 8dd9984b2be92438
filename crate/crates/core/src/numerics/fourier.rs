//! Density recovery from a characteristic function by FFT.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Uniform grid `x_min, ..., x_max` with `n_points` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            n_points,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min < self.x_max) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.n_points < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 8 points, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.point(j)).collect()
    }

    /// Indices of the central fraction of the grid.
    pub fn core(&self, fraction: f64) -> std::ops::Range<usize> {
        let n = self.n_points;
        let drop = ((1.0 - fraction) * 0.5 * n as f64).round() as usize;
        drop..n - drop
    }
}

/// A real function sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn x(&self) -> Vec<f64> {
        self.grid.points()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.step()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Linear interpolation, zero outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        let h = self.grid.step();
        let s = (x - self.grid.x_min) / h;
        if !(s >= 0.0) || s > (self.grid.n_points - 1) as f64 {
            return 0.0;
        }
        let j = (s.floor() as usize).min(self.grid.n_points - 2);
        let w = s - j as f64;
        (1.0 - w) * self.values[j] + w * self.values[j + 1]
    }

    /// Riemann-sum characteristic function of the sampled density.
    pub fn cf_at(&self, t: f64) -> Complex64 {
        let h = self.grid.step();
        self.values
            .iter()
            .enumerate()
            .map(|(j, &p)| Complex64::from_polar(p * h, t * self.grid.point(j)))
            .sum()
    }

    /// `\int phi(x) p(x) dx` by the trapezoid rule on the grid.
    pub fn expectation(&self, phi: impl Fn(f64) -> f64) -> f64 {
        let h = self.grid.step();
        let n = self.values.len();
        self.values
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                w * p * phi(self.grid.point(j))
            })
            .sum::<f64>()
            * h
    }
}

/// Invert `cf` to a density on `grid`.
///
/// The inversion integral `(1/pi) Re \int_0^\infty e^{-itx} cf(t) dt` is
/// sampled at `t_k = k dt` with `dt = 2 pi / (n dx)`, which pairs the t-grid
/// with the x-grid so that one FFT evaluates all nodes. The result has unit
/// mass by construction; mass leaking outside the window wraps around, which
/// is reported as [`Error::AliasWarning`] when the grid is clearly too small.
pub fn fourier_invert(cf: impl Fn(f64) -> Complex64, grid: &GridSpec) -> Result<SampledFunction> {
    grid.validate()?;
    let n = grid.n_points;
    let dx = grid.step();
    let dt = 2.0 * PI / (n as f64 * dx);
    let mut buf: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            let w = if k == 0 { 0.5 } else { 1.0 };
            w * cf(t) * Complex64::from_polar(1.0, -t * grid.x_min)
        })
        .collect();
    if buf.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidParameter(
            "characteristic function returned a non-finite value".into(),
        ));
    }
    let t_max = (n - 1) as f64 * dt;
    let tail = cf(t_max).norm();
    if tail > 1e-6 {
        return Err(Error::AliasWarning(format!(
            "|cf| = {tail:.3e} at the largest frequency {t_max:.4}; refine the x-grid"
        )));
    }
    // The cf should not have decayed within a few frequency steps; otherwise
    // the x-window is narrow compared with the spread of the law.
    let early = cf(4.0 * dt).norm();
    if early < (-1.0f64).exp() {
        return Err(Error::AliasWarning(format!(
            "|cf| = {early:.3e} already at t = 4 dt = {:.4}; widen the x-window",
            4.0 * dt
        )));
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let values = buf.iter().map(|c| dt / PI * c.re).collect();
    Ok(SampledFunction {
        grid: *grid,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_pair() {
        let grid = GridSpec::symmetric(20.0, 4096).unwrap();
        let p = fourier_invert(|t| Complex64::new((-t * t / 2.0).exp(), 0.0), &grid).unwrap();
        let mid = grid.n_points / 2;
        let x = grid.point(mid);
        let exact = (-x * x / 2.0).exp() / (2.0 * PI).sqrt();
        assert!((p.values[mid] - exact).abs() < 1e-10);
        assert!((p.eval(0.0) - 0.398_942_280_401_432_7).abs() < 1e-5);
        assert!((p.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cauchy_pair() {
        let grid = GridSpec::symmetric(2000.0, 1 << 20).unwrap();
        let p = fourier_invert(|t| Complex64::new((-t.abs()).exp(), 0.0), &grid).unwrap();
        assert!((p.eval(0.0) - 1.0 / PI).abs() < 1e-3);
        for x in [0.5, 2.0, 10.0] {
            let exact = 1.0 / (PI * (1.0 + x * x));
            assert!((p.eval(x) - exact).abs() < 1e-3 * exact.max(1e-3), "x = {x}");
        }
    }

    #[test]
    fn gaussian_round_trip_recovers_cf() {
        let grid = GridSpec::symmetric(20.0, 2048).unwrap();
        let p = fourier_invert(|t| Complex64::new((-t * t / 2.0).exp(), 0.0), &grid).unwrap();
        for t in [0.0, 0.3, 1.0, 2.5, 4.0] {
            let back = p.cf_at(t);
            assert!((back - Complex64::new((-t * t / 2.0).exp(), 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn shifted_gaussian_keeps_location() {
        let grid = GridSpec::new(-10.0, 14.0, 2048).unwrap();
        let p = fourier_invert(
            |t| Complex64::from_polar((-t * t / 2.0).exp(), 2.0 * t),
            &grid,
        )
        .unwrap();
        let mean = p.expectation(|x| x);
        assert!((mean - 2.0).abs() < 1e-8);
    }

    #[test]
    fn coarse_grid_is_flagged() {
        let grid = GridSpec::symmetric(0.5, 64).unwrap();
        let r = fourier_invert(|t| Complex64::new((-t * t / 2.0).exp(), 0.0), &grid);
        assert!(matches!(r, Err(Error::AliasWarning(_))));
        let grid = GridSpec::symmetric(100.0, 64).unwrap();
        let r = fourier_invert(|t| Complex64::new((-t.abs()).exp(), 0.0), &grid);
        assert!(matches!(r, Err(Error::AliasWarning(_))));
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1.0, 0.0, 16).is_err());
        assert!(GridSpec::new(0.0, 1.0, 4).is_err());
    }
}
