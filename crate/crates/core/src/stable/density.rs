//! Stable densities: FFT inversion on a grid, and a pointwise evaluator
//! based on a rotated inversion contour.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::cf::StableLaw;
use super::params::StableParams;
use super::sampler::sample;
use crate::error::{invalid, Error, Result};
use crate::numerics::fourier::{fourier_invert, GridSpec, SampledFunction};
use crate::numerics::quadrature::{integrate_with_error, QuadratureSpec};
use crate::numerics::rng::RngStream;

/// Density on `grid` by inversion of the closed-form characteristic function.
pub fn density(params: &StableParams, grid: &GridSpec) -> Result<SampledFunction> {
    let law = StableLaw::new(*params)?;
    fourier_invert(|t| law.cf_closed(t), grid)
}

/// Window `[q_{0.001}, q_{0.999}]` estimated from `n_samples` draws, with
/// enough points (a power of two, at least 4096) to resolve the
/// characteristic function down to `1e-7`.
pub fn default_grid(params: &StableParams, n_samples: usize, rng: RngStream) -> Result<GridSpec> {
    let law = StableLaw::new(*params)?;
    let mut xs = sample(params, n_samples.max(1000), rng)?;
    xs.sort_by(f64::total_cmp);
    let q = |p: f64| xs[((p * (xs.len() - 1) as f64).round() as usize).min(xs.len() - 1)];
    let (lo, hi) = (q(0.001), q(0.999));
    let span = hi - lo;
    let t_needed = (16.2 / law.derived.scale).powf(1.0 / params.alpha);
    let mut n = 4096usize;
    while 2.0 * PI * (n as f64 - 1.0) / (n as f64 * span / (n as f64 - 1.0)) < t_needed
        && n < (1 << 22)
    {
        n *= 2;
    }
    GridSpec::new(lo, hi, n)
}

/// Standard stable law with characteristic function
/// `exp(-|t|^alpha (1 - i b sign t))`, `b = theta tan(pi alpha / 2)`, for
/// `alpha != 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardStable {
    pub alpha: f64,
    pub b: f64,
}

impl StandardStable {
    pub fn new(alpha: f64, skew: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
            return Err(invalid(format!(
                "pointwise density needs alpha in (0, 1) or (1, 2), got {alpha}"
            )));
        }
        if !(-1.0..=1.0).contains(&skew) {
            return Err(invalid(format!("skewness must lie in [-1, 1], got {skew}")));
        }
        Ok(Self {
            alpha,
            b: skew * (PI * alpha / 2.0).tan(),
        })
    }

    pub fn of(law: &StableLaw) -> Result<Self> {
        Self::new(law.params.alpha, law.derived.skew)
    }

    pub fn cf(&self, t: f64) -> Complex64 {
        let m = t.abs().powf(self.alpha);
        Complex64::new(-m, m * self.b * t.signum()).exp()
    }

    /// Density at `z`.
    pub fn pdf(&self, z: f64) -> f64 {
        if z < 0.0 {
            return StandardStable {
                alpha: self.alpha,
                b: -self.b,
            }
            .pdf(-z);
        }
        let a = self.alpha;
        if a < 1.0 && self.b <= -(PI * a / 2.0).tan() * (1.0 - 1e-12) {
            // Totally skewed to the left: no mass on the positive half-line.
            return 0.0;
        }
        let r = (1.0 + self.b * self.b).sqrt();
        let zeta = self.b.atan();
        let phi = (0.5 * (zeta - PI / 2.0) / a).max(-PI / 2.0);
        let rot = Complex64::from_polar(1.0, phi);
        let inner = Complex64::from_polar(r, a * phi - zeta);
        let lin = Complex64::new(0.0, z) * rot;
        let spec = QuadratureSpec {
            max_subdivisions: 4000,
            ..QuadratureSpec::with_tolerances(1e-300, 1e-11)
        };
        let value = if z < 1.0 {
            let f = |s: f64| {
                if s == 0.0 {
                    return rot.re;
                }
                (rot * (-lin * s - inner * s.powf(a)).exp()).re
            };
            // Near the edge of a one-sided support the density is far below
            // the size of the integrand, so only an absolute target makes sense.
            let spec = QuadratureSpec {
                abs_tol: 1e-14,
                ..spec
            };
            integrate_with_error(&f, 0.0, f64::INFINITY, &spec).map(|e| e.value)
        } else {
            // Subtract the exactly integrable leading term and rescale s = v / z.
            let f = |v: f64| {
                if v == 0.0 {
                    return 0.0;
                }
                let s = v / z;
                let w = -inner * s.powf(a);
                (rot * (-lin * s).exp() * expm1_complex(w)).re / z
            };
            integrate_with_error(&f, 0.0, f64::INFINITY, &spec).map(|e| e.value)
        };
        let value = match value {
            Ok(v) => v,
            Err(Error::NonConvergence { estimate, error, .. }) if error < 1e-10 => estimate,
            Err(_) => f64::NAN,
        };
        (value / PI).max(0.0)
    }
}

/// `e^w - 1` without cancellation for small `|w|`.
fn expm1_complex(w: Complex64) -> Complex64 {
    let (a, b) = (w.re, w.im);
    let half = (0.5 * b).sin();
    Complex64::new(a.exp_m1() * b.cos() - 2.0 * half * half, a.exp() * b.sin())
}

impl StableLaw {
    /// Pointwise density, `alpha != 1`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        let std = StandardStable::of(self)?;
        let sigma = self.sigma();
        Ok(std.pdf((x - self.derived.location) / sigma) / sigma)
    }
}
