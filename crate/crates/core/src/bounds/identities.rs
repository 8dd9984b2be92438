//! Pointwise and Monte Carlo checks of the identities behind the bounds.

use crate::error::{Error, Result};
use crate::numerics::parallel::map_indexed;
use crate::numerics::quadrature::{integrate_power_weighted, integrate_with_error, QuadratureSpec};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{MCEstimate, Welford};
use crate::stable::params::StableParams;
use crate::stein::test_function::TestFunction;

use super::w2::TwoPointLaw;

const BATCH: usize = 8192;

fn tight() -> QuadratureSpec {
    QuadratureSpec {
        max_subdivisions: 5000,
        ..QuadratureSpec::with_tolerances(1e-13, 1e-12)
    }
}

/// Two independently computed sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityCheck {
    pub fn deviation(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// `int_1^inf phi(u) du` with extra cuts, for decaying `phi`.
fn tail_integral(phi: &dyn Fn(f64) -> f64, from: f64, spec: &QuadratureSpec) -> Result<f64> {
    let mut total = 0.0;
    let mut a = from;
    for b in [from + 4.0, from + 20.0, from + 100.0] {
        total += integrate_with_error(phi, a, b, spec)?.value;
        a = b;
    }
    Ok(total + integrate_with_error(phi, a, f64::INFINITY, spec)?.value)
}

/// `int_0^inf (m1 f'(y+u) - m2 f'(y-u)) u^{-alpha} du` against its rescaled
/// form `a^{1-alpha} int u f'(y+au) (m1 1{u>0} + m2 1{u<0}) |u|^{-alpha-1} du`.
pub fn scaling_identity_check(f: &TestFunction, y: f64, a: f64, params: &StableParams) -> Result<IdentityCheck> {
    params.validate()?;
    let alpha = params.alpha;
    if !(alpha < 1.0) {
        return Err(Error::OutOfScope(format!("the scaling identity needs alpha < 1, got {alpha}")));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidParameter(format!("scale a must lie in (0, 1], got {a}")));
    }
    let spec = tight();
    let (m1, m2) = (params.m1, params.m2);
    let g = |u: f64| m1 * f.d1(y + u) - m2 * f.d1(y - u);
    let lhs = integrate_power_weighted(&g, 0.0, 1.0, alpha, &spec)?.value
        + tail_integral(&|u: f64| g(u) * u.powf(-alpha), 1.0, &spec)?;

    // Each half-line separately, singular endpoint declared to the integrator.
    let edge = 1.0 / a;
    let sing = spec.singular(alpha);
    let half = |sign: f64| -> Result<f64> {
        let phi = |u: f64| f.d1(y + sign * a * u) * u.powf(-alpha);
        Ok(integrate_with_error(&phi, 0.0, edge, &sing)?.value
            + tail_integral(&phi, edge, &spec)?)
    };
    let rhs = a.powf(1.0 - alpha) * (m1 * half(1.0)? - m2 * half(-1.0)?);
    Ok(IdentityCheck { lhs, rhs })
}

/// `(f'(x + s u) - f'(x)) / u`, with its Taylor expansion near zero.
fn slope_quotient(f: &TestFunction, x: f64, s: f64, u: f64) -> f64 {
    if u < 1e-6 {
        s * f.d2(x) + 0.5 * u * f.d3(x)
    } else {
        (f.d1(x + s * u) - f.d1(x)) / u
    }
}

/// `int (f'(x+u) - f'(x)) u nu(du)` against
/// `int_{-N}^{N} K_nu(t, N) f''(x+t) dt + R_N(x)`.
pub fn kernel_decomposition_check(
    f: &TestFunction,
    x: f64,
    cutoff: f64,
    params: &StableParams,
) -> Result<IdentityCheck> {
    params.validate()?;
    let alpha = params.alpha;
    if !(alpha > 1.0) {
        return Err(Error::OutOfScope(format!(
            "the kernel decomposition needs alpha in (1, 2), got {alpha}"
        )));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidParameter(format!("cutoff N must be positive, got {cutoff}")));
    }
    let spec = tight();
    let fx = f.d1(x);
    // u nu(du) on the side s is s m_s u^{-alpha} du for u > 0.
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for (s, m) in [(1.0, params.m1), (-1.0, params.m2)] {
        if m == 0.0 {
            continue;
        }
        let head = integrate_power_weighted(&|u: f64| slope_quotient(f, x, s, u), 0.0, 1.0, alpha - 1.0, &spec)?.value;
        let tail = tail_integral(&|u: f64| f.d1(x + s * u) * u.powf(-alpha), 1.0, &spec)? - fx / (alpha - 1.0);
        lhs += s * m * (head + tail);

        // t^{alpha-1} K_nu(s t, N) = m (1 - (t/N)^{alpha-1}) / (alpha - 1).
        let weight = |t: f64| m * (1.0 - (t / cutoff).powf(alpha - 1.0)) / (alpha - 1.0);
        let kernel = integrate_power_weighted(&|t: f64| weight(t) * f.d2(x + s * t), 0.0, cutoff, alpha - 1.0, &spec)?.value;
        let far = tail_integral(&|u: f64| f.d1(x + s * u) * u.powf(-alpha), cutoff, &spec)?
            - fx * cutoff.powf(1.0 - alpha) / (alpha - 1.0);
        rhs += kernel + s * m * far;
    }
    Ok(IdentityCheck { lhs, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumKernelCheck {
    /// Per-replicate difference of the two sides.
    pub difference: MCEstimate,
    pub lhs: MCEstimate,
}

impl TwoPointLaw {
    /// `E[Z 1{0 <= t <= Z <= N} - Z 1{-N <= Z <= t <= 0}]`.
    pub fn kernel(&self, t: f64, cutoff: f64) -> f64 {
        let mut v = 0.0;
        if 0.0 <= t && t <= self.hi && self.hi <= cutoff {
            v += self.p_hi * self.hi;
        }
        if -cutoff <= self.lo && self.lo <= t && t <= 0.0 {
            v -= (1.0 - self.p_hi) * self.lo;
        }
        v
    }

    /// `int_{-N}^{N} K(t, N) g'(s + t) dt` for the piecewise-constant kernel.
    fn kernel_integral(&self, cutoff: f64, s: f64, g: impl Fn(f64) -> f64) -> f64 {
        let mut v = 0.0;
        if self.hi <= cutoff {
            v += self.p_hi * self.hi * (g(s + self.hi) - g(s));
        }
        if -self.lo <= cutoff {
            v += (1.0 - self.p_hi) * -self.lo * (g(s) - g(s + self.lo));
        }
        v
    }
}

/// Monte Carlo check of the sum-kernel identity
/// `E[S f'(S)] = sum_i int_{-N}^{N} K(t, N) E f''(S - Z_i + t) dt + R`,
/// `R = sum_i E[Z_i (f'(S) - f'(S - Z_i)) 1{|Z_i| >= N}]`, for i.i.d.
/// two-point summands.
pub fn sum_kernel_identity_mc(
    f: &TestFunction,
    law: &TwoPointLaw,
    n: usize,
    cutoff: f64,
    replicates: usize,
    rng: &RngStream,
) -> Result<SumKernelCheck> {
    if n == 0 || replicates < 2 {
        return Err(Error::InvalidParameter("need n >= 1 and at least two replicates".into()));
    }
    let batches = replicates.div_ceil(BATCH);
    let parts = map_indexed(batches, |b| {
        let len = BATCH.min(replicates - b * BATCH);
        let z = law.sample(len * n, &rng.substream(b as u64));
        let mut diff = Welford::new();
        let mut lhs = Welford::new();
        for draw in z.chunks_exact(n) {
            let s: f64 = draw.iter().sum();
            let left = s * f.d1(s);
            let right: f64 = draw
                .iter()
                .map(|&zi| {
                    let rest = s - zi;
                    let mut v = law.kernel_integral(cutoff, rest, |u| f.d1(u));
                    if zi.abs() >= cutoff {
                        v += zi * (f.d1(s) - f.d1(rest));
                    }
                    v
                })
                .sum();
            diff.push(left - right);
            lhs.push(left);
        }
        (diff, lhs)
    });
    let mut diff = Welford::new();
    let mut lhs = Welford::new();
    for (d, l) in &parts {
        diff.merge(d);
        lhs.merge(l);
    }
    Ok(SumKernelCheck {
        difference: diff.estimate()?,
        lhs: lhs.estimate()?,
    })
}
