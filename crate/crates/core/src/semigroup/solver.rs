//! Semigroup evaluation, the generator, and the Stein equation solution.

use crate::error::{Error, Result};
use crate::numerics::fourier::{fourier_invert, GridSpec, SampledFunction};
use crate::numerics::interp::CubicSpline;
use crate::numerics::parallel::map_indexed;
use crate::stable::cf::StableLaw;
use crate::stable::density::StandardStable;
use crate::stable::params::StableParams;
use crate::stein::operators::StableOperator;
use crate::stein::test_function::TestFunction;

use super::law::{gauss_panels, StandardGrid};

pub const ALPHA_ONE_MESSAGE: &str = "semigroup approach unavailable at alpha=1";

fn reject_alpha_one(params: &StableParams) -> Result<()> {
    params.validate()?;
    if params.alpha == 1.0 {
        return Err(Error::OutOfScope(ALPHA_ONE_MESSAGE.into()));
    }
    Ok(())
}

/// `n` geometric points from `a` to `b`.
fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    let r = (b / a).ln() / (n - 1) as f64;
    (0..n).map(|i| a * (r * i as f64).exp()).collect()
}

/// Everything needed to evaluate `P_t` for one stable law.
#[derive(Debug, Clone)]
pub struct SemigroupContext {
    pub law: StableLaw,
    pub x_grid: GridSpec,
    /// Geometric base grid for the time integrals.
    pub t_grid: Vec<f64>,
    grid: StandardGrid,
}

impl SemigroupContext {
    pub fn new(params: &StableParams, x_grid: GridSpec) -> Result<Self> {
        reject_alpha_one(params)?;
        x_grid.validate()?;
        let law = StableLaw::new(*params)?;
        let reach = 10f64.powf(8.0 / params.alpha).min(1e30);
        let grid = StandardGrid::new(StandardStable::of(&law)?, 0.01, reach, 0.05)?;
        Ok(Self {
            law,
            x_grid,
            t_grid: geometric(1e-3, 20.0, 64),
            grid,
        })
    }

    pub fn params(&self) -> &StableParams {
        &self.law.params
    }

    pub fn alpha(&self) -> f64 {
        self.law.params.alpha
    }

    pub fn standard_grid(&self) -> &StandardGrid {
        &self.grid
    }

    /// Shift and scale of the remainder law at time `t`: `P_t h(x) =
    /// E h(e^{-t} x + shift + scale Z)` with `Z` standard.
    pub fn remainder(&self, t: f64) -> (f64, f64) {
        let d = &self.law.derived;
        let a = self.alpha();
        let shift = -d.location * (-t).exp_m1();
        let scale = (-d.scale * (-a * t).exp_m1()).powf(1.0 / a);
        (shift, scale)
    }

    fn expect_at(&self, g: &dyn Fn(f64) -> f64, support: Option<(f64, f64)>, t: f64, x: f64) -> f64 {
        if t == 0.0 {
            return g(x);
        }
        let (shift, scale) = self.remainder(t);
        self.grid.expect(g, support, (-t).exp() * x + shift, scale)
    }

    /// `P_t h(x)`.
    pub fn apply(&self, h: &TestFunction, t: f64, x: f64) -> f64 {
        self.expect_at(&|y| h.value(y), h.vanishing_core(), t, x)
    }

    /// `E h(X)`.
    pub fn expectation(&self, h: &TestFunction) -> f64 {
        let d = &self.law.derived;
        self.grid
            .expect(&|y| h.value(y), h.vanishing_core(), d.location, d.scale.powf(1.0 / self.alpha()))
    }

    /// Panel boundaries for `\int_0^T ... dt` at `x`: the geometric base grid
    /// plus the times at which the centre `e^{-t} x + shift` crosses
    /// half-unit steps of the core of the integrand.
    fn time_breaks(&self, x: f64, core: Option<(f64, f64)>, t_max: f64) -> Vec<f64> {
        let mut pts = vec![0.0];
        pts.extend(geometric(1e-3, t_max, 49));
        if let Some((lo, hi)) = core {
            let m = self.law.derived.location;
            let mut c = (lo / 0.5).floor() * 0.5;
            while c <= hi {
                if (c - m) * (x - m) > 0.0 && (c - m).abs() < (x - m).abs() {
                    let t = ((x - m) / (c - m)).ln();
                    if t < t_max {
                        pts.push(t);
                    }
                }
                c += 0.5;
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        pts
    }

    /// `\int_0^T e^{-k t} (E g(e^{-t} x + shift_t + scale_t Z) - centre) dt`.
    fn time_integral(&self, g: &TestFunction, k: f64, centre: f64, x: f64, t_max: f64) -> f64 {
        let support = g.vanishing_core();
        let breaks = self.time_breaks(x, g.core, t_max);
        let value = |y: f64| g.value(y);
        breaks
            .windows(2)
            .map(|w| {
                gauss_panels(
                    |t| (-k * t).exp() * (self.expect_at(&value, support, t, x) - centre),
                    w[0],
                    w[1],
                    1,
                )
            })
            .sum()
    }

    fn horizon(&self, x: f64, k: f64) -> f64 {
        let rate = if k == 0.0 { self.alpha().min(1.0) } else { k };
        (20.0 + (1.0 + x.abs()).ln()) / rate
    }

    /// `f_h(x) = -\int_0^inf (P_t h(x) - E h) dt`.
    pub fn solution_value(&self, h: &TestFunction, eh: f64, x: f64) -> f64 {
        -self.time_integral(h, 0.0, eh, x, self.horizon(x, 0.0))
    }

    /// `f_h^{(k)}(x) = -\int_0^inf e^{-k t} P_t h^{(k)}(x) dt`, with
    /// `dh` the `k`-th derivative of `h`.
    pub fn solution_derivative(&self, dh: &TestFunction, k: u32, x: f64) -> f64 {
        let k = k as f64;
        -self.time_integral(dh, k, 0.0, x, self.horizon(x, k))
    }
}

/// Density of the remainder law at time `t`, by Fourier inversion of
/// `cf(xi) / cf(e^{-t} xi)`.
pub fn remainder_density(params: &StableParams, t: f64, grid: &GridSpec) -> Result<SampledFunction> {
    reject_alpha_one(params)?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("remainder density needs t > 0, got {t}")));
    }
    let law = StableLaw::new(*params)?;
    let eta = (-t).exp();
    fourier_invert(|xi| law.sd_ratio(eta, xi), grid)
}

pub fn semigroup_apply(ctx: &SemigroupContext, h: &TestFunction, t: f64, x: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("semigroup time must be >= 0, got {t}")));
    }
    Ok(ctx.apply(h, t, x))
}

/// Knots for functions that must be known far out: fine near the origin,
/// geometric beyond `inner`.
fn wide_knots(inner: f64, step: f64, reach: f64, ratio: f64) -> Vec<f64> {
    let n = (2.0 * inner / step).round() as usize;
    let mut xs: Vec<f64> = (0..=n).map(|i| -inner + step * i as f64).collect();
    let mut far = Vec::new();
    let mut r = inner * ratio;
    while r < reach * ratio {
        far.push(r);
        r *= ratio;
    }
    xs.extend(far.iter().copied());
    let mut neg: Vec<f64> = far.iter().map(|v| -v).collect();
    neg.reverse();
    neg.extend(xs);
    neg
}

/// `max |P_{t+s} h(x) - P_t (P_s h)(x)|` over the probes, with `P_s h`
/// splined before the outer application.
pub fn semigroup_law_check(ctx: &SemigroupContext, h: &TestFunction, t: f64, s: f64, probes: &[f64]) -> Result<f64> {
    if !(t >= 0.0 && s >= 0.0) {
        return Err(Error::InvalidParameter("semigroup times must be >= 0".into()));
    }
    let knots = wide_knots(30.0, 0.05, 1e6, 1.1);
    let values = map_indexed(knots.len(), |i| ctx.apply(h, s, knots[i]));
    let tail = if h.vanishing_core().is_some() { 1.0 + ctx.alpha() } else { 0.0 };
    let inner = TestFunction::from_spline("P_s h", CubicSpline::new(knots, values)?, tail);
    let dev = map_indexed(probes.len(), |i| {
        let x = probes[i];
        (ctx.apply(h, t + s, x) - ctx.apply(&inner, t, x)).abs()
    });
    Ok(dev.into_iter().fold(0.0, f64::max))
}

/// `T f(x) = -A(f')(x)`, the generator of the semigroup.
pub fn generator_apply(f: &TestFunction, x: f64, params: &StableParams) -> Result<f64> {
    reject_alpha_one(params)?;
    Ok(-StableOperator::new(params)?.apply(&f.derivative(), x)?.value)
}

/// `|(P_t f(x) - f(x)) / t - T f(x)|` for each `t`.
pub fn generator_limit_check(ctx: &SemigroupContext, f: &TestFunction, x: f64, t_seq: &[f64]) -> Result<Vec<f64>> {
    let tf = generator_apply(f, x, ctx.params())?;
    t_seq
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("generator limit needs t > 0, got {t}")));
            }
            Ok(((ctx.apply(f, t, x) - f.value(x)) / t - tf).abs())
        })
        .collect()
}

/// `f_h` and its derivatives on the context's x-grid.
#[derive(Debug, Clone)]
pub struct SteinSolution {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub d1: Vec<f64>,
    /// Only for `alpha > 1`.
    pub d2: Option<Vec<f64>>,
    pub h_ref: TestFunction,
    pub eh: f64,
    /// `f_h'` splined on a wide grid, used to apply the generator.
    pub derivative_fn: TestFunction,
}

pub fn solve_stein(h: &TestFunction, ctx: &SemigroupContext) -> Result<SteinSolution> {
    let dh = h.derivative();
    if dh.vanishing_core().is_none() {
        return Err(Error::InvalidTestFunction(format!(
            "{}: the derivative must vanish outside a bounded window",
            h.name()
        )));
    }
    let eh = ctx.expectation(h);
    let x = ctx.x_grid.points();
    let values = map_indexed(x.len(), |i| ctx.solution_value(h, eh, x[i]));
    let d1 = map_indexed(x.len(), |i| ctx.solution_derivative(&dh, 1, x[i]));
    let d2 = (ctx.alpha() > 1.0).then(|| {
        let ddh = dh.derivative();
        map_indexed(x.len(), |i| ctx.solution_derivative(&ddh, 2, x[i]))
    });
    let inner = ctx.x_grid.x_min.abs().max(ctx.x_grid.x_max.abs()) + 10.0;
    let reach = if ctx.alpha() < 1.0 { 1e6 } else { 1e4 };
    let knots = wide_knots(inner, 0.1, reach, 1.1);
    let slope = map_indexed(knots.len(), |i| ctx.solution_derivative(&dh, 1, knots[i]));
    let derivative_fn = TestFunction::from_spline(
        format!("f_h' for {}", h.name()),
        CubicSpline::new(knots, slope)?,
        1.0,
    );
    Ok(SteinSolution {
        x,
        values,
        d1,
        d2,
        h_ref: h.clone(),
        eh,
        derivative_fn,
    })
}

impl SteinSolution {
    /// `T f_h(x) - (h(x) - E h)` at each grid point.
    pub fn residuals(&self, params: &StableParams) -> Result<Vec<f64>> {
        let op = StableOperator::new(params)?;
        map_indexed(self.x.len(), |i| {
            let x = self.x[i];
            let tf = -op.apply(&self.derivative_fn, x)?.value;
            Ok(tf - (self.h_ref.value(x) - self.eh))
        })
        .into_iter()
        .collect()
    }

    /// Rows `x, f, f', f'', residual`; `f''` is NaN for `alpha < 1`.
    pub fn export_rows(&self, params: &StableParams) -> Result<Vec<[f64; 5]>> {
        let res = self.residuals(params)?;
        Ok((0..self.x.len())
            .map(|i| {
                let d2 = self.d2.as_ref().map_or(f64::NAN, |d| d[i]);
                [self.x[i], self.values[i], self.d1[i], d2, res[i]]
            })
            .collect())
    }
}

/// `(||f_h'|| / ||h'||, ||f_h''|| / (||h''|| / 2))` over the grid.
pub fn derivative_bound_report(sol: &SteinSolution) -> (f64, Option<f64>) {
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let (_, h1, h2) = sol.h_ref.sup_norms;
    let r1 = ratio(sup(&sol.d1), h1);
    let r2 = sol.d2.as_ref().map(|d| ratio(sup(d), 0.5 * h2));
    (r1, r2)
}
