//! Monte Carlo check of `E[A g(X)] = 0`.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{invalid, Result};
use crate::numerics::interp::{sinh_grid, CubicSpline};
use crate::numerics::parallel::map_indexed;
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{MCEstimate, Welford};
use crate::stable::cf::StableLaw;
use crate::stable::sampler::StableSampler;

/// Fixed batch length; batch `b` draws from substream `b`, so estimates do
/// not depend on the number of worker threads.
pub const BATCH: usize = 8192;

/// Law of the samples fed to an operator.
#[derive(Debug, Clone)]
pub enum Target {
    Stable(StableLaw),
    Gaussian { mean: f64, variance: f64 },
    /// Sum of a Poisson(`rate`) number of uniforms on `[lo, hi]`.
    CompoundPoisson { rate: f64, lo: f64, hi: f64 },
}

impl Target {
    pub fn draw_batch(&self, n: usize, stream: &RngStream) -> Result<Vec<f64>> {
        match self {
            Target::Stable(law) => Ok(StableSampler::new(law).fill(n, *stream)),
            Target::Gaussian { mean, variance } => {
                let mut rng = stream.generator();
                let sd = variance.sqrt();
                Ok((0..n)
                    .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
                    .collect())
            }
            Target::CompoundPoisson { rate, lo, hi } => {
                let count = Poisson::new(*rate).map_err(|e| invalid(format!("poisson rate: {e}")))?;
                let mut rng = stream.generator();
                Ok((0..n)
                    .map(|_| {
                        let k = count.sample(&mut rng) as u64;
                        (0..k).map(|_| rng.random_range(*lo..*hi)).sum()
                    })
                    .collect())
            }
        }
    }

    /// Centre and spread used to lay out an operator table.
    fn layout(&self) -> (f64, f64) {
        match self {
            Target::Stable(law) => (law.derived.location, law.sigma().max(1e-3)),
            Target::Gaussian { mean, variance } => (*mean, variance.sqrt()),
            Target::CompoundPoisson { rate, lo, hi } => {
                let m = rate * 0.5 * (lo + hi);
                (m, (rate * (lo * lo + lo * hi + hi * hi) / 3.0).sqrt().max(1e-3))
            }
        }
    }
}

/// An operator `x -> A g(x)` splined on a sinh grid, evaluated directly
/// outside the grid.
pub struct TabulatedOperator<F> {
    op: F,
    spline: CubicSpline,
}

impl<F: Fn(f64) -> Result<f64> + Sync> TabulatedOperator<F> {
    pub fn new(op: F, center: f64, scale: f64, reach: f64, nodes: usize) -> Result<Self> {
        let xs = sinh_grid(center, scale, reach, nodes);
        let ys: Result<Vec<f64>> = map_indexed(xs.len(), |i| op(xs[i])).into_iter().collect();
        let spline = CubicSpline::new(xs, ys?)?;
        Ok(Self { op, spline })
    }

    /// Table laid out for samples from `target`.
    pub fn for_target(op: F, target: &Target) -> Result<Self> {
        let (center, scale) = target.layout();
        Self::new(op, center, 0.25 * scale.min(1.0), 1e8 * scale, 8001)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x >= self.spline.x_min() && x <= self.spline.x_max() {
            Ok(self.spline.eval(x))
        } else {
            (self.op)(x)
        }
    }
}

/// Mean of `op(X_i)` over `n` draws from `target`, with standard error.
pub fn stein_identity_mc<F>(op: F, target: &Target, n: usize, rng: &RngStream) -> Result<MCEstimate>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if n < 1000 {
        return Err(invalid(format!("identity check needs n >= 1000, got {n}")));
    }
    let batches = n.div_ceil(BATCH);
    let parts = map_indexed(batches, |b| -> Result<Welford> {
        let len = BATCH.min(n - b * BATCH);
        let xs = target.draw_batch(len, &rng.substream(b as u64))?;
        let mut acc = Welford::new();
        for x in xs {
            acc.push(op(x)?);
        }
        Ok(acc)
    });
    let mut total = Welford::new();
    for p in parts {
        total.merge(&p?);
    }
    total.estimate()
}
