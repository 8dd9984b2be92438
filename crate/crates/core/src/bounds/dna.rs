//! Laws in the domain of normal attraction of a stable law with `alpha < 1`.
//!
//! Beyond `|y| = 1` the tails are `(A + e(y))(1 ± theta) / |y|^alpha`; on
//! `[-1, 1]` the leftover mass is spread uniformly, which splices the CDF
//! continuously at both ends.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};
use crate::numerics::parallel::map_indexed;
use crate::numerics::rng::RngStream;
use crate::stable::params::StableParams;

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const SAMPLE_BATCH: usize = 8192;

#[derive(Clone)]
pub struct DnaSpec {
    pub alpha: f64,
    pub amplitude: f64,
    pub theta: f64,
    perturbation: Scalar,
    perturbation_d1: Scalar,
    /// `sup e` over the probe grid.
    pub sup_perturbation: f64,
    pub description: String,
}

impl fmt::Debug for DnaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DnaSpec")
            .field("alpha", &self.alpha)
            .field("amplitude", &self.amplitude)
            .field("theta", &self.theta)
            .field("sup_perturbation", &self.sup_perturbation)
            .field("description", &self.description)
            .finish()
    }
}

/// Probe points `1 < y <= 1e8`, geometric.
fn tail_probe() -> impl Iterator<Item = f64> {
    (0..=1600).map(|i| 10f64.powf(i as f64 * 0.005)).map(|y| if y == 1.0 { 1.0 + 1e-9 } else { y })
}

impl DnaSpec {
    pub fn new(
        alpha: f64,
        amplitude: f64,
        theta: f64,
        e: impl Fn(f64) -> f64 + Send + Sync + 'static,
        e_d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        description: impl Into<String>,
    ) -> Result<Self> {
        let mut spec = DnaSpec {
            alpha,
            amplitude,
            theta,
            perturbation: Arc::new(e),
            perturbation_d1: Arc::new(e_d1),
            sup_perturbation: 0.0,
            description: description.into(),
        };
        spec.sup_perturbation = tail_probe()
            .flat_map(|y| [y, -y])
            .chain((-1000..=1000).map(|i| i as f64 * 1e-3))
            .map(|y| spec.e(y))
            .fold(f64::NEG_INFINITY, f64::max);
        spec.validate()?;
        Ok(spec)
    }

    /// Pure Pareto tails, `e = 0`.
    pub fn pareto(alpha: f64, amplitude: f64, theta: f64) -> Result<Self> {
        Self::new(alpha, amplitude, theta, |_| 0.0, |_| 0.0, "e = 0")
    }

    /// Tails matching the Lévy measure of `params`: `A (1 ± theta) = m / alpha`.
    pub fn stable_matched(params: &StableParams) -> Result<Self> {
        let mass = params.m1 + params.m2;
        if !(mass > 0.0) {
            return Err(Error::InvalidDistribution("stable-matched tails need m1 + m2 > 0".into()));
        }
        Self::pareto(params.alpha, mass / (2.0 * params.alpha), (params.m1 - params.m2) / mass)
    }

    pub fn e(&self, y: f64) -> f64 {
        (self.perturbation)(y)
    }

    pub fn e_d1(&self, y: f64) -> f64 {
        (self.perturbation_d1)(y)
    }

    /// `P(Y > y)` for `y > 1`.
    pub fn right_tail(&self, y: f64) -> f64 {
        (self.amplitude + self.e(y)) * (1.0 + self.theta) / y.powf(self.alpha)
    }

    /// `P(Y < -y)` for `y > 1`.
    pub fn left_tail(&self, y: f64) -> f64 {
        (self.amplitude + self.e(-y)) * (1.0 - self.theta) / y.powf(self.alpha)
    }

    /// Mass of the uniform body on `[-1, 1]`.
    pub fn body_mass(&self) -> f64 {
        1.0 - self.right_tail(1.0) - self.left_tail(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDistribution(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return bad(format!("A must be positive, got {}", self.amplitude));
        }
        if !(-1.0..=1.0).contains(&self.theta) {
            return bad(format!("theta must lie in [-1, 1], got {}", self.theta));
        }
        if !self.sup_perturbation.is_finite() {
            return bad("e is unbounded on the probe grid".into());
        }
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for y in tail_probe() {
            if !(self.amplitude + self.e(y) > 0.0 && self.amplitude + self.e(-y) > 0.0) {
                return bad(format!("A + e(±y) must be positive, fails at y = {y}"));
            }
            let cur = (self.right_tail(y), self.left_tail(y));
            for (c, p) in [(cur.0, prev.0), (cur.1, prev.1)] {
                if !(0.0..=1.0).contains(&c) {
                    return bad(format!("tail probability {c} outside [0, 1] at y = {y}"));
                }
                if c > p * (1.0 + 1e-12) {
                    return bad(format!("tail is not monotone near y = {y}: CDF would decrease"));
                }
            }
            prev = cur;
        }
        if self.body_mass() < -1e-12 {
            return bad(format!("tail masses at |y| = 1 exceed one (body mass {})", self.body_mass()));
        }
        Ok(())
    }

    /// Inverse CDF at `u` in `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let left = self.left_tail(1.0);
        let right = self.right_tail(1.0);
        if u < left {
            -self.invert_tail(u, |y| self.left_tail(y))
        } else if 1.0 - u < right {
            self.invert_tail(1.0 - u, |y| self.right_tail(y))
        } else {
            let body = self.body_mass();
            if body <= 0.0 {
                return 1.0;
            }
            -1.0 + 2.0 * (u - left) / body
        }
    }

    /// Solve `tail(y) = p` for `y > 1`, with `tail` nonincreasing.
    fn invert_tail(&self, p: f64, tail: impl Fn(f64) -> f64) -> f64 {
        let base = ((self.amplitude * 2.0) / p).powf(1.0 / self.alpha);
        let mut lo = 1.0;
        let mut hi = base.max(2.0);
        while tail(hi) > p && hi < f64::MAX / 4.0 {
            lo = hi;
            hi *= 4.0;
        }
        // Geometric bisection: the bracket may span many decades.
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if tail(mid) > p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `n` draws by inversion; batch `b` uses substream `b`.
pub fn sample_dna(spec: &DnaSpec, n: usize, rng: &RngStream) -> Vec<f64> {
    let batches = n.div_ceil(SAMPLE_BATCH);
    map_indexed(batches, |b| {
        let len = SAMPLE_BATCH.min(n - b * SAMPLE_BATCH);
        let mut g = rng.substream(b as u64).generator();
        (0..len).map(|_| spec.quantile(g.sample::<f64, _>(Open01))).collect::<Vec<_>>()
    })
    .concat()
}

/// `n^{-1/alpha} (Y_1 + ... + Y_n)`, `count` independent copies.
pub fn normalized_sums(spec: &DnaSpec, n: usize, count: usize, rng: &RngStream) -> Vec<f64> {
    let scale = (n as f64).powf(-1.0 / spec.alpha);
    let batches = count.div_ceil(SAMPLE_BATCH);
    map_indexed(batches, |b| {
        let len = SAMPLE_BATCH.min(count - b * SAMPLE_BATCH);
        let mut g = rng.substream(b as u64).generator();
        (0..len)
            .map(|_| scale * (0..n).map(|_| spec.quantile(g.sample::<f64, _>(Open01))).sum::<f64>())
            .collect::<Vec<_>>()
    })
    .concat()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_tail_frequency() {
        let spec = DnaSpec::pareto(0.5, 0.5, 0.0).unwrap();
        assert!(spec.body_mass().abs() < 1e-15);
        let n = 100_000;
        let ys = sample_dna(&spec, n, &RngStream::new(7));
        let hits = ys.iter().filter(|y| y.abs() > 4.0).count() as f64;
        let p = 0.5;
        let se = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((hits - n as f64 * p).abs() < 4.0 * se, "{hits}");
    }

    #[test]
    fn tail_count_beyond_two() {
        let e = |y: f64| 0.1 * (-y * y).exp();
        let spec = DnaSpec::new(0.6, 0.3, 0.2, e, move |y| -2.0 * y * e(y), "gauss").unwrap();
        let n = 200_000;
        let ys = sample_dna(&spec, n, &RngStream::new(3));
        let hits = ys.iter().filter(|&&y| y > 2.0).count() as f64;
        let p = spec.right_tail(2.0);
        let se = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((hits - n as f64 * p).abs() < 4.0 * se, "{hits} vs {}", n as f64 * p);
    }

    #[test]
    fn one_sided_and_deterministic() {
        let spec = DnaSpec::pareto(0.7, 0.3, 1.0).unwrap();
        let a = sample_dna(&spec, 20_000, &RngStream::new(11));
        assert!(a.iter().all(|&y| y >= -1.0));
        assert_eq!(a, sample_dna(&spec, 20_000, &RngStream::new(11)));
    }

    #[test]
    fn quantile_inverts_tails() {
        let e = |y: f64| 0.05 * (y / 3.0).sin() / (1.0 + y * y);
        let e1 = |y: f64| {
            let d = 1.0 + y * y;
            0.05 * ((y / 3.0).cos() / (3.0 * d) - 2.0 * y * (y / 3.0).sin() / (d * d))
        };
        let spec = DnaSpec::new(0.4, 0.25, -0.3, e, e1, "sin").unwrap();
        for u in [1e-9, 1e-4, 0.1, 0.5, 0.9, 1.0 - 1e-6] {
            let y = spec.quantile(u);
            let cdf = if y < -1.0 {
                spec.left_tail(-y)
            } else if y > 1.0 {
                1.0 - spec.right_tail(y)
            } else {
                spec.left_tail(1.0) + spec.body_mass() * (y + 1.0) / 2.0
            };
            assert!((cdf - u).abs() < 1e-10 * u.min(1.0 - u) + 1e-15, "u = {u}: {cdf}");
        }
    }

    #[test]
    fn rejects_bad_perturbations() {
        // Growing tail: A + e(y) increases faster than y^alpha.
        let e = |y: f64| 0.4 * (1.0 - (-(y.abs() - 1.0).max(0.0)).exp());
        let e1 = |y: f64| 0.4 * y.signum() * (-(y.abs() - 1.0).max(0.0)).exp();
        assert!(matches!(
            DnaSpec::new(0.1, 0.1, 0.0, e, e1, "bad"),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(DnaSpec::pareto(0.5, 0.8, 0.0).is_err());
        assert!(DnaSpec::pareto(1.2, 0.1, 0.0).is_err());
    }
}
