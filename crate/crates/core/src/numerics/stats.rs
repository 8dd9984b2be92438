//! Streaming mean and variance.

use crate::error::{Error, Result};

/// Welford accumulator; merging follows Chan's pairwise update so partial
/// results from batches combine exactly as a single pass would, up to
/// rounding.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Welford) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn estimate(&self) -> Result<MCEstimate> {
        if self.count < 2 {
            return Err(Error::EmptySample);
        }
        Ok(MCEstimate {
            mean: self.mean,
            std_error: (self.variance() / self.count as f64).sqrt(),
            n: self.count as usize,
        })
    }
}

impl FromIterator<f64> for Welford {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut w = Welford::new();
        for x in iter {
            w.push(x);
        }
        w
    }
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MCEstimate {
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        xs.iter().copied().collect::<Welford>().estimate()
    }

    /// `|mean| <= k * std_error`.
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        self.mean.abs() <= k * self.std_error
    }

    pub fn z_score(&self) -> f64 {
        self.mean / self.std_error
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass_formulas() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1 - 3.0).collect();
        let w: Welford = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((w.mean - mean).abs() < 1e-12);
        assert!((w.variance() - var).abs() < 1e-10);
    }

    #[test]
    fn merge_equals_single_pass() {
        let xs: Vec<f64> = (0..777).map(|i| (i as f64).sin() * 5.0).collect();
        let whole: Welford = xs.iter().copied().collect();
        let mut merged = Welford::new();
        for chunk in xs.chunks(100) {
            merged.merge(&chunk.iter().copied().collect());
        }
        assert_eq!(merged.count, whole.count);
        assert!((merged.mean - whole.mean).abs() < 1e-12);
        assert!((merged.variance() - whole.variance()).abs() < 1e-10);
    }

    #[test]
    fn too_few_samples() {
        assert_eq!(MCEstimate::from_samples(&[1.0]), Err(Error::EmptySample));
    }
}
