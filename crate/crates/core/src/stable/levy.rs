//! Lévy measures and infinitely divisible triplets.

use std::fmt;
use std::sync::Arc;

use super::params::StableParams;
use crate::error::{invalid, Error, Result};
use crate::numerics::quadrature::{
    adaptive, integrate_power_tail, integrate_power_weighted, integrate_with_error, Estimate,
    QuadratureSpec,
};

/// Classification by finiteness of the total mass and of the small-jump
/// first moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IddType {
    A,
    B,
    C,
    GaussianOnly,
}

impl fmt::Display for IddType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IddType::A => "A",
            IddType::B => "B",
            IddType::C => "C",
            IddType::GaussianOnly => "Gaussian-only",
        };
        f.write_str(s)
    }
}

/// Which half-line of jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Positive => 1.0,
            Side::Negative => -1.0,
        }
    }
}

/// Structural facts about a Lévy density used to pick quadrature maps.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyShape {
    /// `density(u) ~ c |u|^{-1-index}` as `u -> 0`.
    pub small_jump_index: Option<f64>,
    /// `density(u) ~ c |u|^{-1-index}` as `|u| -> inf`; `None` for faster decay.
    pub tail_index: Option<f64>,
    /// Closed interval outside which the density vanishes.
    pub support: (f64, f64),
    /// Points where the density is not smooth.
    pub breakpoints: Vec<f64>,
}

impl Default for LevyShape {
    fn default() -> Self {
        Self {
            small_jump_index: None,
            tail_index: None,
            support: (f64::NEG_INFINITY, f64::INFINITY),
            breakpoints: Vec::new(),
        }
    }
}

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct LevySpec {
    density: Density,
    pub shape: LevyShape,
    pub idd_type: IddType,
    pub small_u_moment_finite: bool,
    pub total_mass_finite: bool,
    /// Exact total mass when it is finite and cheaply known.
    label: String,
}

impl fmt::Debug for LevySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevySpec")
            .field("label", &self.label)
            .field("idd_type", &self.idd_type)
            .field("small_u_moment_finite", &self.small_u_moment_finite)
            .field("total_mass_finite", &self.total_mass_finite)
            .field("shape", &self.shape)
            .finish()
    }
}

/// How a factor multiplying the density behaves at large `|u|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailGrowth {
    /// Decays fast enough for a plain mapped quadrature.
    Decaying,
    /// Bounded after division by `|u|^k`.
    Power(f64),
}

impl LevySpec {
    /// Build from a density and structural hints; verifies the Lévy
    /// integrability condition numerically and classifies the measure.
    pub fn new(
        label: impl Into<String>,
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        shape: LevyShape,
    ) -> Result<Self> {
        let label = label.into();
        if let Some(a) = shape.small_jump_index {
            if !(a < 2.0) {
                return Err(invalid(format!(
                    "Lévy density of `{label}` is not integrable against 1 ∧ u^2 near 0 (index {a})"
                )));
            }
        }
        if let Some(a) = shape.tail_index {
            if !(a > 0.0) {
                return Err(invalid(format!(
                    "Lévy density of `{label}` has infinite mass away from 0 (tail index {a})"
                )));
            }
        }
        let mut spec = LevySpec {
            density: Arc::new(density),
            shape,
            idd_type: IddType::GaussianOnly,
            small_u_moment_finite: true,
            total_mass_finite: true,
            label,
        };
        let qs = QuadratureSpec::with_tolerances(1e-12, 1e-9);
        let mut weight = 0.0;
        for side in [Side::Positive, Side::Negative] {
            for u in [0.25, 0.5, 1.0, 2.0, 7.0] {
                let d = spec.density(side.sign() * u);
                if !(d >= 0.0) {
                    return Err(invalid(format!(
                        "Lévy density of `{}` is negative or NaN at {}",
                        spec.label,
                        side.sign() * u
                    )));
                }
            }
            let near = spec.small_jump_integral(side, 2.0, &|_| 1.0, &qs)?;
            let far = spec.large_jump_integral(side, TailGrowth::Power(0.0), &|_| 1.0, &qs)?;
            if !near.value.is_finite() || !far.value.is_finite() {
                return Err(invalid(format!(
                    "\\int (1 ∧ u^2) nu(du) diverges for `{}`",
                    spec.label
                )));
            }
            weight += near.value + far.value;
        }
        let index = spec.shape.small_jump_index;
        spec.total_mass_finite = index.is_none_or(|a| a < 0.0);
        spec.small_u_moment_finite = index.is_none_or(|a| a < 1.0);
        spec.idd_type = if weight == 0.0 {
            IddType::GaussianOnly
        } else if spec.total_mass_finite {
            IddType::A
        } else if spec.small_u_moment_finite {
            IddType::B
        } else {
            IddType::C
        };
        Ok(spec)
    }

    pub fn zero() -> Self {
        LevySpec {
            density: Arc::new(|_| 0.0),
            shape: LevyShape {
                support: (0.0, 0.0),
                ..LevyShape::default()
            },
            idd_type: IddType::GaussianOnly,
            small_u_moment_finite: true,
            total_mass_finite: true,
            label: "zero".into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn density(&self, u: f64) -> f64 {
        if u == 0.0 || u < self.shape.support.0 || u > self.shape.support.1 {
            return 0.0;
        }
        (self.density)(u)
    }

    fn side_range(&self, side: Side, lo: f64, hi: f64) -> Option<(f64, f64)> {
        // Range in |u| on the given side intersected with the support.
        let (s_lo, s_hi) = match side {
            Side::Positive => (self.shape.support.0.max(0.0), self.shape.support.1),
            Side::Negative => (-self.shape.support.1.min(0.0), -self.shape.support.0),
        };
        let a = lo.max(s_lo);
        let b = hi.min(s_hi);
        (b > a).then_some((a, b))
    }

    fn side_breaks(&self, side: Side, a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .shape
            .breakpoints
            .iter()
            .map(|&p| side.sign() * p)
            .chain(extra.iter().copied())
            .filter(|&p| p > a && p < b)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut out = vec![a];
        out.extend(pts);
        out.push(b);
        out
    }

    /// `\int_0^1 r^k phi(r) nu(sign * r) dr`, where `phi` is regular at 0.
    pub fn small_jump_integral(
        &self,
        side: Side,
        k: f64,
        phi: &(dyn Fn(f64) -> f64 + Sync),
        spec: &QuadratureSpec,
    ) -> Result<Estimate> {
        let zero = Estimate {
            value: 0.0,
            error: 0.0,
        };
        let Some((a, b)) = self.side_range(side, 0.0, 1.0) else {
            return Ok(zero);
        };
        let sgn = side.sign();
        match self.shape.small_jump_index {
            Some(index) if a == 0.0 => {
                let s = 1.0 + index - k;
                if s >= 1.0 {
                    return Err(Error::NonIntegrable(s));
                }
                // Near alpha = 1 the substitution drives r into subnormals,
                // where density * r^{1+index} would be inf * 0.
                let reg = |r: f64| {
                    let r = r.max(1e-150);
                    phi(r) * self.density(sgn * r) * r.powf(1.0 + index)
                };
                integrate_power_weighted(&reg, 0.0, b, s, spec)
            }
            _ => {
                let f = |r: f64| r.powf(k) * phi(r) * self.density(sgn * r);
                let pts = self.side_breaks(side, a, b, &[]);
                let mut acc = zero;
                for w in pts.windows(2) {
                    acc = acc + adaptive(&f, w[0], w[1], spec)?;
                }
                Ok(acc)
            }
        }
    }

    /// `\int_1^\infty phi(r) nu(sign * r) dr`.
    pub fn large_jump_integral(
        &self,
        side: Side,
        growth: TailGrowth,
        phi: &(dyn Fn(f64) -> f64 + Sync),
        spec: &QuadratureSpec,
    ) -> Result<Estimate> {
        self.large_jump_integral_split(side, growth, phi, &[], spec)
    }

    /// As [`Self::large_jump_integral`], with extra panel boundaries in `r`.
    pub fn large_jump_integral_split(
        &self,
        side: Side,
        growth: TailGrowth,
        phi: &(dyn Fn(f64) -> f64 + Sync),
        breaks: &[f64],
        spec: &QuadratureSpec,
    ) -> Result<Estimate> {
        let zero = Estimate {
            value: 0.0,
            error: 0.0,
        };
        let Some((a, b)) = self.side_range(side, 1.0, f64::INFINITY) else {
            return Ok(zero);
        };
        let sgn = side.sign();
        let f = |r: f64| {
            let d = self.density(sgn * r);
            if d == 0.0 {
                0.0
            } else {
                phi(r) * d
            }
        };
        let pts = self.side_breaks(side, a, b, breaks);
        let mut acc = zero;
        let last = pts.len() - 2;
        for (i, w) in pts.windows(2).enumerate() {
            if i < last || w[1].is_finite() {
                acc = acc + adaptive(&f, w[0], w[1], spec)?;
                continue;
            }
            let piece = match (growth, self.shape.tail_index) {
                (TailGrowth::Power(k), Some(index)) => {
                    let p = 1.0 + index - k;
                    if !(p > 1.0) {
                        return Err(Error::TailDivergence(format!(
                            "integrand decays like |u|^-{p} under `{}`",
                            self.label
                        )));
                    }
                    let reg = |r: f64| {
                        let d = self.density(sgn * r);
                        if d == 0.0 {
                            0.0
                        } else {
                            phi(r) * r.powf(-k) * d * r.powf(1.0 + index)
                        }
                    };
                    integrate_power_tail(&reg, w[0], p, spec)?
                }
                _ => integrate_with_error(&f, w[0], f64::INFINITY, spec)?,
            };
            acc = acc + piece;
        }
        Ok(acc)
    }

    /// `\int_{|u|<=1} |u| nu(du)` and the same with `u^2`.
    pub fn small_moment(&self, power: f64, spec: &QuadratureSpec) -> Result<f64> {
        let mut v = 0.0;
        for side in [Side::Positive, Side::Negative] {
            v += self.small_jump_integral(side, power, &|_| 1.0, spec)?.value;
        }
        Ok(v)
    }

    /// `\int_{|u|<=1} u nu(du)` (signed).
    pub fn small_mean(&self, spec: &QuadratureSpec) -> Result<f64> {
        Ok(self.small_jump_integral(Side::Positive, 1.0, &|_| 1.0, spec)?.value
            - self.small_jump_integral(Side::Negative, 1.0, &|_| 1.0, spec)?.value)
    }

    /// `\int_{|u|>1} |u| nu(du)`.
    pub fn large_abs_moment(&self, spec: &QuadratureSpec) -> Result<f64> {
        let mut v = 0.0;
        for side in [Side::Positive, Side::Negative] {
            v += self
                .large_jump_integral(side, TailGrowth::Power(1.0), &|r| r, spec)?
                .value;
        }
        Ok(v)
    }
}

/// `(beta, sigma^2, nu)`.
#[derive(Debug, Clone)]
pub struct IDDTriplet {
    pub beta: f64,
    pub sigma2: f64,
    pub levy: LevySpec,
}

impl IDDTriplet {
    pub fn new(beta: f64, sigma2: f64, levy: LevySpec) -> Result<Self> {
        if !(sigma2 >= 0.0) || !beta.is_finite() {
            return Err(invalid(format!(
                "triplet needs finite beta and sigma2 >= 0, got beta = {beta}, sigma2 = {sigma2}"
            )));
        }
        Ok(Self { beta, sigma2, levy })
    }

    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        Self::new(mean, variance, LevySpec::zero())
    }

    /// The stable law as a triplet: `beta` is the location of the
    /// `1/(1+u^2)`-compensated form, which differs from the `1_{|u|<=1}`
    /// form by a drift correction folded in here.
    pub fn stable(params: &StableParams) -> Result<Self> {
        let drift = super::params::compensated_drift(params)?;
        let levy = stable_levy(params)?;
        // For alpha < 1 the drift refers to the uncompensated exponent;
        // add back the compensator mean so the triplet uses 1_{|u|<=1}.
        let beta = if params.alpha < 1.0 {
            drift + (params.m1 - params.m2) / (1.0 - params.alpha)
        } else {
            drift
        };
        Self::new(beta, 0.0, levy)
    }
}

pub fn stable_levy(p: &StableParams) -> Result<LevySpec> {
    p.validate()?;
    let (a, m1, m2) = (p.alpha, p.m1, p.m2);
    let support = (
        if m2 > 0.0 { f64::NEG_INFINITY } else { 0.0 },
        if m1 > 0.0 { f64::INFINITY } else { 0.0 },
    );
    LevySpec::new(
        format!("stable(alpha={a}, m1={m1}, m2={m2})"),
        move |u: f64| {
            if u > 0.0 {
                m1 * u.powf(-a - 1.0)
            } else {
                m2 * (-u).powf(-a - 1.0)
            }
        },
        LevyShape {
            small_jump_index: Some(a),
            tail_index: Some(a),
            support,
            breakpoints: Vec::new(),
        },
    )
}

/// Exponentially tempered Cauchy measure `m e^{-gamma |u|} / u^2`.
pub fn tempered_cauchy_levy(m1: f64, m2: f64, gamma: f64) -> Result<LevySpec> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid(format!("tempering rate must be positive, got {gamma}")));
    }
    if !(m1 >= 0.0 && m2 >= 0.0 && m1 + m2 > 0.0) {
        return Err(invalid("weights need m1, m2 >= 0 and m1 + m2 > 0"));
    }
    LevySpec::new(
        format!("tempered-cauchy(m1={m1}, m2={m2}, gamma={gamma})"),
        move |u: f64| {
            let w = if u > 0.0 { m1 } else { m2 };
            w * (-gamma * u.abs()).exp() / (u * u)
        },
        LevyShape {
            small_jump_index: Some(1.0),
            tail_index: None,
            support: (
                if m2 > 0.0 { f64::NEG_INFINITY } else { 0.0 },
                if m1 > 0.0 { f64::INFINITY } else { 0.0 },
            ),
            breakpoints: Vec::new(),
        },
    )
}

/// Compound Poisson jumps with rate `rate`, uniform on `[lo, hi]`.
pub fn uniform_jumps(rate: f64, lo: f64, hi: f64) -> Result<LevySpec> {
    if !(rate > 0.0) || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid(format!(
            "uniform jumps need rate > 0 and finite lo < hi, got rate = {rate}, [{lo}, {hi}]"
        )));
    }
    let h = rate / (hi - lo);
    LevySpec::new(
        format!("uniform-jumps(rate={rate}, [{lo}, {hi}])"),
        move |u: f64| if u >= lo && u <= hi { h } else { 0.0 },
        LevyShape {
            small_jump_index: None,
            tail_index: None,
            support: (lo, hi),
            breakpoints: vec![-1.0, 1.0, lo, hi],
        },
    )
}
