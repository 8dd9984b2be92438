//! Experiment configuration, read from TOML.
//!
//! Every section is optional and falls back to the defaults below, except
//! `[constants]`, which `bound-sweep` needs spelled out.

use serde::{Deserialize, Serialize};

use crate::bounds::ConstantsPolicy;
use crate::stable::params::StableParams;
use crate::stein::test_function::TestFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[derive(Default)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stable: StableSection,
    #[serde(default)]
    pub cf: CfSection,
    #[serde(default)]
    pub density: DensitySection,
    #[serde(default)]
    pub sample: SampleSection,
    #[serde(default)]
    pub stein_check: SteinCheckSection,
    #[serde(default)]
    pub solve: SolveSection,
    #[serde(default)]
    pub bound_sweep: BoundSweepSection,
    #[serde(default)]
    pub sd_check: SdCheckSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsPolicy>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StableSection {
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub m1: f64,
    pub m2: f64,
}

impl Default for StableSection {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            beta: 0.0,
            m1: 1.0,
            m2: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CfSection {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for CfSection {
    fn default() -> Self {
        Self {
            t_min: -10.0,
            t_max: 10.0,
            points: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DensitySection {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Default for DensitySection {
    fn default() -> Self {
        Self {
            x_min: -50.0,
            x_max: 50.0,
            points: 16_384,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleSection {
    pub count: usize,
}

impl Default for SampleSection {
    fn default() -> Self {
        Self { count: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SteinCheckSection {
    /// Monte Carlo draws per row.
    pub samples: usize,
    /// Feed standard Gaussian draws to the stable operator instead of stable ones.
    pub mismatch: bool,
    /// Jump rate of the compound Poisson reference row.
    pub poisson_rate: f64,
}

impl Default for SteinCheckSection {
    fn default() -> Self {
        Self {
            samples: 100_000,
            mismatch: false,
            poisson_rate: 2.0,
        }
    }
}

/// A named test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    GaussianBump { center: f64, width: f64 },
    CompactBump { center: f64, half_width: f64 },
    TanhWindow { scale: f64, width: f64 },
    Constant { value: f64 },
}

impl FunctionSpec {
    pub fn build(&self) -> TestFunction {
        match *self {
            Self::GaussianBump { center, width } => TestFunction::gaussian_bump(center, width),
            Self::CompactBump { center, half_width } => TestFunction::compact_bump(center, half_width),
            Self::TanhWindow { scale, width } => TestFunction::tanh_window(scale, width),
            Self::Constant { value } => TestFunction::constant(value),
        }
    }

    fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            Self::GaussianBump { center, width } => center.is_finite() && width > 0.0 && width.is_finite(),
            Self::CompactBump { center, half_width } => center.is_finite() && half_width > 0.0 && half_width.is_finite(),
            Self::TanhWindow { scale, width } => scale > 0.0 && scale.is_finite() && width > 0.0 && width.is_finite(),
            Self::Constant { value } => value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(format!("test function {self:?} has a non-finite or non-positive parameter"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveSection {
    pub half_width: f64,
    pub points: usize,
    /// Share of the grid, centred, over which the residual is summarized.
    pub core_fraction: f64,
    pub h: FunctionSpec,
}

impl Default for SolveSection {
    fn default() -> Self {
        Self {
            half_width: 5.0,
            points: 101,
            core_fraction: 0.8,
            h: FunctionSpec::GaussianBump { center: 0.0, width: 1.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Smooth Wasserstein bound, two-point summands, `alpha > 1`.
    W2,
    /// Wasserstein-delta bound, power-tailed summands, `alpha < 1`.
    Wdelta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundSweepSection {
    pub kind: BoundKind,
    pub n: Vec<usize>,
    /// `N` for `w2`, `M` for `wdelta`.
    pub cutoffs: Vec<f64>,
    /// Draws of the summand law behind the sample-kernel terms.
    pub mc_samples: usize,
    /// Sample size on each side of the empirical distance; 0 skips it.
    pub empirical_samples: usize,
    /// Exponent of the `wdelta` cost, below `alpha`.
    pub delta: f64,
    /// `e(y) = s exp(-y^2)` added to the tails for `wdelta`.
    pub perturbation_scale: f64,
}

impl Default for BoundSweepSection {
    fn default() -> Self {
        Self {
            kind: BoundKind::W2,
            n: vec![10, 100, 1000],
            cutoffs: vec![1.0],
            mc_samples: 100_000,
            empirical_samples: 1000,
            delta: 0.25,
            perturbation_scale: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SdCheckSection {
    pub eta: Vec<f64>,
    pub half_width: f64,
    pub points: usize,
    /// Largest tolerated negative density value.
    pub tolerance: f64,
}

impl Default for SdCheckSection {
    fn default() -> Self {
        Self {
            eta: vec![0.1, 0.25, 0.5, 0.75, 0.9],
            half_width: 40.0,
            points: 16_384,
            tolerance: 1e-4,
        }
    }
}


fn grid_ok(lo: f64, hi: f64, points: usize) -> bool {
    lo.is_finite() && hi.is_finite() && lo < hi && points >= 2
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// The resolved configuration as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is serializable")
    }

    pub fn stable_params(&self) -> Result<StableParams, String> {
        let s = self.stable;
        StableParams::new(s.alpha, s.beta, s.m1, s.m2).map_err(|e| e.to_string())
    }

    /// Range checks for what `command` reads.
    pub fn validate(&self, command: &str) -> Result<(), String> {
        self.stable_params()?;
        match command {
            "cf" => {
                let c = self.cf;
                if !grid_ok(c.t_min, c.t_max, c.points) {
                    return Err("[cf] needs finite t_min < t_max and at least 2 points".into());
                }
            }
            "density" => {
                let d = self.density;
                if !grid_ok(d.x_min, d.x_max, d.points) {
                    return Err("[density] needs finite x_min < x_max and at least 2 points".into());
                }
            }
            "sample" => {
                if self.sample.count == 0 {
                    return Err("[sample] count must be at least 1".into());
                }
            }
            "stein-check" => {
                let s = self.stein_check;
                if s.samples < 1000 {
                    return Err(format!("[stein_check] samples must be at least 1000, got {}", s.samples));
                }
                if !(s.poisson_rate > 0.0 && s.poisson_rate.is_finite()) {
                    return Err("[stein_check] poisson_rate must be positive".into());
                }
            }
            "solve" => {
                let s = self.solve;
                if !(s.half_width > 0.0 && s.half_width.is_finite()) || s.points < 2 {
                    return Err("[solve] needs a positive half_width and at least 2 points".into());
                }
                if !(s.core_fraction > 0.0 && s.core_fraction <= 1.0) {
                    return Err("[solve] core_fraction must lie in (0, 1]".into());
                }
                s.h.validate()?;
            }
            "bound-sweep" => {
                let b = &self.bound_sweep;
                let Some(c) = self.constants else {
                    return Err("bound-sweep needs a [constants] section with c_alpha_a_k, c1_nu, c2_nu and \
                                truncation_u; the bounds leave these constants unspecified"
                        .into());
                };
                c.validate().map_err(|e| e.to_string())?;
                if b.n.is_empty() || b.n.contains(&0) {
                    return Err("[bound_sweep] n must be a non-empty list of positive sizes".into());
                }
                if b.cutoffs.is_empty() || b.cutoffs.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err("[bound_sweep] cutoffs must be a non-empty list of positive values".into());
                }
                if b.mc_samples == 0 {
                    return Err("[bound_sweep] mc_samples must be at least 1".into());
                }
                if b.kind == BoundKind::Wdelta && !(b.delta > 0.0 && b.delta < self.stable.alpha.min(1.0)) {
                    return Err(format!(
                        "[bound_sweep] delta must lie in (0, alpha) = (0, {}), got {}",
                        self.stable.alpha, b.delta
                    ));
                }
                if !(b.perturbation_scale >= 0.0 && b.perturbation_scale.is_finite()) {
                    return Err("[bound_sweep] perturbation_scale must be finite and >= 0".into());
                }
            }
            "sd-check" => {
                let s = &self.sd_check;
                if s.eta.is_empty() || s.eta.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                    return Err("[sd_check] every eta must lie in (0, 1)".into());
                }
                if !(s.half_width > 0.0 && s.half_width.is_finite()) || s.points < 2 {
                    return Err("[sd_check] needs a positive half_width and at least 2 points".into());
                }
                if !(s.tolerance >= 0.0) {
                    return Err("[sd_check] tolerance must be >= 0".into());
                }
            }
            _ => {}
        }
        Ok(())
    }
}
