//! Stein operators for infinitely divisible and stable targets.

use crate::error::{Error, Result};
use crate::numerics::quadrature::{
    adaptive, integrate_power_tail, integrate_power_weighted, integrate_with_error, Estimate, QuadratureSpec,
};
use crate::stable::cf::StableLaw;
use crate::stable::levy::{stable_levy, IddType, LevySpec, Side, TailGrowth};
use crate::stable::params::StableParams;

use super::test_function::{DecayClass, TestFunction};

/// Operator value with the error estimate of its far-jump integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteinOpResult {
    pub value: f64,
    pub tail_truncation_error_bound: f64,
}

pub(crate) fn op_spec() -> QuadratureSpec {
    QuadratureSpec {
        max_subdivisions: 4000,
        ..QuadratureSpec::with_tolerances(1e-12, 1e-10)
    }
}

fn growth_of(g: &TestFunction, extra: f64) -> TailGrowth {
    match g.decay {
        DecayClass::PolynomialDecay(k) => TailGrowth::Power(extra - k),
        _ => TailGrowth::Decaying,
    }
}

/// `g(x + s r) - g(x)` divided by `r`, with a Taylor fallback at tiny `r`.
fn difference_quotient(g: &TestFunction, x: f64, s: f64, r: f64) -> f64 {
    if r < 1e-5 {
        g.d1(x) + 0.5 * s * r * g.d2(x)
    } else {
        s * (g.value(x + s * r) - g.value(x)) / r
    }
}

/// Panel boundaries in `r` covering `x + s r` in the core of `g`.
pub(crate) fn core_breaks(g: &TestFunction, x: f64, s: f64) -> Vec<f64> {
    let Some((lo, hi)) = g.core else {
        return Vec::new();
    };
    let (a, b) = {
        let (p, q) = (s * (lo - x), s * (hi - x));
        (p.min(q), p.max(q))
    };
    let pieces = ((b - a) / 2.0).ceil().clamp(1.0, 64.0) as usize;
    (0..=pieces).map(|i| a + (b - a) * i as f64 / pieces as f64).collect()
}

/// `\int u (g(x+u) - g(x) 1_{|u|<=1}[compensate]) nu(du)`, split into the
/// near and far jumps.
fn jump_integral(
    g: &TestFunction,
    x: f64,
    levy: &LevySpec,
    compensate: bool,
    spec: &QuadratureSpec,
) -> Result<(Estimate, Estimate)> {
    let mut near = Estimate {
        value: 0.0,
        error: 0.0,
    };
    let mut far = near;
    if g.sup_norms == (0.0, 0.0, 0.0) {
        return Ok((near, far));
    }
    for side in [Side::Positive, Side::Negative] {
        let s = side.sign();
        let n = if compensate {
            // s r (g(x + s r) - g(x)) = r^2 * [s (g(x + s r) - g(x)) / r]
            levy.small_jump_integral(side, 2.0, &|r| difference_quotient(g, x, s, r), spec)?
        } else {
            levy.small_jump_integral(side, 1.0, &|r| s * g.value(x + s * r), spec)?
        };
        let breaks = core_breaks(g, x, s);
        let f = levy.large_jump_integral_split(
            side,
            growth_of(g, 1.0),
            &|r| s * r * g.value(x + s * r),
            &breaks,
            spec,
        )?;
        near = near + n;
        far = far + f;
    }
    Ok((near, far))
}

fn require(levy: &LevySpec, expected: IddType) -> Result<()> {
    if levy.idd_type != expected {
        return Err(Error::WrongType {
            expected: expected.to_string(),
            found: levy.idd_type.to_string(),
        });
    }
    Ok(())
}

/// `x g(x) - \int u g(x+u) nu(du)` for a finite Lévy measure whose
/// triplet satisfies `beta = \int_{|u|<=1} u nu(du)`.
pub fn apply_type_a(g: &TestFunction, x: f64, levy: &LevySpec) -> Result<SteinOpResult> {
    require(levy, IddType::A)?;
    let (near, far) = jump_integral(g, x, levy, false, &op_spec())?;
    Ok(SteinOpResult {
        value: x * g.value(x) - near.value - far.value,
        tail_truncation_error_bound: far.error,
    })
}

/// `(x - beta_nu) g(x) - \int u g(x+u) nu(du)` with
/// `beta_nu = beta - \int_{|u|<=1} u nu(du)`.
pub fn apply_type_b(g: &TestFunction, x: f64, levy: &LevySpec, beta: f64) -> Result<SteinOpResult> {
    require(levy, IddType::B)?;
    let spec = op_spec();
    let beta_nu = beta - levy.small_mean(&spec)?;
    let (near, far) = jump_integral(g, x, levy, false, &spec)?;
    Ok(SteinOpResult {
        value: (x - beta_nu) * g.value(x) - near.value - far.value,
        tail_truncation_error_bound: far.error,
    })
}

/// `(x - beta) g(x) - \int u (g(x+u) - g(x) 1_{|u|<=1}) nu(du)`.
pub fn apply_type_c(g: &TestFunction, x: f64, levy: &LevySpec, beta: f64) -> Result<SteinOpResult> {
    require(levy, IddType::C)?;
    let (near, far) = jump_integral(g, x, levy, true, &op_spec())?;
    Ok(SteinOpResult {
        value: (x - beta) * g.value(x) - near.value - far.value,
        tail_truncation_error_bound: far.error,
    })
}

/// `(x - beta) g(x) - sigma^2 g'(x)`.
pub fn apply_gaussian(g: &TestFunction, x: f64, beta: f64, sigma2: f64) -> Result<SteinOpResult> {
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!("variance must be positive, got {sigma2}")));
    }
    Ok(SteinOpResult {
        value: (x - beta) * g.value(x) - sigma2 * g.d1(x),
        tail_truncation_error_bound: 0.0,
    })
}

/// Stable operator with a precomputed law.
#[derive(Debug, Clone)]
pub struct StableOperator {
    pub law: StableLaw,
    levy: LevySpec,
}

impl StableOperator {
    pub fn new(params: &StableParams) -> Result<Self> {
        Ok(Self {
            law: StableLaw::new(*params)?,
            levy: stable_levy(params)?,
        })
    }

    pub fn drift(&self) -> f64 {
        self.law.derived.drift
    }

    pub fn apply(&self, g: &TestFunction, x: f64) -> Result<SteinOpResult> {
        let compensate = self.law.params.alpha >= 1.0;
        let (near, far) = jump_integral(g, x, &self.levy, compensate, &op_spec())?;
        Ok(SteinOpResult {
            value: (x - self.drift()) * g.value(x) - near.value - far.value,
            tail_truncation_error_bound: far.error,
        })
    }
}

/// `(x - Gamma) g(x) - \int (g(x+u) - g(x) 1_{|u|<=1}[alpha >= 1]) u nu(du)`.
pub fn apply_stable(g: &TestFunction, x: f64, params: &StableParams) -> Result<SteinOpResult> {
    StableOperator::new(params)?.apply(g, x)
}

/// `x g(x) - m \int_0^\infty (g(x+u) - g(x-u)) u^{-alpha} du`.
pub fn apply_symmetric(g: &TestFunction, x: f64, alpha: f64, m: f64) -> Result<SteinOpResult> {
    if !(alpha > 0.0 && alpha < 2.0) || !(m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "symmetric operator needs alpha in (0, 2) and m > 0, got alpha = {alpha}, m = {m}"
        )));
    }
    if g.sup_norms == (0.0, 0.0, 0.0) {
        return Ok(SteinOpResult { value: 0.0, tail_truncation_error_bound: 0.0 });
    }
    let spec = op_spec();
    let quotient = |u: f64| {
        if u < 1e-5 {
            2.0 * g.d1(x)
        } else {
            (g.value(x + u) - g.value(x - u)) / u
        }
    };
    let near = integrate_power_weighted(&quotient, 0.0, 1.0, alpha - 1.0, &spec)?;
    let diff = |u: f64| g.value(x + u) - g.value(x - u);
    let mut pts: Vec<f64> = core_breaks(g, x, 1.0)
        .into_iter()
        .chain(core_breaks(g, x, -1.0))
        .filter(|&u| u > 1.0)
        .collect();
    pts.push(1.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut far = Estimate {
        value: 0.0,
        error: 0.0,
    };
    let weighted = |u: f64| diff(u) * u.powf(-alpha);
    for w in pts.windows(2) {
        far = far + adaptive(&weighted, w[0], w[1], &spec)?;
    }
    let start = *pts.last().expect("non-empty");
    far = far
        + match g.decay {
            DecayClass::PolynomialDecay(k) => {
                if !(alpha + k > 1.0) {
                    return Err(Error::TailDivergence(format!(
                        "\\int (g(x+u) - g(x-u)) u^-{alpha} du with |g| ~ |u|^-{k}"
                    )));
                }
                integrate_power_tail(&|u| diff(u) * u.powf(k), start, alpha + k, &spec)?
            }
            _ => integrate_with_error(&weighted, start, f64::INFINITY, &spec)?,
        };
    Ok(SteinOpResult {
        value: x * g.value(x) - m * (near.value + far.value),
        tail_truncation_error_bound: m * far.error,
    })
}
