//! Stable parameters in the Lévy-measure form and the derived
//! location/scale/skewness of the closed-form characteristic function.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::numerics::oscillatory::{integrate_fourier, Trig};
use crate::numerics::quadrature::{
    adaptive, integrate_power_tail, integrate_power_weighted, integrate_with_error, QuadratureSpec,
};

/// `S(alpha, beta)` with Lévy density `m1 u^{-alpha-1}` on the positive
/// half-line and `m2 |u|^{-alpha-1}` on the negative one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub m1: f64,
    pub m2: f64,
}

/// Drift of the compensated Lévy–Khintchine form (`drift`), and location,
/// scale and skewness of the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub drift: f64,
    pub location: f64,
    pub scale: f64,
    pub skew: f64,
}

/// Tolerances used for the parameter integrals.
pub(crate) fn tight_spec() -> QuadratureSpec {
    QuadratureSpec {
        max_subdivisions: 5000,
        ..QuadratureSpec::with_tolerances(1e-14, 1e-12)
    }
}

/// `1 - Euler's constant`, the value of `\int_0^\infty (sin u / u^2 - 1/(u(1+u^2))) du`.
pub const CAUCHY_LOCATION_CONSTANT: f64 = 0.422_784_335_098_467_1;

impl StableParams {
    pub fn new(alpha: f64, beta: f64, m1: f64, m2: f64) -> Result<Self> {
        let p = Self { alpha, beta, m1, m2 };
        p.validate()?;
        Ok(p)
    }

    pub fn symmetric(alpha: f64, m: f64) -> Result<Self> {
        Self::new(alpha, 0.0, m, m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(invalid(format!("alpha must lie in (0, 2), got {}", self.alpha)));
        }
        if !self.beta.is_finite() {
            return Err(invalid(format!("beta must be finite, got {}", self.beta)));
        }
        if !(self.m1 >= 0.0 && self.m2 >= 0.0) || !(self.m1 + self.m2 > 0.0) {
            return Err(invalid(format!(
                "weights need m1, m2 >= 0 and m1 + m2 > 0, got m1 = {}, m2 = {}",
                self.m1, self.m2
            )));
        }
        if !(self.m1 + self.m2).is_finite() {
            return Err(invalid("weights must be finite"));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.m1 == self.m2 && self.beta == 0.0
    }

    pub fn skew(&self) -> f64 {
        (self.m1 - self.m2) / (self.m1 + self.m2)
    }

    pub fn to_record(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("m1", self.m1),
            ("m2", self.m2),
        ] {
            let _ = writeln!(s, "{k}={}", fmt17(v));
        }
        s
    }

    pub fn from_record(text: &str) -> Result<Self> {
        let map = parse_record(text, &["alpha", "beta", "m1", "m2"])?;
        Self::new(map[0], map[1], map[2], map[3])
    }
}

impl DerivedParams {
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("gamma_alpha", self.location),
            ("d_alpha", self.scale),
            ("theta", self.skew),
            ("Gamma_alpha", self.drift),
        ] {
            let _ = writeln!(s, "{k}={}", fmt17(v));
        }
        s
    }

    pub fn from_record(text: &str) -> Result<Self> {
        let v = parse_record(text, &["gamma_alpha", "d_alpha", "theta", "Gamma_alpha"])?;
        Ok(Self {
            location: v[0],
            scale: v[1],
            skew: v[2],
            drift: v[3],
        })
    }
}

/// Shortest round-trip representation with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    // Print negative zero as zero.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn parse_record(text: &str, keys: &[&str]) -> Result<Vec<f64>> {
    let mut out = vec![None; keys.len()];
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("expected key=value, got `{line}`")))?;
        let k = k.trim();
        let idx = keys
            .iter()
            .position(|&key| key == k)
            .ok_or_else(|| invalid(format!("unknown key `{k}`")))?;
        let val: f64 = v
            .trim()
            .parse()
            .map_err(|_| invalid(format!("`{}` is not a number for key `{k}`", v.trim())))?;
        out[idx] = Some(val);
    }
    keys.iter()
        .zip(out)
        .map(|(k, v)| v.ok_or_else(|| invalid(format!("missing key `{k}`"))))
        .collect()
}

/// `\int_0^\infty u^{-a} / (1 + u^2) du` for `a < 1`.
fn inverse_power_lorentz(a: f64, spec: &QuadratureSpec) -> Result<f64> {
    let head = integrate_power_weighted(&|u: f64| 1.0 / (1.0 + u * u), 0.0, 1.0, a, spec)?;
    let tail = integrate_power_tail(&|u: f64| 1.0 / (1.0 + u.powi(-2)), 1.0, a + 2.0, spec)?;
    Ok(head.value + tail.value)
}

/// Drift of the form `exp{it drift + \int (e^{itu} - 1 - itu 1_{|u|<=1}) nu(du)}`
/// for `alpha >= 1`, and of `exp{it drift + \int (e^{itu} - 1) nu(du)}` below.
pub fn compensated_drift(p: &StableParams) -> Result<f64> {
    p.validate()?;
    let spec = tight_spec();
    let a = p.alpha;
    let diff = p.m1 - p.m2;
    if diff == 0.0 {
        return Ok(p.beta);
    }
    if a < 1.0 {
        return Ok(p.beta - diff * inverse_power_lorentz(a, &spec)?);
    }
    // 2 \int_0^1 u^{2-a}/(1+u^2) - \int_0^\infty (1 ∧ u^2) u^{-a}/(1+u^2)
    let inner = adaptive(&|u: f64| u.powf(2.0 - a) / (1.0 + u * u), 0.0, 1.0, &spec)?.value;
    let outer = integrate_power_tail(&|u: f64| 1.0 / (1.0 + u.powi(-2)), 1.0, a + 2.0, &spec)?
        .value;
    Ok(p.beta + diff * (2.0 * inner - (inner + outer)))
}

/// `(sin u - u) / u^2`, accurate near zero.
fn sin_minus_id_over_sq(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        let u2 = u * u;
        -u / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0))
    } else {
        (u.sin() - u) / (u * u)
    }
}

/// `\int_0^\infty (sin u / u^2 - 1/(u(1+u^2))) du` by quadrature.
pub fn cauchy_location_integral(spec: &QuadratureSpec) -> Result<f64> {
    let head = adaptive(
        &|u: f64| sin_minus_id_over_sq(u) + u / (1.0 + u * u),
        0.0,
        1.0,
        spec,
    )?;
    let osc = integrate_fourier(&|u: f64| 1.0 / (u * u), 1.0, 1.0, Trig::Sin, spec)?;
    let rational = integrate_with_error(
        &|u: f64| 1.0 / (u * (1.0 + u * u)),
        1.0,
        f64::INFINITY,
        spec,
    )?;
    Ok(head.value + osc.value - rational.value)
}

/// `(e^{-u} - 1 + u) / u^2`, accurate near zero.
fn exp_remainder_over_sq(u: f64) -> f64 {
    if u < 1e-3 {
        0.5 - u / 6.0 + u * u / 24.0
    } else {
        ((-u).exp_m1() + u) / (u * u)
    }
}

/// `(e^{-u} - 1) / u`, with its limit at zero.
fn exp_decrement_over_id(u: f64) -> f64 {
    if u == 0.0 {
        -1.0
    } else {
        (-u).exp_m1() / u
    }
}

/// Scale parameter of the closed form.
pub fn scale_parameter(p: &StableParams) -> Result<f64> {
    p.validate()?;
    let a = p.alpha;
    let mass = p.m1 + p.m2;
    if a == 1.0 {
        return Ok(mass * PI / 2.0);
    }
    let spec = tight_spec();
    let integral = if a < 1.0 {
        // \int (e^{-u} - 1) u^{-1-a} du
        let head = integrate_power_weighted(&exp_decrement_over_id, 0.0, 1.0, a, &spec)?;
        let tail = integrate_power_tail(&|u: f64| (-u).exp_m1(), 1.0, 1.0 + a, &spec)?;
        head.value + tail.value
    } else {
        // \int (e^{-u} - 1 + u) u^{-1-a} du
        let head = integrate_power_weighted(&exp_remainder_over_sq, 0.0, 1.0, a - 1.0, &spec)?;
        let tail =
            integrate_power_tail(&|u: f64| ((-u).exp_m1() + u) / u, 1.0, a, &spec)?;
        head.value + tail.value
    };
    Ok(-mass * integral * (PI * a / 2.0).cos())
}

/// Location parameter of the closed form.
pub fn location_parameter(p: &StableParams) -> Result<f64> {
    p.validate()?;
    let a = p.alpha;
    let diff = p.m1 - p.m2;
    if diff == 0.0 {
        return Ok(p.beta);
    }
    let spec = tight_spec();
    if a < 1.0 {
        Ok(p.beta - diff * inverse_power_lorentz(a, &spec)?)
    } else if a == 1.0 {
        Ok(p.beta + diff * cauchy_location_integral(&spec)?)
    } else {
        let head = adaptive(&|u: f64| u.powf(2.0 - a) / (1.0 + u * u), 0.0, 1.0, &spec)?;
        let tail = integrate_power_tail(&|u: f64| 1.0 / (1.0 + u.powi(-2)), 1.0, a, &spec)?;
        Ok(p.beta + diff * (head.value + tail.value))
    }
}

/// Evaluate all derived parameters by quadrature of their defining integrals.
pub fn derive_params(p: &StableParams) -> Result<DerivedParams> {
    Ok(DerivedParams {
        drift: compensated_drift(p)?,
        location: location_parameter(p)?,
        scale: scale_parameter(p)?,
        skew: p.skew(),
    })
}

impl std::str::FromStr for StableParams {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_record(s)
    }
}
