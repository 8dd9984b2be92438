//! Characteristic functions: the Lévy–Khintchine integral evaluated by
//! quadrature, and the closed stable form.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::levy::{IDDTriplet, LevySpec, Side, TailGrowth};
use super::params::{compensated_drift, derive_params, DerivedParams, StableParams};
use crate::error::{invalid, Result};
use crate::numerics::oscillatory::{integrate_fourier, Trig};
use crate::numerics::quadrature::QuadratureSpec;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `(sin x - x) / x^3`, accurate near zero.
fn sin_remainder(x: f64) -> f64 {
    if x.abs() < 0.05 {
        let x2 = x * x;
        -1.0 / 6.0 + x2 / 120.0 - x2 * x2 / 5040.0 + x2 * x2 * x2 / 362_880.0
    } else {
        (x.sin() - x) / (x * x * x)
    }
}

/// `\int (e^{itu} - 1 - itu 1_{|u|<=1}) nu(du)`, the compensator dropped
/// when `compensate` is false.
pub fn levy_exponent(
    levy: &LevySpec,
    t: f64,
    compensate: bool,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if t < 0.0 {
        return Ok(levy_exponent(levy, -t, compensate, spec)?.conj());
    }
    let mut re = 0.0;
    let mut im = 0.0;
    for side in [Side::Positive, Side::Negative] {
        let sgn = side.sign();
        // |u| <= 1
        re += levy
            .small_jump_integral(
                side,
                2.0,
                &|r: f64| {
                    let s = sinc(0.5 * t * r);
                    -0.5 * t * t * s * s
                },
                spec,
            )?
            .value;
        let odd = if compensate {
            levy.small_jump_integral(side, 3.0, &|r: f64| t.powi(3) * sin_remainder(t * r), spec)?
        } else {
            levy.small_jump_integral(side, 1.0, &|r: f64| t * sinc(t * r), spec)?
        };
        im += sgn * odd.value;
        // |u| > 1
        let (cos_part, sin_part) = large_jump_trig(levy, side, t, spec)?;
        let mass = levy
            .large_jump_integral(side, TailGrowth::Power(0.0), &|_| 1.0, spec)?
            .value;
        re += cos_part - mass;
        im += sgn * sin_part;
    }
    Ok(Complex64::new(re, im))
}

/// `(\int_1^\infty cos(tr) nu(sr) dr, \int_1^\infty sin(tr) nu(sr) dr)`.
fn large_jump_trig(levy: &LevySpec, side: Side, t: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let sgn = side.sign();
    let hi = match side {
        Side::Positive => levy.shape.support.1,
        Side::Negative => -levy.shape.support.0,
    };
    if hi <= 1.0 {
        return Ok((0.0, 0.0));
    }
    if hi.is_finite() {
        let c = levy.large_jump_integral(side, TailGrowth::Decaying, &|r| (t * r).cos(), spec)?;
        let s = levy.large_jump_integral(side, TailGrowth::Decaying, &|r| (t * r).sin(), spec)?;
        return Ok((c.value, s.value));
    }
    let dens = |r: f64| levy.density(sgn * r);
    let c = integrate_fourier(&dens, 1.0, t, Trig::Cos, spec)?;
    let s = integrate_fourier(&dens, 1.0, t, Trig::Sin, spec)?;
    Ok((c.value, s.value))
}

/// Characteristic function of an infinitely divisible triplet.
pub fn cf_idd(triplet: &IDDTriplet, t: f64) -> Result<Complex64> {
    cf_idd_with(triplet, t, &QuadratureSpec::default())
}

pub fn cf_idd_with(triplet: &IDDTriplet, t: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let z = levy_exponent(&triplet.levy, t, true, spec)?;
    Ok((Complex64::new(-0.5 * triplet.sigma2 * t * t, t * triplet.beta) + z).exp())
}

/// A stable law with its derived parameters cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableLaw {
    pub params: StableParams,
    pub derived: DerivedParams,
}

impl StableLaw {
    pub fn new(params: StableParams) -> Result<Self> {
        Ok(Self {
            params,
            derived: derive_params(&params)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    /// `tan(pi alpha / 2)` times the skewness, the imaginary weight of the
    /// closed form for `alpha != 1`.
    pub fn skew_tangent(&self) -> f64 {
        self.derived.skew * (PI * self.params.alpha / 2.0).tan()
    }

    /// Scale in the `sigma |t|` sense: `d^{1/alpha}`.
    pub fn sigma(&self) -> f64 {
        if self.params.alpha == 1.0 {
            self.derived.scale
        } else {
            self.derived.scale.powf(1.0 / self.params.alpha)
        }
    }

    /// Logarithm of the closed-form characteristic function.
    pub fn log_cf(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let a = self.params.alpha;
        let d = self.derived.scale;
        let at = t.abs();
        let sg = t.signum();
        let skew_term = if a == 1.0 {
            -self.derived.skew * sg * (2.0 / PI) * at.ln()
        } else {
            self.skew_tangent() * sg
        };
        let mag = d * at.powf(a);
        Complex64::new(-mag, t * self.derived.location + mag * skew_term)
    }

    pub fn cf_closed(&self, t: f64) -> Complex64 {
        self.log_cf(t).exp()
    }

    /// Characteristic function from the drift and the Lévy integral.
    pub fn cf_quadrature(&self, t: f64, spec: &QuadratureSpec) -> Result<Complex64> {
        let levy = super::levy::stable_levy(&self.params)?;
        let z = levy_exponent(&levy, t, self.params.alpha >= 1.0, spec)?;
        Ok((Complex64::new(0.0, t * self.derived.drift) + z).exp())
    }

    /// `cf(t) / cf(eta t)`.
    pub fn sd_ratio(&self, eta: f64, t: f64) -> Complex64 {
        (self.log_cf(t) - self.log_cf(eta * t)).exp()
    }
}

pub fn cf_stable(params: &StableParams, t: f64) -> Result<Complex64> {
    params.validate()?;
    let levy = super::levy::stable_levy(params)?;
    let drift = compensated_drift(params)?;
    let z = levy_exponent(&levy, t, params.alpha >= 1.0, &QuadratureSpec::default())?;
    Ok((Complex64::new(0.0, t * drift) + z).exp())
}

pub fn cf_stable_closed(params: &StableParams, t: f64) -> Result<Complex64> {
    Ok(StableLaw::new(*params)?.cf_closed(t))
}

pub fn sd_ratio_cf(params: &StableParams, eta: f64, t: f64) -> Result<Complex64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid(format!("eta must lie in (0, 1), got {eta}")));
    }
    Ok(StableLaw::new(*params)?.sd_ratio(eta, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::levy::uniform_jumps;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn normalization_and_gaussian_case() {
        let g = IDDTriplet::gaussian(0.0, 1.0).unwrap();
        assert_eq!(cf_idd(&g, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        assert!(close(cf_idd(&g, 2.0).unwrap(), Complex64::new((-2.0f64).exp(), 0.0), 1e-15));
    }

    #[test]
    fn compound_poisson_matches_closed_form() {
        // rate 2, jumps uniform on [0, 1]: exponent 2 (e^{it} - 1)/(it) - 2 - it * 1
        let levy = uniform_jumps(2.0, 0.0, 1.0).unwrap();
        let trip = IDDTriplet::new(0.0, 0.0, levy).unwrap();
        for t in [-3.0, 0.5, 1.7, 6.0] {
            let it = Complex64::new(0.0, t);
            let expo = 2.0 * ((it.exp() - 1.0) / it - 1.0) - it * 1.0;
            assert!(close(cf_idd(&trip, t).unwrap(), expo.exp(), 1e-9), "t = {t}");
        }
    }

    #[test]
    fn stable_forms_agree() {
        for (a, m1, m2, b) in [
            (0.5, 1.0, 1.0, 0.0),
            (0.3, 2.0, 1.0, 1.0),
            (0.9, 2.0, 1.0, 0.0),
            (1.0, 2.0, 1.0, 1.0),
            (1.2, 1.0, 1.0, 1.0),
            (1.5, 2.0, 1.0, 0.0),
            (1.9, 2.0, 1.0, 1.0),
        ] {
            let p = StableParams::new(a, b, m1, m2).unwrap();
            let law = StableLaw::new(p).unwrap();
            for t in [-7.3, -1.0, -0.05, 0.0, 0.3, 2.0, 10.0] {
                let q = cf_stable(&p, t).unwrap();
                let c = law.cf_closed(t);
                assert!(close(q, c, 1e-8), "alpha {a} t {t}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn triplet_form_matches_closed_form() {
        for p in [
            StableParams::new(1.5, 0.0, 1.0, 1.0).unwrap(),
            StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap(),
            StableParams::new(0.6, 0.3, 0.5, 1.5).unwrap(),
        ] {
            let trip = IDDTriplet::stable(&p).unwrap();
            for t in [-2.0, 1.0, 4.0] {
                assert!(close(cf_idd(&trip, t).unwrap(), cf_stable_closed(&p, t).unwrap(), 1e-8));
            }
        }
    }

    #[test]
    fn symmetric_cases_are_real_with_exact_modulus() {
        let p = StableParams::symmetric(0.5, 1.0).unwrap();
        let law = StableLaw::new(p).unwrap();
        let mut prev = 1.0;
        for i in 0..50 {
            let t = i as f64 * 0.2;
            let c = cf_stable(&p, t).unwrap();
            assert!(c.im.abs() < 1e-12 && c.re > 0.0);
            let m = c.norm();
            assert!((m - (-law.derived.scale * t.powf(0.5)).exp()).abs() < 1e-8);
            assert!(m <= prev + 1e-12);
            prev = m;
        }
    }

    #[test]
    fn unit_alpha_symmetric_is_cauchy() {
        let p = StableParams::symmetric(1.0, 1.0).unwrap();
        let c = cf_stable_closed(&p, 2.0).unwrap();
        assert!(close(c, Complex64::new((-2.0 * PI).exp(), 0.0), 1e-15));
    }

    #[test]
    fn ratio_is_closed_form_for_symmetric_laws() {
        let p = StableParams::symmetric(0.5, 1.0).unwrap();
        let d = StableLaw::new(p).unwrap().derived.scale;
        for t in [0.0, 0.5, -3.0] {
            let r = sd_ratio_cf(&p, 0.4, t).unwrap();
            let oracle = (-d * (1.0 - 0.4f64.powf(0.5)) * t.abs().powf(0.5)).exp();
            assert!(close(r, Complex64::new(oracle, 0.0), 1e-14));
            if t != 0.0 {
                assert!(r.norm() < 1.0);
            }
        }
        assert!(sd_ratio_cf(&p, 1.0, 1.0).is_err());
        let near_one = sd_ratio_cf(&p, 1.0 - 1e-9, 2.0).unwrap();
        assert!(close(near_one, Complex64::new(1.0, 0.0), 1e-7));
    }
}
