//! Bounded smooth test functions with analytic derivatives.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::interp::CubicSpline;

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Behaviour at `|x| -> inf`, used to choose tail quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayClass {
    CompactlySupported { lo: f64, hi: f64 },
    GaussianDecay,
    /// `|g(x)| = O(|x|^{-k})`; `k = 0` for bounded, non-decaying functions.
    PolynomialDecay(f64),
}

#[derive(Clone)]
pub struct TestFunction {
    name: String,
    value: Scalar,
    d1: Scalar,
    d2: Scalar,
    d3: Option<Scalar>,
    pub decay: DecayClass,
    /// `(||g||, ||g'||, ||g''||)`.
    pub sup_norms: (f64, f64, f64),
    /// Interval outside which `g` is flat to working precision, if any.
    pub core: Option<(f64, f64)>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("decay", &self.decay)
            .field("sup_norms", &self.sup_norms)
            .finish()
    }
}

/// Probe grid used for norms and derivative consistency.
fn probe_grid() -> impl Iterator<Item = f64> {
    (-4000..=4000).map(|i| i as f64 * 0.005)
}

impl TestFunction {
    /// Build from closures; sup norms are measured on a probe grid unless
    /// given, and derivatives are checked against central differences.
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        decay: DecayClass,
    ) -> Result<Self> {
        let mut g = TestFunction {
            name: name.into(),
            value: Arc::new(value),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            d3: None,
            decay,
            sup_norms: (0.0, 0.0, 0.0),
            core: None,
        };
        g.sup_norms = g.measured_norms();
        g.core = g.measured_core();
        g.check()?;
        Ok(g)
    }

    fn with_d3(mut self, d3: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.d3 = Some(Arc::new(d3));
        self
    }

    fn measured_norms(&self) -> (f64, f64, f64) {
        let mut n = (0.0f64, 0.0f64, 0.0f64);
        for x in probe_grid() {
            n.0 = n.0.max(self.value(x).abs());
            n.1 = n.1.max(self.d1(x).abs());
            n.2 = n.2.max(self.d2(x).abs());
        }
        n
    }

    fn measured_core(&self) -> Option<(f64, f64)> {
        let tol = 1e-16 * self.sup_norms.1;
        let active: Vec<f64> = probe_grid().filter(|&x| self.d1(x).abs() > tol).collect();
        match (active.first(), active.last()) {
            (Some(&a), Some(&b)) if a > -20.0 && b < 20.0 => Some((a - 0.005, b + 0.005)),
            (None, None) => Some((0.0, 0.0)),
            _ => None,
        }
    }

    /// Finite norms and derivative consistency on the probe grid.
    pub fn check(&self) -> Result<()> {
        let (a, b, c) = self.sup_norms;
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidTestFunction(format!("{}: unbounded", self.name)));
        }
        let h = 1e-4;
        for x in probe_grid().step_by(7) {
            let fd1 = (self.value(x + h) - self.value(x - h)) / (2.0 * h);
            let fd2 = (self.d1(x + h) - self.d1(x - h)) / (2.0 * h);
            if (fd1 - self.d1(x)).abs() > 1e-5 * (1.0 + b) || (fd2 - self.d2(x)).abs() > 1e-5 * (1.0 + c) {
                return Err(Error::InvalidTestFunction(format!(
                    "{}: derivatives inconsistent at x = {x}",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// The core, when `g` also vanishes outside it.
    pub fn vanishing_core(&self) -> Option<(f64, f64)> {
        let (lo, hi) = self.core?;
        let tol = 1e-14 * self.sup_norms.0.max(f64::MIN_POSITIVE);
        (self.value(lo).abs() <= tol && self.value(hi).abs() <= tol).then_some((lo, hi))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        (self.d1)(x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        (self.d2)(x)
    }

    pub fn d3(&self, x: f64) -> f64 {
        match &self.d3 {
            Some(f) => f(x),
            None => {
                let h = 1e-4 * (1.0 + x.abs());
                (self.d2(x + h) - self.d2(x - h)) / (2.0 * h)
            }
        }
    }

    /// `g'` as a test function of its own.
    pub fn derivative(&self) -> TestFunction {
        let g = self.clone();
        let (g1, g2, g3) = (g.clone(), g.clone(), g.clone());
        let decay = match self.decay {
            DecayClass::PolynomialDecay(k) => DecayClass::PolynomialDecay(k + 1.0),
            d => d,
        };
        let norms = (self.sup_norms.1, self.sup_norms.2, f64::NAN);
        let mut out = TestFunction {
            name: format!("d/dx {}", self.name),
            value: Arc::new(move |x| g1.d1(x)),
            d1: Arc::new(move |x| g2.d2(x)),
            d2: Arc::new(move |x| g3.d3(x)),
            d3: None,
            decay,
            sup_norms: norms,
            core: self.core,
        };
        out.sup_norms.2 = probe_grid().map(|x| out.d2(x).abs()).fold(0.0, f64::max);
        out
    }

    /// `a g + b h`.
    pub fn combine(a: f64, g: &TestFunction, b: f64, h: &TestFunction) -> TestFunction {
        let decay = match (g.decay, h.decay) {
            (DecayClass::PolynomialDecay(k1), DecayClass::PolynomialDecay(k2)) => {
                DecayClass::PolynomialDecay(k1.min(k2))
            }
            (DecayClass::PolynomialDecay(k), _) | (_, DecayClass::PolynomialDecay(k)) => {
                DecayClass::PolynomialDecay(k)
            }
            (
                DecayClass::CompactlySupported { lo: l1, hi: h1 },
                DecayClass::CompactlySupported { lo: l2, hi: h2 },
            ) => DecayClass::CompactlySupported {
                lo: l1.min(l2),
                hi: h1.max(h2),
            },
            _ => DecayClass::GaussianDecay,
        };
        let (g0, g1, g2, g3) = (g.clone(), g.clone(), g.clone(), g.clone());
        let (h0, h1, h2, h3) = (h.clone(), h.clone(), h.clone(), h.clone());
        let mut out = TestFunction {
            name: format!("{a}*{} + {b}*{}", g.name, h.name),
            value: Arc::new(move |x| a * g0.value(x) + b * h0.value(x)),
            d1: Arc::new(move |x| a * g1.d1(x) + b * h1.d1(x)),
            d2: Arc::new(move |x| a * g2.d2(x) + b * h2.d2(x)),
            d3: Some(Arc::new(move |x| a * g3.d3(x) + b * h3.d3(x))),
            decay,
            sup_norms: (0.0, 0.0, 0.0),
            core: None,
        };
        out.sup_norms = out.measured_norms();
        out.core = match (g.core, h.core) {
            (Some(a), Some(b)) => Some((a.0.min(b.0), a.1.max(b.1))),
            _ => None,
        };
        out
    }

    pub fn scaled(&self, c: f64) -> TestFunction {
        let z = TestFunction::constant(0.0);
        let mut out = TestFunction::combine(c, self, 0.0, &z);
        out.decay = self.decay;
        out.core = self.core;
        out.name = format!("{c}*{}", self.name);
        out
    }

    pub fn constant(c: f64) -> TestFunction {
        TestFunction {
            name: format!("const({c})"),
            value: Arc::new(move |_| c),
            d1: Arc::new(|_| 0.0),
            d2: Arc::new(|_| 0.0),
            d3: Some(Arc::new(|_| 0.0)),
            decay: DecayClass::PolynomialDecay(0.0),
            sup_norms: (c.abs(), 0.0, 0.0),
            core: Some((0.0, 0.0)),
        }
    }

    /// `exp(-(x - c)^2 / (2 w^2))`.
    pub fn gaussian_bump(center: f64, width: f64) -> TestFunction {
        let w2 = width * width;
        let g = move |x: f64| (-(x - center).powi(2) / (2.0 * w2)).exp();
        TestFunction {
            name: format!("gauss({center},{width})"),
            value: Arc::new(g),
            d1: Arc::new(move |x| -(x - center) / w2 * g(x)),
            d2: Arc::new(move |x| ((x - center).powi(2) / w2 - 1.0) / w2 * g(x)),
            d3: None,
            decay: DecayClass::GaussianDecay,
            sup_norms: (1.0, 1.0 / (width * std::f64::consts::E.sqrt()), 1.0 / w2),
            core: Some((center - 10.0 * width, center + 10.0 * width)),
        }
        .with_d3(move |x| {
            let y = x - center;
            (3.0 * y / (w2 * w2) - y.powi(3) / (w2 * w2 * w2)) * g(x)
        })
    }

    /// `exp(-x^2)`.
    pub fn gaussian() -> TestFunction {
        let mut g = Self::gaussian_bump(0.0, std::f64::consts::FRAC_1_SQRT_2);
        g.name = "exp(-x^2)".into();
        g
    }

    pub fn tanh() -> TestFunction {
        let sech2 = |x: f64| 1.0 / x.cosh().powi(2);
        TestFunction {
            name: "tanh".into(),
            value: Arc::new(f64::tanh),
            d1: Arc::new(sech2),
            d2: Arc::new(move |x| -2.0 * x.tanh() * sech2(x)),
            d3: None,
            decay: DecayClass::PolynomialDecay(0.0),
            sup_norms: (1.0, 1.0, 4.0 / (3.0 * 3f64.sqrt())),
            core: Some((-19.0, 19.0)),
        }
        .with_d3(move |x| {
            let t = x.tanh();
            let s = sech2(x);
            -2.0 * s * s + 4.0 * t * t * s
        })
    }

    /// `tanh(x / s) exp(-x^2 / (2 w^2))`.
    pub fn tanh_window(scale: f64, width: f64) -> TestFunction {
        let w2 = width * width;
        let th = move |x: f64| (x / scale).tanh();
        let th1 = move |x: f64| (1.0 - th(x).powi(2)) / scale;
        let th2 = move |x: f64| -2.0 * th(x) * th1(x) / scale;
        let e = move |x: f64| (-x * x / (2.0 * w2)).exp();
        let e1 = move |x: f64| -x / w2 * e(x);
        let e2 = move |x: f64| (x * x / w2 - 1.0) / w2 * e(x);
        TestFunction::new(
            format!("tanh-window({scale},{width})"),
            move |x| th(x) * e(x),
            move |x| th1(x) * e(x) + th(x) * e1(x),
            move |x| th2(x) * e(x) + 2.0 * th1(x) * e1(x) + th(x) * e2(x),
            DecayClass::GaussianDecay,
        )
        .expect("analytic derivatives")
    }

    /// `cos^4(pi (x - c) / (2 L))` on `|x - c| < L`, zero elsewhere.
    pub fn compact_bump(center: f64, half_width: f64) -> TestFunction {
        let k = std::f64::consts::PI / (2.0 * half_width);
        let inside = move |x: f64| (x - center).abs() < half_width;
        TestFunction::new(
            format!("cos4-bump({center},{half_width})"),
            move |x| if inside(x) { (k * (x - center)).cos().powi(4) } else { 0.0 },
            move |x| {
                if inside(x) {
                    let y = k * (x - center);
                    -4.0 * k * y.cos().powi(3) * y.sin()
                } else {
                    0.0
                }
            },
            move |x| {
                if inside(x) {
                    let y = k * (x - center);
                    let (s, c) = y.sin_cos();
                    k * k * (12.0 * c * c * s * s - 4.0 * c.powi(4))
                } else {
                    0.0
                }
            },
            DecayClass::CompactlySupported {
                lo: center - half_width,
                hi: center + half_width,
            },
        )
        .expect("analytic derivatives")
    }

    /// `amp sin(omega x + phase)`.
    pub fn sinusoid(omega: f64, phase: f64, amp: f64) -> TestFunction {
        TestFunction {
            name: format!("{amp}*sin({omega}x+{phase})"),
            value: Arc::new(move |x| amp * (omega * x + phase).sin()),
            d1: Arc::new(move |x| amp * omega * (omega * x + phase).cos()),
            d2: Arc::new(move |x| -amp * omega * omega * (omega * x + phase).sin()),
            d3: Some(Arc::new(move |x| -amp * omega.powi(3) * (omega * x + phase).cos())),
            decay: DecayClass::PolynomialDecay(0.0),
            sup_norms: (amp.abs(), (amp * omega).abs(), (amp * omega * omega).abs()),
            core: None,
        }
    }

    /// A natural spline through tabulated values, extended by `c / x` decay
    /// beyond the knots; `tail_power` sets the decay exponent.
    pub fn from_spline(name: impl Into<String>, spline: CubicSpline, tail_power: f64) -> TestFunction {
        let s = Arc::new(spline);
        let (lo, hi) = (s.x_min(), s.x_max());
        let (v_lo, v_hi) = (s.eval(lo), s.eval(hi));
        let p = tail_power;
        let ext = move |x: f64, k: usize| -> f64 {
            let (x0, v0) = if x < lo { (lo, v_lo) } else { (hi, v_hi) };
            let r = x / x0;
            // v0 (x / x0)^{-p} and its derivatives
            match k {
                0 => v0 * r.powf(-p),
                1 => -p * v0 * r.powf(-p - 1.0) / x0,
                _ => p * (p + 1.0) * v0 * r.powf(-p - 2.0) / (x0 * x0),
            }
        };
        let (s0, s1, s2) = (s.clone(), s.clone(), s.clone());
        let inside = move |x: f64| x >= lo && x <= hi;
        let mut out = TestFunction {
            name: name.into(),
            value: Arc::new(move |x| if inside(x) { s0.eval(x) } else { ext(x, 0) }),
            d1: Arc::new(move |x| if inside(x) { s1.derivative(x) } else { ext(x, 1) }),
            d2: Arc::new(move |x| if inside(x) { s2.eval_all(x).2 } else { ext(x, 2) }),
            d3: None,
            decay: DecayClass::PolynomialDecay(p),
            sup_norms: (0.0, 0.0, 0.0),
            core: None,
        };
        let knots = s.knots();
        let mut n = (0.0f64, 0.0f64, 0.0f64);
        for &x in knots {
            let (v, d1, d2) = s.eval_all(x);
            n = (n.0.max(v.abs()), n.1.max(d1.abs()), n.2.max(d2.abs()));
        }
        out.sup_norms = n;
        out
    }
}

/// Dictionary used by the identity checks: bumps at three shifts, a
/// tanh window and a compact bump.
pub fn standard_dictionary() -> Vec<TestFunction> {
    vec![
        TestFunction::gaussian_bump(-2.0, 1.0),
        TestFunction::gaussian_bump(0.0, 1.0),
        TestFunction::gaussian_bump(2.0, 1.0),
        TestFunction::tanh_window(1.0, 2.0),
        TestFunction::compact_bump(0.5, 1.5),
    ]
}
