//! The standard stable law discretized on a sinh-mapped grid.

use crate::error::Result;
use crate::numerics::interp::CubicSpline;
use crate::numerics::parallel::map_indexed;
use crate::stable::density::StandardStable;

/// Six-point Gauss–Legendre rule on `[-1, 1]`.
pub(crate) const GL6: [(f64, f64); 6] = [
    (-0.932_469_514_203_152, 0.171_324_492_379_170_4),
    (-0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (-0.238_619_186_083_196_9, 0.467_913_934_572_691),
    (0.238_619_186_083_196_9, 0.467_913_934_572_691),
    (0.661_209_386_466_264_5, 0.360_761_573_048_138_6),
    (0.932_469_514_203_152, 0.171_324_492_379_170_4),
];

/// `\int_a^b f` by six-point Gauss–Legendre on `panels` equal pieces.
pub(crate) fn gauss_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GL6 {
            acc += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * acc
}

/// Nodes `z_k = c sinh(tau_k)` on a uniform `tau` grid with trapezoid
/// weights `c p(z_k) cosh(tau_k) dtau`, normalized to unit mass.
#[derive(Debug, Clone)]
pub struct StandardGrid {
    pub law: StandardStable,
    scale: f64,
    step: f64,
    tau_min: f64,
    /// Trapezoid mass before normalization.
    pub raw_mass: f64,
    z: Vec<f64>,
    w: Vec<f64>,
    density: CubicSpline,
}

/// Below this many nodes in the relevant window the y-space rule is used.
const MIN_WINDOW_NODES: usize = 64;

impl StandardGrid {
    /// `scale` sets the resolution near the mode, `reach` bounds `|z|` and
    /// `step` is the spacing in `tau`.
    pub fn new(law: StandardStable, scale: f64, reach: f64, step: f64) -> Result<Self> {
        let tau_max = (reach / scale).asinh();
        let n = (2.0 * tau_max / step).ceil() as usize + 1;
        let step = 2.0 * tau_max / (n - 1) as f64;
        let tau: Vec<f64> = (0..n).map(|i| -tau_max + step * i as f64).collect();
        let z: Vec<f64> = tau.iter().map(|t| scale * t.sinh()).collect();
        let p: Vec<f64> = map_indexed(n, |i| law.pdf(z[i]));
        let raw: Vec<f64> = (0..n).map(|i| scale * p[i] * tau[i].cosh() * step).collect();
        let mass: f64 = raw.iter().sum();
        let w = raw.iter().map(|v| v / mass).collect();
        let density = CubicSpline::new(tau, p)?;
        Ok(Self {
            law,
            scale,
            raw_mass: mass,
            step,
            tau_min: -tau_max,
            z,
            w,
            density,
        })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.z.iter().copied().zip(self.w.iter().copied())
    }

    /// Interpolated density; zero beyond the grid.
    pub fn pdf(&self, z: f64) -> f64 {
        let t = (z / self.scale).asinh();
        if t < self.density.x_min() || t > self.density.x_max() {
            return 0.0;
        }
        self.density.eval(t).max(0.0)
    }

    fn index_window(&self, z_lo: f64, z_hi: f64) -> (usize, usize) {
        let n = self.z.len();
        let pos = |z: f64| (((z / self.scale).asinh() - self.tau_min) / self.step).clamp(0.0, (n - 1) as f64);
        let lo = pos(z_lo).floor() as usize;
        let hi = (pos(z_hi).ceil() as usize + 1).min(n);
        (lo, hi)
    }

    /// `E g(a + s Z)`. With `support = Some((lo, hi))`, `g` must vanish
    /// outside `[lo, hi]`, and only the matching nodes are visited.
    pub fn expect(&self, g: &dyn Fn(f64) -> f64, support: Option<(f64, f64)>, a: f64, s: f64) -> f64 {
        if s == 0.0 {
            return g(a);
        }
        let Some((lo, hi)) = support else {
            return self.nodes().map(|(z, w)| w * g(a + s * z)).sum();
        };
        if hi <= lo {
            return 0.0;
        }
        let (i0, i1) = self.index_window((lo - a) / s, (hi - a) / s);
        if i1 - i0 >= MIN_WINDOW_NODES {
            return (i0..i1).map(|i| self.w[i] * g(a + s * self.z[i])).sum();
        }
        // The window is thin in tau: integrate over y with the interpolated density.
        let panels = ((hi - lo) / 0.25).ceil().max(4.0) as usize;
        gauss_panels(|y| g(y) * self.pdf((y - a) / s) / s, lo, hi, panels)
    }
}
