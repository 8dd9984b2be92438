//! Truncated kernels of a stable Lévy measure and of a sample law.

use crate::error::{Error, Result};
use crate::stable::params::StableParams;

fn require_heavy_mean(params: &StableParams) -> Result<()> {
    params.validate()?;
    if !(params.alpha > 1.0) {
        return Err(Error::OutOfScope(format!(
            "kernel decomposition needs alpha in (1, 2), got {}",
            params.alpha
        )));
    }
    Ok(())
}

fn require_cutoff(cutoff: f64) -> Result<()> {
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidParameter(format!("cutoff N must be positive, got {cutoff}")));
    }
    Ok(())
}

/// `int_t^N u nu(du)` for `0 <= t <= N`, mirrored with `m2` for negative
/// `t`, and zero for `|t| > N`.
pub fn kernel_knu(t: f64, cutoff: f64, params: &StableParams) -> Result<f64> {
    require_heavy_mean(params)?;
    require_cutoff(cutoff)?;
    if t.abs() > cutoff {
        return Ok(0.0);
    }
    let m = if t >= 0.0 { params.m1 } else { params.m2 };
    let a = params.alpha;
    Ok(m * (t.abs().powf(1.0 - a) - cutoff.powf(1.0 - a)) / (a - 1.0))
}

/// `int_0^t K_nu(s, N) ds` on the side of `t` (`t` in `[-N, N]`), signed so
/// that `F(b) - F(a)` integrates the kernel over `[a, b]`.
pub(crate) fn kernel_knu_primitive(t: f64, cutoff: f64, params: &StableParams) -> f64 {
    let a = params.alpha;
    let m = if t >= 0.0 { params.m1 } else { params.m2 };
    let s = t.abs().min(cutoff);
    let value = m / (a - 1.0) * (s.powf(2.0 - a) / (2.0 - a) - cutoff.powf(1.0 - a) * s);
    value.copysign(t)
}

/// `int_{|u| > N} |u| nu(du) = (m1 + m2) N^{1-alpha} / (alpha - 1)`.
pub fn levy_abs_tail(cutoff: f64, params: &StableParams) -> Result<f64> {
    require_heavy_mean(params)?;
    require_cutoff(cutoff)?;
    let a = params.alpha;
    Ok((params.m1 + params.m2) * cutoff.powf(1.0 - a) / (a - 1.0))
}

/// `int_{|u| <= U} u^2 nu(du) = (m1 + m2) U^{2-alpha} / (2 - alpha)`.
pub fn truncated_second_moment(level: f64, params: &StableParams) -> Result<f64> {
    params.validate()?;
    require_cutoff(level)?;
    let a = params.alpha;
    Ok((params.m1 + params.m2) * level.powf(2.0 - a) / (2.0 - a))
}

/// Sample mean of `Z 1{0 <= t <= Z <= N} - Z 1{-N <= Z <= t <= 0}`.
pub fn kernel_ki(t: f64, cutoff: f64, z_samples: &[f64]) -> Result<f64> {
    require_cutoff(cutoff)?;
    if z_samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let sum: f64 = z_samples
        .iter()
        .map(|&z| {
            let mut v = 0.0;
            if 0.0 <= t && t <= z && z <= cutoff {
                v += z;
            }
            if -cutoff <= z && z <= t && t <= 0.0 {
                v -= z;
            }
            v
        })
        .sum();
    Ok(sum / z_samples.len() as f64)
}

/// Sample kernel as a step function: pieces `(lo, hi, level)` covering
/// `[-N, N]`.
#[derive(Debug, Clone)]
pub(crate) struct EmpiricalKernel {
    pub pieces: Vec<(f64, f64, f64)>,
}

impl EmpiricalKernel {
    pub fn new(cutoff: f64, z_samples: &[f64]) -> Result<Self> {
        require_cutoff(cutoff)?;
        if z_samples.is_empty() {
            return Err(Error::EmptySample);
        }
        let inv_n = 1.0 / z_samples.len() as f64;
        let mut pos: Vec<f64> = z_samples.iter().copied().filter(|&z| z > 0.0 && z <= cutoff).collect();
        let mut neg: Vec<f64> = z_samples.iter().copied().filter(|&z| z < 0.0 && z >= -cutoff).map(|z| -z).collect();
        pos.sort_by(f64::total_cmp);
        neg.sort_by(f64::total_cmp);
        let mut pieces = Vec::new();
        for (side, values) in [(1.0, pos), (-1.0, neg)] {
            // Kernel at s in (v[k-1], v[k]) is sum_{j >= k} v[j] / n.
            let mut suffix = values.iter().sum::<f64>() * inv_n;
            let mut left = 0.0;
            for &v in &values {
                if v > left {
                    pieces.push(ordered(side * left, side * v, suffix));
                }
                suffix -= v * inv_n;
                left = v;
            }
            if cutoff > left {
                pieces.push(ordered(side * left, side * cutoff, 0.0));
            }
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { pieces })
    }
}

fn ordered(a: f64, b: f64, level: f64) -> (f64, f64, f64) {
    if a <= b {
        (a, b, level.max(0.0))
    } else {
        (b, a, level.max(0.0))
    }
}

/// `int_{-N}^{N} |K_nu(t, N) / n - K(t)| dt` for an empirical kernel `K`,
/// evaluated exactly piece by piece: on each piece `K` is constant and
/// `K_nu` is monotone, so the crossing point has a closed form.
pub(crate) fn kernel_mismatch_integral(
    n: usize,
    cutoff: f64,
    params: &StableParams,
    kernel: &EmpiricalKernel,
) -> f64 {
    let nf = n as f64;
    let a = params.alpha;
    let prim = |t: f64| kernel_knu_primitive(t, cutoff, params) / nf;
    let mut total = 0.0;
    for &(lo, hi, level) in &kernel.pieces {
        // On [lo, hi] within one side, K_nu/n decreases in |t|.
        let side_pos = lo >= 0.0 && hi > 0.0;
        let m = if side_pos { params.m1 } else { params.m2 };
        let near = if side_pos { lo } else { hi };
        let far = if side_pos { hi } else { lo };
        let integral = (prim(hi) - prim(lo)).abs();
        let width = hi - lo;
        // Crossing |t*| with K_nu(t*)/n = level.
        let cross = if m > 0.0 {
            let base = (a - 1.0) * nf * level / m + cutoff.powf(1.0 - a);
            base.powf(1.0 / (1.0 - a))
        } else {
            0.0
        };
        let near_abs = near.abs();
        let far_abs = far.abs();
        let value = if m == 0.0 || cross <= near_abs {
            // Kernel below the level on the whole piece.
            level * width - integral
        } else if cross >= far_abs {
            integral - level * width
        } else {
            let t_star = cross.copysign(if side_pos { 1.0 } else { -1.0 });
            let (above, below) = if side_pos {
                ((prim(t_star) - prim(lo)).abs(), (prim(hi) - prim(t_star)).abs())
            } else {
                ((prim(hi) - prim(t_star)).abs(), (prim(t_star) - prim(lo)).abs())
            };
            let w_above = cross - near_abs;
            let w_below = far_abs - cross;
            (above - level * w_above) + (level * w_below - below)
        };
        total += value.max(0.0);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{adaptive, integrate, integrate_power_tail, QuadratureSpec};

    #[test]
    fn closed_form_value() {
        let p = StableParams::new(1.5, 0.0, 1.0, 1.0).unwrap();
        let v = kernel_knu(1.0, 2.0, &p).unwrap();
        assert!((v - (2.0 - 2f64.sqrt())).abs() < 1e-14);
        assert!((kernel_knu(-1.0, 2.0, &p).unwrap() - v).abs() < 1e-14);
        assert_eq!(kernel_knu(2.0, 2.0, &p).unwrap(), 0.0);
        assert_eq!(kernel_knu(2.5, 2.0, &p).unwrap(), 0.0);
        assert!(kernel_knu(1.0, 2.0, &StableParams::symmetric(0.5, 1.0).unwrap()).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let spec = QuadratureSpec::with_tolerances(1e-14, 1e-13);
        for alpha in [1.2, 1.5, 1.8] {
            let p = StableParams::new(alpha, 0.0, 0.7, 1.3).unwrap();
            for cutoff in [0.5, 1.0, 2.0, 5.0, 20.0] {
                for t in [-3.0f64, -0.4, 0.05, 0.9, 4.0] {
                    let (lo, hi, m) = if t >= 0.0 { (t, cutoff, p.m1) } else { (-cutoff, t, p.m2) };
                    let q = if t.abs() > cutoff {
                        0.0
                    } else {
                        adaptive(&|u: f64| u.abs() * m * u.abs().powf(-alpha - 1.0), lo, hi, &spec)
                            .unwrap()
                            .value
                    };
                    let c = kernel_knu(t, cutoff, &p).unwrap();
                    assert!((c - q).abs() < 1e-8, "alpha {alpha} N {cutoff} t {t}: {c} vs {q}");
                }
            }
        }
    }

    #[test]
    fn tail_integral() {
        let p = StableParams::new(1.5, 0.0, 1.0, 1.0).unwrap();
        assert!((levy_abs_tail(4.0, &p).unwrap() - 2.0).abs() < 1e-14);
        let spec = QuadratureSpec::with_tolerances(1e-13, 1e-12);
        let q = integrate_power_tail(&|u: f64| 2.0 * u * u.powf(-1.0), 4.0, 1.5, &spec).unwrap().value;
        assert!((q - 2.0).abs() < 1e-9, "{q}");
    }

    #[test]
    fn sample_kernel() {
        let two_point = [-1.0, 1.0];
        assert!((kernel_ki(0.5, 2.0, &two_point).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(kernel_ki(3.0, 2.0, &two_point).unwrap(), 0.0);
        assert!((kernel_ki(-0.5, 2.0, &two_point).unwrap() - 0.5).abs() < 1e-15);
        assert!(kernel_ki(0.0, 2.0, &[]).is_err());
        let zs = [-1.7, -0.3, 0.2, 0.4, 2.5, 1.1];
        for t in [-2.0, -1.0, -0.1, 0.0, 0.3, 1.0, 3.0] {
            assert!(kernel_ki(t, 2.0, &zs).unwrap() >= 0.0);
        }
    }

    #[test]
    fn empirical_kernel_pieces_agree_with_pointwise() {
        let zs = [-1.7, -0.3, 0.2, 0.4, 2.5, 1.1, 0.4];
        let k = EmpiricalKernel::new(2.0, &zs).unwrap();
        for &(lo, hi, level) in &k.pieces {
            let mid = 0.5 * (lo + hi);
            assert!((kernel_ki(mid, 2.0, &zs).unwrap() - level).abs() < 1e-15, "{lo} {hi}");
        }
        let covered: f64 = k.pieces.iter().map(|p| p.1 - p.0).sum();
        assert!((covered - 4.0).abs() < 1e-14);
    }

    #[test]
    fn mismatch_integral_matches_quadrature() {
        let p = StableParams::new(1.5, 0.0, 1.0, 0.6).unwrap();
        let zs = [-1.7, -0.3, 0.2, 0.4, 2.5, 1.1, 0.05, -0.01];
        let cutoff = 2.0;
        let n = 3;
        let k = EmpiricalKernel::new(cutoff, &zs).unwrap();
        let exact = kernel_mismatch_integral(n, cutoff, &p, &k);
        let spec = QuadratureSpec::with_tolerances(1e-12, 1e-11).singular(0.5);
        let mut q = 0.0;
        for &(lo, hi, level) in &k.pieces {
            let f = |t: f64| (kernel_knu(t, cutoff, &p).unwrap() / n as f64 - level).abs();
            let m = 200;
            for j in 0..m {
                let a = lo + (hi - lo) * j as f64 / m as f64;
                let b = lo + (hi - lo) * (j + 1) as f64 / m as f64;
                q += if b == 0.0 {
                    integrate(&|t: f64| f(-t), 0.0, -a, &spec).unwrap()
                } else if a == 0.0 {
                    integrate(&f, a, b, &spec).unwrap()
                } else {
                    integrate(&f, a, b, &spec.regular()).unwrap()
                };
            }
        }
        assert!((exact - q).abs() < 1e-8, "{exact} vs {q}");
    }
}
