//! Smooth Wasserstein bound for sums of centred variables, `alpha` in `(1, 2)`,
//! through the kernel decomposition.

use rand::Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};
use crate::numerics::rng::RngStream;
use crate::stable::params::{compensated_drift, fmt17, StableParams};

use super::kernels::{kernel_mismatch_integral, levy_abs_tail, truncated_second_moment, EmpiricalKernel};
use super::report::{BoundParameters, BoundReport, BoundTerm, Constant, ConstantsPolicy};

/// Centred law on two atoms `lo < 0 < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPointLaw {
    pub lo: f64,
    pub hi: f64,
    /// `P(Z = hi)`, fixed by `E Z = 0`.
    pub p_hi: f64,
}

impl TwoPointLaw {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < 0.0 && hi > 0.0 && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "two-point law needs lo < 0 < hi, got {lo}, {hi}"
            )));
        }
        Ok(Self {
            lo,
            hi,
            p_hi: -lo / (hi - lo),
        })
    }

    pub fn symmetric(a: f64) -> Result<Self> {
        Self::new(-a, a)
    }

    /// `+-a n^{-1/alpha}` with `a^2 = int_{|u|<=U} u^2 nu(du)`, the Lévy
    /// measure's second moment truncated at `U`.
    pub fn variance_matched(n: usize, params: &StableParams, truncation_u: f64) -> Result<Self> {
        let a = truncated_second_moment(truncation_u, params)?.sqrt();
        Self::symmetric(a * (n as f64).powf(-1.0 / params.alpha))
    }

    pub fn variance(&self) -> f64 {
        self.p_hi * self.hi * self.hi + (1.0 - self.p_hi) * self.lo * self.lo
    }

    pub fn sample(&self, count: usize, rng: &RngStream) -> Vec<f64> {
        let mut g = rng.generator();
        (0..count)
            .map(|_| if g.sample::<f64, _>(Open01) < self.p_hi { self.hi } else { self.lo })
            .collect()
    }

    /// `E[|Z| 1{|Z| > N}]`.
    pub fn abs_tail(&self, cutoff: f64) -> f64 {
        let mut v = 0.0;
        if self.hi > cutoff {
            v += self.p_hi * self.hi;
        }
        if -self.lo > cutoff {
            v += (1.0 - self.p_hi) * -self.lo;
        }
        v
    }
}

/// Bound on `d_{W2}(S_n, X)` for `S_n = Z_1 + ... + Z_n` with i.i.d. summands
/// drawn by `z_dist(count, stream)`; the sample kernel and the sample tail
/// are Monte Carlo estimates over `mc_samples` draws.
pub fn bound_w2<S>(
    n: usize,
    z_dist: &S,
    params: &StableParams,
    cutoff: f64,
    consts: &ConstantsPolicy,
    rng: &RngStream,
    mc_samples: usize,
) -> Result<BoundReport>
where
    S: Fn(usize, &RngStream) -> Vec<f64> + ?Sized,
{
    params.validate()?;
    consts.validate()?;
    if !(params.alpha > 1.0) {
        return Err(Error::OutOfScope(format!(
            "the smooth Wasserstein bound needs alpha in (1, 2), got {}",
            params.alpha
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let z = z_dist(mc_samples, rng);
    if z.is_empty() {
        return Err(Error::EmptySample);
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidDistribution("summand sampler produced a non-finite value".into()));
    }
    let nf = n as f64;
    let kernel = EmpiricalKernel::new(cutoff, &z)?;
    let mismatch = 0.5 * nf * kernel_mismatch_integral(n, cutoff, params, &kernel);
    let sample_tail = z.iter().filter(|v| v.abs() > cutoff).map(|v| v.abs()).sum::<f64>() / z.len() as f64;
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    let terms = vec![
        BoundTerm {
            name: "kernel_mismatch",
            value: mismatch,
            constant: None,
        },
        BoundTerm {
            name: "levy_tail",
            value: 2.0 * levy_abs_tail(cutoff, params)?,
            constant: None,
        },
        BoundTerm {
            name: "summand_tail",
            value: 2.0 * nf * sample_tail,
            constant: None,
        },
        BoundTerm {
            name: "location",
            value: compensated_drift(params)?.abs(),
            constant: None,
        },
        BoundTerm {
            name: "large_jump_mean",
            value: levy_abs_tail(1.0, params)?,
            constant: None,
        },
        BoundTerm {
            name: "c2_nu_term",
            value: consts.c2_nu / std::f64::consts::SQRT_2,
            constant: Some(Constant::TwoNu),
        },
    ];
    let notes = vec![
        "S_n = Z_1 + ... + Z_n".to_string(),
        format!("summand draws: {mc_samples}, sample mean {}", fmt17(mean)),
        "location and large-jump terms do not decay in n".to_string(),
    ];
    Ok(BoundReport::from_terms(
        terms,
        BoundParameters {
            n,
            cutoff,
            alpha: params.alpha,
            constants: *consts,
            notes,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::kernels::kernel_knu;

    /// Symmetric law with `|Z|` density `m u^{-alpha-1} / n` on `[tau, N]`
    /// and an atom at zero: its kernel is `K_nu / n` away from `[-tau, tau]`.
    fn matched_sampler(n: usize, p: StableParams, tau: f64, cutoff: f64) -> impl Fn(usize, &RngStream) -> Vec<f64> {
        let a = p.alpha;
        let side_mass = p.m1 / n as f64 * (tau.powf(-a) - cutoff.powf(-a)) / a;
        assert!(2.0 * side_mass < 1.0);
        move |count, rng| {
            let mut g = rng.generator();
            (0..count)
                .map(|_| {
                    let u: f64 = g.sample(Open01);
                    if u >= 2.0 * side_mass {
                        return 0.0;
                    }
                    let (sign, v) = if u < side_mass { (1.0, u / side_mass) } else { (-1.0, u / side_mass - 1.0) };
                    // Inverse CDF of u^{-a-1} on [tau, N].
                    let r = tau.powf(-a) - v * (tau.powf(-a) - cutoff.powf(-a));
                    sign * r.powf(-1.0 / a)
                })
                .collect()
        }
    }

    #[test]
    fn matched_kernels_leave_small_mismatch() {
        let p = StableParams::symmetric(1.5, 1.0).unwrap();
        let (n, tau, cutoff) = (1000, 0.05, 2.0);
        let sampler = matched_sampler(n, p, tau, cutoff);
        let r = bound_w2(n, &sampler, &p, cutoff, &ConstantsPolicy::unit(), &RngStream::new(5), 400_000).unwrap();
        // Exact mismatch of the matched law: m tau^{2-alpha} / (2 - alpha).
        let deterministic = tau.powf(0.5) / 0.5;
        let mismatch = r.term("kernel_mismatch").unwrap();
        // Compare with a badly matched two-point law at the same n.
        let bad = TwoPointLaw::symmetric(0.5).unwrap();
        let rb = bound_w2(n, &|c, s: &RngStream| bad.sample(c, s), &p, cutoff, &ConstantsPolicy::unit(), &RngStream::new(5), 400_000)
            .unwrap();
        assert!(mismatch < 1.5 * deterministic, "{mismatch} vs {deterministic}");
        assert!(mismatch < 0.1 * rb.term("kernel_mismatch").unwrap());
        assert_eq!(r.term("summand_tail"), Some(0.0));
    }

    #[test]
    fn closed_form_tail_terms() {
        let p = StableParams::new(1.5, 0.0, 1.0, 1.0).unwrap();
        let law = TwoPointLaw::symmetric(0.3).unwrap();
        let sampler = |c: usize, s: &RngStream| law.sample(c, s);
        let r = bound_w2(10, &sampler, &p, 4.0, &ConstantsPolicy::unit(), &RngStream::new(1), 10_000).unwrap();
        assert!((r.term("levy_tail").unwrap() - 4.0).abs() < 1e-14);
        assert!((r.term("large_jump_mean").unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(r.term("location"), Some(0.0));
        assert!(r.sum_defect() <= 1e-12);
        let mut prev = f64::INFINITY;
        for cutoff in [1.0, 4.0, 16.0, 64.0] {
            let r = bound_w2(10, &sampler, &p, cutoff, &ConstantsPolicy::unit(), &RngStream::new(1), 1000).unwrap();
            let tails = r.term("levy_tail").unwrap() + r.term("summand_tail").unwrap();
            assert!(tails < prev);
            prev = tails;
        }
    }

    #[test]
    fn mismatch_of_exact_two_point_kernel() {
        // With samples equal to the atoms in proportion, the sample kernel is exact.
        let p = StableParams::symmetric(1.5, 1.0).unwrap();
        let law = TwoPointLaw::symmetric(0.5).unwrap();
        let cutoff = 2.0;
        let n = 4;
        let r = bound_w2(n, &|_, _: &RngStream| vec![-0.5, 0.5], &p, cutoff, &ConstantsPolicy::unit(), &RngStream::new(0), 2)
            .unwrap();
        // Oracle: midpoint rule in s = sqrt(t), symmetric sides.
        let k = 400_000;
        let top = cutoff.sqrt();
        let mut q = 0.0;
        for j in 0..k {
            let s = top * (j as f64 + 0.5) / k as f64;
            let t = s * s;
            let ki = if t <= law.hi { 0.5 * law.hi } else { 0.0 };
            q += 2.0 * s * (kernel_knu(t, cutoff, &p).unwrap() / n as f64 - ki).abs() * top / k as f64;
        }
        let oracle = 0.5 * n as f64 * 2.0 * q;
        assert!((r.term("kernel_mismatch").unwrap() - oracle).abs() < 1e-6 * oracle, "{} vs {oracle}", r.term("kernel_mismatch").unwrap());
    }

    #[test]
    fn two_point_mismatch_tends_to_half_kernel_mass() {
        // Finite-variance summands: n K_i collapses to the origin, so the
        // mismatch grows to (1/2) int |K_nu| = (m1 + m2) N^{2-alpha} / (2 (2 - alpha)).
        let p = StableParams::symmetric(1.5, 1.0).unwrap();
        let c = ConstantsPolicy::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let cutoff: f64 = 4.0;
        let limit = 2.0 * cutoff.powf(0.5) / (2.0 * 0.5);
        let mut prev = 0.0;
        for n in [10, 100, 1000, 10_000] {
            let law = TwoPointLaw::variance_matched(n, &p, c.truncation_u).unwrap();
            let r = bound_w2(n, &|k, s: &RngStream| law.sample(k, s), &p, cutoff, &c, &RngStream::new(1), 100_000).unwrap();
            let m = r.term("kernel_mismatch").unwrap();
            assert!(m > prev && m < limit, "n = {n}: {m}");
            prev = m;
        }
        assert!(limit - prev < 0.05 * limit);
    }

    #[test]
    fn two_point_laws() {
        let law = TwoPointLaw::new(-1.0, 2.0).unwrap();
        assert!((law.p_hi - 1.0 / 3.0).abs() < 1e-15);
        assert!((law.variance() - 2.0).abs() < 1e-14);
        assert!((law.abs_tail(1.5) - 2.0 / 3.0).abs() < 1e-15);
        assert!(TwoPointLaw::new(1.0, 2.0).is_err());
        let p = StableParams::symmetric(1.5, 1.0).unwrap();
        let v = TwoPointLaw::variance_matched(1, &p, 1.0).unwrap();
        assert!((v.variance() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn scope() {
        let p = StableParams::symmetric(0.5, 1.0).unwrap();
        let law = TwoPointLaw::symmetric(1.0).unwrap();
        assert!(matches!(
            bound_w2(3, &|c, s: &RngStream| law.sample(c, s), &p, 1.0, &ConstantsPolicy::unit(), &RngStream::new(0), 10),
            Err(Error::OutOfScope(_))
        ));
    }
}
