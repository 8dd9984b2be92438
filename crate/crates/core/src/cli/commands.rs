//! One function per subcommand. Each returns the files to write and a few
//! summary lines for the terminal.

use crate::bounds::{
    bound_w2, bound_wdelta, empirical_w2h, empirical_wdelta, normalized_sums, w2h_dictionary, BoundReport, DnaSpec,
    TwoPointLaw,
};
use crate::error::{Error, Result};
use crate::numerics::fourier::GridSpec;
use crate::numerics::parallel::map_indexed;
use crate::numerics::rng::RngStream;
use crate::semigroup::{derivative_bound_report, solve_stein, SemigroupContext};
use crate::stable::cf::{cf_stable, StableLaw};
use crate::stable::density::density;
use crate::stable::levy::uniform_jumps;
use crate::stable::params::{fmt17, StableParams};
use crate::stable::sampler::sample;
use crate::stein::identity::{stein_identity_mc, TabulatedOperator, Target};
use crate::stein::operators::{apply_gaussian, apply_type_a, StableOperator};
use crate::stein::test_function::standard_dictionary;

use super::config::{BoundKind, ExperimentConfig};
use super::output::Table;

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(String, Table)>,
    pub scripts: Vec<(String, String)>,
    pub summary: Vec<String>,
}

impl Outcome {
    fn single(name: &str, table: Table) -> Self {
        Self {
            files: vec![(name.to_string(), table)],
            ..Self::default()
        }
    }
}

fn evenly(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + h * i as f64 }).collect()
}

fn params_label(p: &StableParams) -> String {
    format!("stable(alpha={}, beta={}, m1={}, m2={})", p.alpha, p.beta, p.m1, p.m2)
}

pub fn cmd_cf(config: &ExperimentConfig) -> Result<Outcome> {
    let p = config.stable_params().map_err(Error::InvalidParameter)?;
    let law = StableLaw::new(p)?;
    let c = config.cf;
    let ts = evenly(c.t_min, c.t_max, c.points);
    let rows: Result<Vec<[f64; 8]>> = map_indexed(ts.len(), |i| {
        let t = ts[i];
        let levy = cf_stable(&p, t)?;
        let closed = law.cf_closed(t);
        Ok([t, levy.re, levy.im, levy.norm(), closed.re, closed.im, closed.norm(), (levy - closed).norm()])
    })
    .into_iter()
    .collect();
    let rows = rows?;
    let mut table = Table::new(&[
        "t",
        "re_levy_khintchine",
        "im_levy_khintchine",
        "abs_levy_khintchine",
        "re_closed",
        "im_closed",
        "abs_closed",
        "difference",
    ]);
    for r in &rows {
        table.float_row(r);
    }
    let worst = rows.iter().map(|r| r[7]).fold(0.0, f64::max);
    let mut out = Outcome::single("cf.csv", table);
    out.summary.push(format!("max |difference| = {}", fmt17(worst)));
    Ok(out)
}

pub fn cmd_density(config: &ExperimentConfig) -> Result<Outcome> {
    let p = config.stable_params().map_err(Error::InvalidParameter)?;
    let d = config.density;
    let pdf = density(&p, &GridSpec::new(d.x_min, d.x_max, d.points)?)?;
    let mut table = Table::new(&["x", "density"]);
    for (x, v) in pdf.x().into_iter().zip(&pdf.values) {
        table.float_row(&[x, *v]);
    }
    let mut out = Outcome::single("density.csv", table);
    out.summary.push(format!("mass on grid = {}, min = {}", fmt17(pdf.mass()), fmt17(pdf.min())));
    Ok(out)
}

pub fn cmd_sample(config: &ExperimentConfig) -> Result<Outcome> {
    let p = config.stable_params().map_err(Error::InvalidParameter)?;
    let xs = sample(&p, config.sample.count, RngStream::new(config.seed))?;
    let mut table = Table::new(&["index", "value"]);
    for (i, x) in xs.iter().enumerate() {
        table.row(vec![i.to_string(), fmt17(*x)]);
    }
    let mut out = Outcome::single("sample.csv", table);
    out.summary.push(format!("{} draws", xs.len()));
    Ok(out)
}

struct CheckRow {
    operator: &'static str,
    target: String,
    test_fn: String,
    mean: f64,
    std_error: f64,
}

pub fn cmd_stein_check(config: &ExperimentConfig) -> Result<Outcome> {
    let p = config.stable_params().map_err(Error::InvalidParameter)?;
    let s = config.stein_check;
    let dictionary = standard_dictionary();
    let mut rows = Vec::new();
    let mut stream_id = 0u64;
    let mut next_stream = || {
        stream_id += 1;
        RngStream::with_stream(config.seed, stream_id)
    };

    let op = StableOperator::new(&p)?;
    let (target, target_name) = if s.mismatch {
        (Target::Gaussian { mean: 0.0, variance: 1.0 }, "normal(0, 1) [mismatched]".to_string())
    } else {
        (Target::Stable(op.law), params_label(&p))
    };
    for g in &dictionary {
        let table = TabulatedOperator::for_target(|x| Ok(op.apply(g, x)?.value), &target)?;
        let est = stein_identity_mc(|x| table.eval(x), &target, s.samples, &next_stream())?;
        rows.push(CheckRow {
            operator: "stable",
            target: target_name.clone(),
            test_fn: g.name().to_string(),
            mean: est.mean,
            std_error: est.std_error,
        });
    }

    let gauss = Target::Gaussian { mean: 0.0, variance: 1.0 };
    for g in &dictionary {
        let est = stein_identity_mc(|x| Ok(apply_gaussian(g, x, 0.0, 1.0)?.value), &gauss, s.samples, &next_stream())?;
        rows.push(CheckRow {
            operator: "gaussian",
            target: "normal(0, 1)".into(),
            test_fn: g.name().to_string(),
            mean: est.mean,
            std_error: est.std_error,
        });
    }

    let levy = uniform_jumps(s.poisson_rate, 0.0, 1.0)?;
    let poisson = Target::CompoundPoisson {
        rate: s.poisson_rate,
        lo: 0.0,
        hi: 1.0,
    };
    for g in &dictionary {
        let est = stein_identity_mc(|x| Ok(apply_type_a(g, x, &levy)?.value), &poisson, s.samples, &next_stream())?;
        rows.push(CheckRow {
            operator: "compound_poisson",
            target: format!("compound_poisson(rate={}, jumps=uniform(0, 1))", s.poisson_rate),
            test_fn: g.name().to_string(),
            mean: est.mean,
            std_error: est.std_error,
        });
    }

    let mut table = Table::new(&["operator", "target", "test_fn", "mean", "std_error", "pass"]);
    let mut passed = 0;
    for r in &rows {
        let pass = r.mean.abs() <= 3.0 * r.std_error;
        passed += usize::from(pass);
        table.row(vec![
            r.operator.to_string(),
            quote(&r.target),
            quote(&r.test_fn),
            fmt17(r.mean),
            fmt17(r.std_error),
            pass.to_string(),
        ]);
    }
    let mut out = Outcome::single("stein_check.csv", table);
    out.summary.push(format!("{passed} of {} rows within 3 standard errors", rows.len()));
    Ok(out)
}

/// Double-quote a CSV field that contains a comma or a quote.
fn quote(field: &str) -> String {
    if field.contains([',', '"']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn cmd_solve(config: &ExperimentConfig) -> Result<Outcome> {
    let p = config.stable_params().map_err(Error::InvalidParameter)?;
    let s = config.solve;
    let ctx = SemigroupContext::new(&p, GridSpec::symmetric(s.half_width, s.points)?)?;
    let h = s.h.build();
    let sol = solve_stein(&h, &ctx)?;
    let rows = sol.export_rows(&p)?;
    let mut table = Table::new(&["x", "f", "f_d1", "f_d2", "residual"]);
    for r in &rows {
        table.float_row(r);
    }
    let core = ctx.x_grid.core(s.core_fraction);
    let max_residual = rows[core].iter().map(|r| r[4].abs()).fold(0.0, f64::max);
    let (ratio1, ratio2) = derivative_bound_report(&sol);
    let mut summary = Table::new(&["quantity", "value"]);
    for (name, v) in [
        ("expectation_h", sol.eh),
        ("max_residual_core", max_residual),
        ("ratio_first_derivative", ratio1),
        ("ratio_second_derivative", ratio2.unwrap_or(f64::NAN)),
    ] {
        summary.row(vec![name.to_string(), fmt17(v)]);
    }
    let mut out = Outcome {
        files: vec![("solve.csv".into(), table), ("solve_summary.csv".into(), summary)],
        ..Outcome::default()
    };
    out.summary.push(format!(
        "max residual over the central {} of the grid = {}",
        s.core_fraction,
        fmt17(max_residual)
    ));
    out.summary.push(format!(
        "derivative ratios: {} and {}",
        fmt17(ratio1),
        ratio2.map_or_else(|| "n/a".to_string(), fmt17)
    ));
    Ok(out)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn wdelta_spec(p: &StableParams, scale: f64) -> Result<DnaSpec> {
    if scale == 0.0 {
        return DnaSpec::stable_matched(p);
    }
    let matched = DnaSpec::stable_matched(p)?;
    let e = move |y: f64| scale * (-y * y).exp();
    DnaSpec::new(
        p.alpha,
        matched.amplitude,
        matched.theta,
        e,
        move |y| -2.0 * y * e(y),
        format!("{scale} exp(-y^2)"),
    )
}

pub fn cmd_bound_sweep(config: &ExperimentConfig) -> Result<Outcome> {
    let p = config.stable_params().map_err(Error::InvalidParameter)?;
    let b = &config.bound_sweep;
    let consts = config
        .constants
        .ok_or_else(|| Error::InvalidParameter("bound-sweep needs a [constants] section".into()))?;
    let mut reports: Vec<(BoundReport, Option<f64>, bool)> = Vec::new();
    let mut notes = Vec::new();
    let dna = match b.kind {
        BoundKind::Wdelta if p.alpha < 1.0 => Some(wdelta_spec(&p, b.perturbation_scale)?),
        _ => None,
    };
    let mut index = 0u64;
    for &cutoff in &b.cutoffs {
        for &n in &b.n {
            index += 1;
            let stream = RngStream::with_stream(config.seed, index);
            let (report, empirical, surrogate) = match b.kind {
                BoundKind::W2 => {
                    let law = TwoPointLaw::variance_matched(n, &p, consts.truncation_u)?;
                    let draw = |count: usize, rng: &RngStream| law.sample(count, rng);
                    let report = bound_w2(n, &draw, &p, cutoff, &consts, &stream.substream(0), b.mc_samples)?;
                    let empirical = if b.empirical_samples > 0 {
                        let k = b.empirical_samples;
                        let sums_stream = stream.substream(1);
                        let sums = map_indexed(k, |r| law.sample(n, &sums_stream.substream(r as u64)).iter().sum());
                        let target = sample(&p, k, stream.substream(2))?;
                        Some(empirical_w2h(&sums, &target, &w2h_dictionary())?)
                    } else {
                        None
                    };
                    (report, empirical, false)
                }
                BoundKind::Wdelta => {
                    let Some(spec) = dna.as_ref() else {
                        return Err(Error::OutOfScope(format!(
                            "the Wasserstein-delta bound needs alpha in (0, 1), got {}",
                            p.alpha
                        )));
                    };
                    let report = bound_wdelta(n, spec, &p, cutoff, &consts)?;
                    if b.empirical_samples > 0 {
                        let k = b.empirical_samples;
                        let sums = normalized_sums(spec, n, k, &stream.substream(1));
                        let target = sample(&p, k, stream.substream(2))?;
                        let d = empirical_wdelta(&sums, &target, b.delta)?;
                        (report, Some(d.value), d.surrogate)
                    } else {
                        (report, None, false)
                    }
                }
            };
            if notes.is_empty() {
                notes = report.parameters.notes.clone();
            }
            reports.push((report, empirical, surrogate));
        }
    }

    let mut table = Table::with_header(reports[0].0.csv_header());
    for line in &notes {
        table.comment(format!("note: {line}"));
    }
    match b.kind {
        BoundKind::W2 => {
            table.comment("summands: two-point +-a n^(-1/alpha), a^2 = truncated second moment of the Levy measure");
            table.comment("empirical_distance: largest mean gap over a fixed dictionary of smooth test functions");
        }
        BoundKind::Wdelta => {
            table.comment("empirical_distance: optimal transport with cost min(|x - y|, |x - y|^delta)");
        }
    }
    let mut summary = Vec::new();
    let tracked = match b.kind {
        BoundKind::W2 => "kernel_mismatch",
        BoundKind::Wdelta => "total",
    };
    for &cutoff in &b.cutoffs {
        let pts: Vec<(f64, f64)> = reports
            .iter()
            .filter(|r| r.0.parameters.cutoff == cutoff)
            .map(|r| {
                let v = if tracked == "total" { r.0.total } else { r.0.term(tracked).unwrap_or(f64::NAN) };
                (r.0.parameters.n as f64, v)
            })
            .collect();
        let line = format!("{tracked} log-log slope in n at cutoff {}: {}", fmt17(cutoff), fmt17(log_log_slope(&pts)));
        table.comment(line.clone());
        summary.push(line);
    }
    for (report, empirical, surrogate) in &reports {
        table.raw_row(report.csv_row(*empirical, *surrogate));
    }
    Ok(Outcome {
        files: vec![("bound_sweep.csv".into(), table)],
        scripts: vec![("bound_sweep_plot.py".into(), plot_script("bound_sweep.csv"))],
        summary,
    })
}

fn plot_script(csv_name: &str) -> String {
    format!(
        r##"# Bound total and empirical distance against n, log axes.
import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "{csv_name}"), encoding="utf-8") as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))

series = defaultdict(list)
for r in rows:
    series[r["M_or_N"]].append((int(r["n"]), float(r["total"]), float(r["empirical_distance"])))

fig, ax = plt.subplots(figsize=(6, 4))
for cutoff, pts in sorted(series.items()):
    pts.sort()
    n = [p[0] for p in pts]
    ax.plot(n, [p[1] for p in pts], marker="o", label=f"bound, cutoff {{float(cutoff):g}}")
    emp = [(p[0], p[2]) for p in pts if p[2] == p[2] and p[2] > 0]
    if emp:
        ax.plot([e[0] for e in emp], [e[1] for e in emp], marker="x", linestyle="--",
                label=f"empirical, cutoff {{float(cutoff):g}}")
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlabel("n")
ax.set_ylabel("distance")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "bound_sweep.png"), dpi=150)
"##
    )
}

pub fn cmd_sd_check(config: &ExperimentConfig) -> Result<Outcome> {
    let p = config.stable_params().map_err(Error::InvalidParameter)?;
    let s = &config.sd_check;
    let law = StableLaw::new(p)?;
    let grid = GridSpec::symmetric(s.half_width, s.points)?;
    let probes = [0.1, 0.5, 1.0, 2.0];
    let mut table = Table::new(&["eta", "mass", "min_density", "cf_error", "pass"]);
    let mut failures = 0;
    for &eta in &s.eta {
        let pdf = crate::numerics::fourier::fourier_invert(|t| law.sd_ratio(eta, t), &grid)?;
        let cf_error = probes
            .iter()
            .map(|&t| (pdf.cf_at(t) - law.sd_ratio(eta, t)).norm())
            .fold(0.0, f64::max);
        let pass = pdf.min() >= -s.tolerance;
        failures += usize::from(!pass);
        table.row(vec![
            fmt17(eta),
            fmt17(pdf.mass()),
            fmt17(pdf.min()),
            fmt17(cf_error),
            pass.to_string(),
        ]);
    }
    let mut out = Outcome::single("sd_check.csv", table);
    out.summary.push(format!(
        "{} of {} ratios invert to a nonnegative density within {}",
        s.eta.len() - failures,
        s.eta.len(),
        s.tolerance
    ));
    Ok(out)
}
