//! Wasserstein-delta bound for normalized sums in the domain of normal
//! attraction, `alpha < 1`.

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate_power_weighted, integrate_with_error, QuadratureSpec};
use crate::stable::params::{compensated_drift, StableParams};

use super::dna::DnaSpec;
use super::report::{BoundParameters, BoundReport, BoundTerm, Constant, ConstantsPolicy};

fn e_spec() -> QuadratureSpec {
    QuadratureSpec {
        max_subdivisions: 4000,
        ..QuadratureSpec::with_tolerances(1e-13, 1e-11)
    }
}

/// `int (|y|^{1-alpha} e'(y) + alpha |y|^{-alpha} e(y)) dy` over
/// `{|y| < 1/M}` and over `{|y| > 1/M}`.
pub fn perturbation_integrals(spec: &DnaSpec, m: f64) -> Result<(f64, f64)> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("M must be positive, got {m}")));
    }
    let a = spec.alpha;
    let edge = 1.0 / m;
    let q = e_spec();
    let mut inner = 0.0;
    let mut outer = 0.0;
    for side in [1.0, -1.0] {
        // With y = side * u: u^{-alpha} (u e'(y) + alpha e(y)), since
        // |y|^{1-alpha} e'(y) carries no sign flip.
        let g = |u: f64| u * spec.e_d1(side * u) + a * spec.e(side * u);
        inner += integrate_power_weighted(&g, 0.0, edge, a, &q)?.value;
        outer += integrate_with_error(&|u: f64| u.powf(-a) * g(u), edge, f64::INFINITY, &q)?.value;
    }
    Ok((inner, outer))
}

pub fn bound_wdelta(
    n: usize,
    spec: &DnaSpec,
    params: &StableParams,
    m: f64,
    consts: &ConstantsPolicy,
) -> Result<BoundReport> {
    params.validate()?;
    consts.validate()?;
    if !(params.alpha < 1.0) {
        return Err(Error::OutOfScope(format!(
            "the Wasserstein-delta bound needs alpha in (0, 1), got {}",
            params.alpha
        )));
    }
    if (spec.alpha - params.alpha).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "summand tail index {} differs from target alpha {}",
            spec.alpha, params.alpha
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let nf = n as f64;
    let decay = nf.powf(-(1.0 / params.alpha - 1.0));
    let (inner, outer) = perturbation_integrals(spec, m)?;
    let location = compensated_drift(params)?;
    let terms = vec![
        BoundTerm {
            name: "c_alpha_a_k_term",
            value: consts.c_alpha_a_k / nf,
            constant: Some(Constant::AlphaAK),
        },
        BoundTerm {
            name: "e_inner",
            value: 3.0 * decay * inner,
            constant: None,
        },
        BoundTerm {
            name: "location",
            value: location.abs(),
            constant: None,
        },
        BoundTerm {
            name: "e_outer",
            value: decay * outer,
            constant: None,
        },
        BoundTerm {
            name: "c1_nu_term",
            value: consts.c1_nu * decay,
            constant: Some(Constant::OneNu),
        },
    ];
    let notes = vec![
        "T_n = n^(-1/alpha) (Y_1 + ... + Y_n)".to_string(),
        format!(
            "body: uniform on [-1, 1] with mass {}",
            crate::stable::params::fmt17(spec.body_mass())
        ),
        format!("perturbation: {}", spec.description),
        "location term |Gamma_alpha| does not decay in n".to_string(),
    ];
    Ok(BoundReport::from_terms(
        terms,
        BoundParameters {
            n,
            cutoff: m,
            alpha: params.alpha,
            constants: *consts,
            notes,
        },
    ))
}
