//! Bound breakdowns and the constants they depend on.

use crate::error::{Error, Result};
use crate::stable::params::fmt17;

/// Constants the approximation bounds leave unspecified.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsPolicy {
    pub c_alpha_a_k: f64,
    pub c1_nu: f64,
    pub c2_nu: f64,
    /// Level `U` of the truncated second moment `int_{|u|<=U} u^2 nu(du)`.
    pub truncation_u: f64,
}

impl ConstantsPolicy {
    pub fn new(c_alpha_a_k: f64, c1_nu: f64, c2_nu: f64, truncation_u: f64) -> Result<Self> {
        let c = Self {
            c_alpha_a_k,
            c1_nu,
            c2_nu,
            truncation_u,
        };
        c.validate()?;
        Ok(c)
    }

    /// All constants equal to one; the terms then show the bare coefficients.
    pub fn unit() -> Self {
        Self {
            c_alpha_a_k: 1.0,
            c1_nu: 1.0,
            c2_nu: 1.0,
            truncation_u: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c_alpha_a_k", self.c_alpha_a_k),
            ("c1_nu", self.c1_nu),
            ("c2_nu", self.c2_nu),
            ("truncation_u", self.truncation_u),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "constant {name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// One named contribution to a bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTerm {
    pub name: &'static str,
    pub value: f64,
    /// The unspecified constant this term is proportional to.
    pub constant: Option<Constant>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    AlphaAK,
    OneNu,
    TwoNu,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundParameters {
    pub n: usize,
    /// `M` for the Wasserstein-delta bound, `N` for the smooth one.
    pub cutoff: f64,
    pub alpha: f64,
    pub constants: ConstantsPolicy,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub total: f64,
    pub terms: Vec<BoundTerm>,
    pub parameters: BoundParameters,
}

impl BoundReport {
    pub(crate) fn from_terms(terms: Vec<BoundTerm>, parameters: BoundParameters) -> Self {
        let total = terms.iter().map(|t| t.value).sum();
        Self {
            total,
            terms,
            parameters,
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// `|total - sum of terms|`.
    pub fn sum_defect(&self) -> f64 {
        (self.total - self.terms.iter().map(|t| t.value).sum::<f64>()).abs()
    }

    /// Part of the total not multiplied by any calibrated constant.
    pub fn constant_free(&self) -> f64 {
        self.terms.iter().filter(|t| t.constant.is_none()).map(|t| t.value).sum()
    }

    pub fn csv_header(&self) -> String {
        let mut cols = vec!["n".to_string(), "alpha".into(), "M_or_N".into()];
        cols.extend(self.terms.iter().map(|t| t.name.to_string()));
        cols.extend(["total".into(), "empirical_distance".into(), "surrogate_flag".into()]);
        cols.join(",")
    }

    pub fn csv_row(&self, empirical: Option<f64>, surrogate: bool) -> String {
        let mut cols = vec![
            self.parameters.n.to_string(),
            fmt17(self.parameters.alpha),
            fmt17(self.parameters.cutoff),
        ];
        cols.extend(self.terms.iter().map(|t| fmt17(t.value)));
        cols.push(fmt17(self.total));
        cols.push(empirical.map_or_else(|| "NaN".to_string(), fmt17));
        cols.push(u8::from(surrogate).to_string());
        cols.join(",")
    }
}

/// Fit the unspecified constants to observed distances.
///
/// Each report must be computed with [`ConstantsPolicy::unit`]. The constants
/// it uses share one value `c`, the smallest that lifts every report's total
/// to its observed distance. Constants a report does not use stay at one.
pub fn calibrate(observations: &[(BoundReport, f64)], truncation_u: f64) -> Result<ConstantsPolicy> {
    if observations.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut c = f64::EPSILON;
    let mut used = Vec::new();
    for (report, observed) in observations {
        if report.parameters.constants != ConstantsPolicy::unit() {
            return Err(Error::InvalidParameter(
                "calibration needs reports computed with unit constants".into(),
            ));
        }
        let coefficient: f64 = report
            .terms
            .iter()
            .filter(|t| t.constant.is_some())
            .map(|t| t.value)
            .sum();
        used.extend(report.terms.iter().filter_map(|t| t.constant));
        if coefficient > 0.0 {
            c = c.max((observed - report.constant_free()) / coefficient);
        }
    }
    let pick = |k: Constant| if used.contains(&k) { c } else { 1.0 };
    ConstantsPolicy::new(pick(Constant::AlphaAK), pick(Constant::OneNu), pick(Constant::TwoNu), truncation_u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_validation() {
        assert!(ConstantsPolicy::new(1.0, 2.0, 3.0, 1.0).is_ok());
        assert!(ConstantsPolicy::new(0.0, 2.0, 3.0, 1.0).is_err());
        assert!(ConstantsPolicy::new(1.0, f64::NAN, 3.0, 1.0).is_err());
        assert!(ConstantsPolicy::new(1.0, 2.0, 3.0, f64::INFINITY).is_err());
    }

    #[test]
    fn csv_layout() {
        let r = BoundReport::from_terms(
            vec![
                BoundTerm { name: "a", value: 0.1, constant: None },
                BoundTerm { name: "b", value: 0.2, constant: Some(Constant::OneNu) },
            ],
            BoundParameters {
                n: 10,
                cutoff: 1.0,
                alpha: 0.5,
                constants: ConstantsPolicy::unit(),
                notes: vec![],
            },
        );
        assert_eq!(r.csv_header(), "n,alpha,M_or_N,a,b,total,empirical_distance,surrogate_flag");
        let row = r.csv_row(Some(0.05), true);
        assert_eq!(row.split(',').count(), 8);
        assert!(row.ends_with(",1"));
        assert!(r.sum_defect() <= 1e-12);
        assert!((r.constant_free() - 0.1).abs() < 1e-15);
        let c = calibrate(&[(r.clone(), 0.9)], 2.0).unwrap();
        assert!((c.c1_nu - 4.0).abs() < 1e-12);
        assert_eq!((c.c_alpha_a_k, c.c2_nu, c.truncation_u), (1.0, 1.0, 2.0));
    }
}
