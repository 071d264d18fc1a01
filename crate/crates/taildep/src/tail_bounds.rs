//! Tail constants and log-survival slope bounds for linear combinations of
//! independent regularly varying variables.
//!
//! For W = sum_i l_i X_i with X_i regularly varying of index alpha_i, the
//! log-log survival plot of W beyond a high threshold has slope governed by
//! three quantities:
//!
//! * the dominant slope `-min_i alpha_i` (the tail of W is asymptotically
//!   ruled by the heaviest component),
//! * a steeper reference slope `-sum_i alpha_i` whose line the empirical
//!   survival dominates from some point on (all components must be large
//!   simultaneously for the joint event, which bounds survival from below),
//! * a moment-based slope `-|sum alpha - sum alpha^2 / 2| / n`.

use serde::{Deserialize, Serialize};

use crate::distributions::{BalanceWeights, DistributionSpec};
use crate::error::{Error, Result};
use crate::rng::SeedTree;
use crate::stats::{ols, quantile_sorted};

/// One summand `coefficient * X` with X distributed by `spec`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearTerm {
    pub coefficient: f64,
    pub spec: DistributionSpec,
    pub balance: BalanceWeights,
}

impl LinearTerm {
    /// Term with the balance weights natural to the distribution family.
    /// Weibull has no regularly varying tail; its balance defaults to the
    /// all-positive convention.
    pub fn natural(coefficient: f64, spec: DistributionSpec) -> Self {
        let balance = spec.balance_weights().unwrap_or_else(BalanceWeights::positive);
        LinearTerm { coefficient, spec, balance }
    }
}

/// W = sum of independent terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearCombinationSpec {
    terms: Vec<LinearTerm>,
}

impl LinearCombinationSpec {
    pub fn new(terms: Vec<LinearTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter(
                "linear combination needs at least one term".into(),
            ));
        }
        for t in &terms {
            t.spec.validate()?;
            if !t.coefficient.is_finite() {
                return Err(Error::InvalidParameter(
                    "term coefficient must be finite".into(),
                ));
            }
        }
        Ok(LinearCombinationSpec { terms })
    }

    pub fn terms(&self) -> &[LinearTerm] {
        &self.terms
    }

    /// Smallest absolute coefficient; scales the reference line of the sum
    /// bound.
    pub fn l_star(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient.abs())
            .fold(f64::INFINITY, f64::min)
    }

    fn tail_indices(&self) -> Result<Vec<f64>> {
        self.terms
            .iter()
            .map(|t| {
                t.spec.tail_index().map(|a| a.value()).ok_or_else(|| {
                    Error::NotRegularlyVarying(format!(
                        "{} term has no power-law tail",
                        t.spec.family().name()
                    ))
                })
            })
            .collect()
    }

    /// Draw n realizations of the combination. Each term reads its own
    /// named sub-stream, so adding a term leaves the others' draws intact.
    pub fn sample(&self, n: usize, tree: &SeedTree) -> Result<Vec<f64>> {
        let mut out = vec![0.0; n];
        for (i, term) in self.terms.iter().enumerate() {
            let mut stream = tree.stream(&format!("term-{i}"));
            let draws = term.spec.sample(n, &mut stream)?;
            for (acc, d) in out.iter_mut().zip(draws) {
                *acc += term.coefficient * d;
            }
        }
        Ok(out)
    }
}

/// Tail constants of `sum_i rho_i X_i` for X_i iid regularly varying with
/// index `alpha` and the given balance: the positive-tail constant
/// `sum_i [p (rho_i)_+^alpha + q (rho_i)_-^alpha]` and the two-sided constant
/// `sum_i |rho_i|^alpha`.
pub fn linear_combination_tail_constant(
    coeffs: &[f64],
    alpha: f64,
    balance: BalanceWeights,
) -> Result<(f64, f64)> {
    if coeffs.is_empty() {
        return Err(Error::Domain("empty coefficient list".into()));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail index must be positive, got {alpha}"
        )));
    }
    let (p, q) = (balance.p(), balance.q());
    let mut positive = 0.0;
    let mut absolute = 0.0;
    for &rho in coeffs {
        if !rho.is_finite() {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        let plus = rho.max(0.0).powf(alpha);
        let minus = (-rho).max(0.0).powf(alpha);
        positive += p * plus + q * minus;
        absolute += rho.abs().powf(alpha);
    }
    Ok((positive, absolute))
}

/// Log-log slope of the dominant-term tail approximation: `-min_i alpha_i`.
pub fn slope_dominant(spec: &LinearCombinationSpec) -> Result<f64> {
    let alphas = spec.tail_indices()?;
    let mut min_alpha = f64::INFINITY;
    let mut min_coeff = 0.0;
    for (a, t) in alphas.iter().zip(spec.terms()) {
        if *a < min_alpha {
            min_alpha = *a;
            min_coeff = t.coefficient;
        }
    }
    if min_coeff == 0.0 {
        return Err(Error::Degenerate(
            "minimal-index term has zero coefficient".into(),
        ));
    }
    Ok(-min_alpha)
}

/// Slope of the all-components-large reference line: `-sum_i alpha_i`.
/// The empirical log-survival dominates a line with this slope from some
/// crossing point on.
pub fn slope_sum_bound(spec: &LinearCombinationSpec) -> Result<f64> {
    if spec.terms().iter().any(|t| t.coefficient == 0.0) {
        return Err(Error::Degenerate(
            "sum bound needs every coefficient nonzero".into(),
        ));
    }
    Ok(-spec.tail_indices()?.iter().sum::<f64>())
}

/// Moment-based slope `-|sum alpha - sum alpha^2 / 2| / n`.
pub fn slope_moment_bound(spec: &LinearCombinationSpec) -> Result<f64> {
    let alphas = spec.tail_indices()?;
    let s1: f64 = alphas.iter().sum();
    let s2: f64 = alphas.iter().map(|a| a * a).sum();
    Ok(-((s1 - 0.5 * s2).abs() / alphas.len() as f64))
}

/// OLS fit of ln(empirical survival) against ln(x) over the distinct order
/// statistics above the `1 - tail_fraction` quantile. Survival counts are
/// strict, and the largest distinct value (empirical survival zero) is
/// dropped before the log transform.
pub fn empirical_log_tail_slope(sample: &[f64], tail_fraction: f64) -> Result<(f64, f64)> {
    if !(tail_fraction > 0.0 && tail_fraction < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "tail fraction must be in (0, 0.5), got {tail_fraction}"
        )));
    }
    if sample.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "need at least 100 observations, got {}",
            sample.len()
        )));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("sample contains non-finite values".into()));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let threshold = quantile_sorted(&sorted, 1.0 - tail_fraction)?;
    if threshold <= 0.0 {
        return Err(Error::Domain(format!(
            "tail threshold {threshold} is not positive; log-log slopes need a positive tail"
        )));
    }

    let n = sorted.len() as f64;
    // Distinct exceedances with strict survival counts: walking the sorted
    // tail, the count of values strictly above v is n minus the index just
    // past the last copy of v.
    let mut log_x = Vec::new();
    let mut log_s = Vec::new();
    let start = sorted.partition_point(|v| *v <= threshold);
    let mut i = start;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        let above = sorted.len() - j;
        if above > 0 {
            log_x.push(v.ln());
            log_s.push((above as f64 / n).ln());
        }
        i = j;
    }
    if log_x.len() < 20 {
        return Err(Error::InsufficientData(format!(
            "only {} distinct exceedances above the threshold; need 20",
            log_x.len()
        )));
    }
    let (slope, intercept, _) = ols(&log_x, &log_s)?;
    Ok((slope, intercept))
}

/// The three slopes for one combination, optionally with the empirical fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSlopeReport {
    pub slope_dominant: f64,
    pub slope_sum: f64,
    pub slope_moment: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical_slope: Option<f64>,
    /// Exceedance threshold of the empirical fit; absent without a sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl TailSlopeReport {
    pub fn from_spec(spec: &LinearCombinationSpec) -> Result<Self> {
        Ok(TailSlopeReport {
            slope_dominant: slope_dominant(spec)?,
            slope_sum: slope_sum_bound(spec)?,
            slope_moment: slope_moment_bound(spec)?,
            empirical_slope: None,
            threshold: None,
        })
    }

    pub fn with_sample(
        spec: &LinearCombinationSpec,
        sample: &[f64],
        tail_fraction: f64,
    ) -> Result<Self> {
        let mut report = Self::from_spec(spec)?;
        let (slope, _) = empirical_log_tail_slope(sample, tail_fraction)?;
        let mut sorted = sample.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        report.empirical_slope = Some(slope);
        report.threshold = Some(quantile_sorted(&sorted, 1.0 - tail_fraction)?);
        Ok(report)
    }
}
