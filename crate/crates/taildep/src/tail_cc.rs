//! Tail cross-correlation at a lag: how much more likely one series is to be
//! extreme given the other was extreme k steps earlier, normalized so that
//! independence gives 0 and perfect lagged dependence gives 1.
//!
//! For thresholds x_n (the qx-quantile of X) and y_n (the qy-quantile of Y):
//!
//! ```text
//! tau(k) = [P(Y_{t+k} > y_n | X_t > x_n) - P(Y_{t+k} > y_n)] / [1 - P(X_t > x_n)]
//! ```
//!
//! estimated by strict counting over t in {1..n-k}. The successive-ratio
//! predictions and monotonicity conditions connect the empirical profile to
//! the coefficient scheme of the underlying linear process: the ratio
//! tau(i+1)/tau(i) is governed by |b_{i+2}/b_{i+1}| raised to the tail index
//! of the shared perturbation.

use serde::{Deserialize, Serialize};

use crate::distributions::BalanceWeights;
use crate::error::{Error, Result};
use crate::linear_process::CoefficientScheme;
use crate::stats::quantile;

/// Lag and quantile levels for one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCCParams {
    pub lag: usize,
    pub qx: f64,
    pub qy: f64,
}

impl TailCCParams {
    pub fn new(lag: usize, qx: f64, qy: f64) -> Result<Self> {
        let p = TailCCParams { lag, qx, qy };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, q) in [("qx", self.qx), ("qy", self.qy)] {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0,1), got {q}"
                )));
            }
        }
        Ok(())
    }

    /// Identical-quantile shorthand.
    pub fn symmetric(lag: usize, q: f64) -> Result<Self> {
        Self::new(lag, q, q)
    }
}

/// One tail cross-correlation estimate with its counting ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCCEstimate {
    pub tau: f64,
    pub threshold_x: f64,
    pub threshold_y: f64,
    /// Count of x-exceedances among usable indices t in {1..n-k}.
    pub n_exceed_x: usize,
    /// Count of y-exceedances at t+k over the same index window.
    pub n_exceed_y_marginal: usize,
    /// Joint exceedances.
    pub n_joint: usize,
    /// Usable pairs, n - k.
    pub n_pairs: usize,
}

/// Estimate tau at the given lag and quantile levels.
pub fn tail_cross_correlation(x: &[f64], y: &[f64], params: TailCCParams) -> Result<TailCCEstimate> {
    params.validate()?;
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    let k = params.lag;
    if n < k + 20 {
        return Err(Error::InsufficientData(format!(
            "need at least lag + 20 = {} observations, got {n}",
            k + 20
        )));
    }
    let threshold_x = quantile(x, params.qx)?;
    let threshold_y = quantile(y, params.qy)?;

    let n_pairs = n - k;
    let mut n_exceed_x = 0usize;
    let mut n_exceed_y = 0usize;
    let mut n_joint = 0usize;
    for t in 0..n_pairs {
        let x_hit = x[t] > threshold_x;
        let y_hit = y[t + k] > threshold_y;
        n_exceed_x += x_hit as usize;
        n_exceed_y += y_hit as usize;
        n_joint += (x_hit && y_hit) as usize;
    }
    if n_exceed_x == 0 {
        return Err(Error::UndefinedConditional(format!(
            "no exceedances of the x-threshold {threshold_x} among {n_pairs} usable indices"
        )));
    }

    let p_cond = n_joint as f64 / n_exceed_x as f64;
    let p_marg = n_exceed_y as f64 / n_pairs as f64;
    let p_x = n_exceed_x as f64 / n_pairs as f64;
    let tau = (p_cond - p_marg) / (1.0 - p_x);

    Ok(TailCCEstimate {
        tau,
        threshold_x,
        threshold_y,
        n_exceed_x,
        n_exceed_y_marginal: n_exceed_y,
        n_joint,
        n_pairs,
    })
}

/// One cell of a lag-by-quantile profile; an estimate or the reason it is
/// missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCell {
    pub lag: usize,
    pub qx: f64,
    pub qy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<TailCCEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Estimates over the grid of lags and quantile pairs, lag-major order.
pub fn tail_cc_profile(
    x: &[f64],
    y: &[f64],
    lags: &[usize],
    quantile_pairs: &[(f64, f64)],
) -> Vec<ProfileCell> {
    let mut cells = Vec::with_capacity(lags.len() * quantile_pairs.len());
    for &lag in lags {
        for &(qx, qy) in quantile_pairs {
            let cell = match TailCCParams::new(lag, qx, qy)
                .and_then(|p| tail_cross_correlation(x, y, p))
            {
                Ok(e) => ProfileCell { lag, qx, qy, estimate: Some(e), error: None },
                Err(e) => ProfileCell { lag, qx, qy, estimate: None, error: Some(e.to_string()) },
            };
            cells.push(cell);
        }
    }
    cells
}

/// Predicted ratio of successive tail cross-correlations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioPrediction {
    pub lag_index: i64,
    pub predicted_ratio: f64,
    pub alpha_used: f64,
}

/// tau(i+1)/tau(i) ~ |b_{i+2}/b_{i+1}|^alpha, with alpha the tail index of
/// the shared perturbation.
pub fn predicted_ratio(
    b_scheme: &CoefficientScheme,
    i: i64,
    alpha: f64,
) -> Result<RatioPrediction> {
    b_scheme.validate()?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail index must be positive, got {alpha}"
        )));
    }
    let denom = b_scheme.coefficient(i + 1);
    if denom == 0.0 {
        return Err(Error::Degenerate(format!(
            "coefficient b_{} is zero; successive ratio undefined",
            i + 1
        )));
    }
    let ratio = (b_scheme.coefficient(i + 2) / denom).abs().powf(alpha);
    Ok(RatioPrediction { lag_index: i, predicted_ratio: ratio, alpha_used: alpha })
}

/// Which innovation/quantile regime a monotonicity check runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// IID innovations, identical quantile sequences.
    IidIdentical,
    /// Position-dependent innovations, identical quantiles.
    NonIidIdentical,
    /// IID innovations, distinct quantile sequences.
    IidDistinct,
    /// Position-dependent innovations, distinct quantiles.
    NonIidDistinct,
}

/// Evaluated monotonicity condition: tau(i+1) <= tau(i) holds when
/// `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub regime: Regime,
    pub lag_index: i64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Evaluate the non-increase condition for the given regime.
///
/// `alpha0` is the tail index the regime keys on (the perturbation's index).
/// The identical-quantile regimes compare against 1; the distinct-quantile
/// regimes compare against the caller-supplied `quantile_ratio_term`, the
/// value of (x/y)^(-alpha) L(x)/L(y) at the working thresholds.
pub fn monotonicity_conditions(
    b_scheme: &CoefficientScheme,
    a_scheme: &CoefficientScheme,
    alpha0: f64,
    balance: BalanceWeights,
    i: i64,
    regime: Regime,
    quantile_ratio_term: Option<f64>,
) -> Result<ConditionReport> {
    b_scheme.validate()?;
    a_scheme.validate()?;
    if !(alpha0.is_finite() && alpha0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tail index must be positive, got {alpha0}"
        )));
    }
    let rhs = match regime {
        Regime::IidIdentical | Regime::NonIidIdentical => {
            if quantile_ratio_term.is_some() {
                return Err(Error::Config(
                    "identical-quantile regimes take no quantile ratio term".into(),
                ));
            }
            1.0
        }
        Regime::IidDistinct | Regime::NonIidDistinct => quantile_ratio_term.ok_or_else(|| {
            Error::Config("distinct-quantile regimes need a quantile ratio term".into())
        })?,
    };

    let b1 = b_scheme.coefficient(i + 1);
    let b2 = b_scheme.coefficient(i + 2);
    let lhs = match regime {
        Regime::IidIdentical => {
            if b1 == 0.0 {
                return Err(Error::Degenerate(format!(
                    "coefficient b_{} is zero; ratio condition undefined",
                    i + 1
                )));
            }
            (b2 / b1).abs()
        }
        Regime::NonIidIdentical | Regime::NonIidDistinct => {
            let a1 = a_scheme.coefficient(1);
            let denom = balance.p() * a1.max(0.0).powf(alpha0)
                + balance.q() * (-a1).max(0.0).powf(alpha0);
            if denom == 0.0 {
                return Err(Error::Degenerate(
                    "balance-weighted a_1 term is zero; condition undefined".into(),
                ));
            }
            (b2.abs().powf(alpha0) - b1.abs().powf(alpha0)) / denom
        }
        Regime::IidDistinct => {
            let count = b_scheme.default_truncation() + 1;
            let mut denom = 0.0;
            for b in b_scheme.coefficients(count) {
                denom += balance.p() * b.max(0.0).powf(alpha0)
                    + balance.q() * (-b).max(0.0).powf(alpha0);
            }
            if !(denom.is_finite() && denom > 0.0) {
                return Err(Error::Degenerate(
                    "coefficient tail-weight sum is zero or non-finite".into(),
                ));
            }
            (b2.abs().powf(alpha0) - b1.abs().powf(alpha0)) / denom
        }
    };

    Ok(ConditionReport { regime, lag_index: i, lhs, rhs, satisfied: lhs < rhs })
}
