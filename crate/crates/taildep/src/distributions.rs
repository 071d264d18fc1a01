//! Heavy-tailed distribution families.
//!
//! Four parametric families cover the regularly varying laws used throughout
//! the crate (Pareto, Cauchy, Fréchet) plus Weibull as the light-tailed
//! contrast. Sampling always goes through the analytic quantile function, so
//! one code path serves generation, round-trip checks and coupling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::stats::{log_sum_exp, mean, quantile as empirical_quantile};

const FIT_MAX_ITERATIONS: usize = 200;
const FIT_GRADIENT_TOL: f64 = 1e-8;
// Past this the best possible likelihood gain (~n*grad^2/2) sits below the
// f64 summation noise of the likelihood itself, so a stalled line search
// means the iterate is the optimum at working precision.
const FIT_GRADIENT_STALL_TOL: f64 = 1e-5;

/// Tail index of a regularly varying family. Always strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailIndex(f64);

impl TailIndex {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(TailIndex(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "tail index must be positive and finite, got {alpha}"
            )))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Tail balance of a two-sided law: `p` is the weight of the right tail,
/// `q` of the left, with `p + q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceWeights {
    p: f64,
    q: f64,
}

impl BalanceWeights {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let ok = (0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q) && (p + q - 1.0).abs() <= 1e-12;
        if ok {
            Ok(BalanceWeights { p, q })
        } else {
            Err(Error::InvalidParameter(format!(
                "balance weights must lie in [0, 1] and sum to 1, got p={p}, q={q}"
            )))
        }
    }

    /// All mass in the right tail (positive laws).
    pub fn positive() -> Self {
        BalanceWeights { p: 1.0, q: 0.0 }
    }

    /// Symmetric tails.
    pub fn symmetric() -> Self {
        BalanceWeights { p: 0.5, q: 0.5 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Family tag, used for fitting and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Pareto,
    Cauchy,
    Weibull,
    Frechet,
}

impl Family {
    pub fn parameter_count(&self) -> usize {
        match self {
            Family::Frechet => 3,
            _ => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Pareto => "pareto",
            Family::Cauchy => "cauchy",
            Family::Weibull => "weibull",
            Family::Frechet => "frechet",
        }
    }

    pub const ALL: [Family; 4] = [Family::Pareto, Family::Cauchy, Family::Weibull, Family::Frechet];
}

/// A fully parameterised distribution.
///
/// Conventions: Pareto has support `[scale, inf)` with survival
/// `(scale/x)^shape`; Fréchet has support `(location, inf)` with CDF
/// `exp(-((x-location)/scale)^-shape)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    Pareto { shape: f64, scale: f64 },
    Cauchy { location: f64, scale: f64 },
    Weibull { shape: f64, scale: f64 },
    Frechet { location: f64, shape: f64, scale: f64 },
}

impl DistributionSpec {
    pub fn family(&self) -> Family {
        match self {
            DistributionSpec::Pareto { .. } => Family::Pareto,
            DistributionSpec::Cauchy { .. } => Family::Cauchy,
            DistributionSpec::Weibull { .. } => Family::Weibull,
            DistributionSpec::Frechet { .. } => Family::Frechet,
        }
    }

    /// Shape and scale parameters must be strictly positive; locations are
    /// unrestricted.
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, v: f64| {
            Err(Error::InvalidParameter(format!(
                "{} {name} must be positive and finite, got {v}",
                self.family().name()
            )))
        };
        match *self {
            DistributionSpec::Pareto { shape, scale }
            | DistributionSpec::Weibull { shape, scale } => {
                if !(shape.is_finite() && shape > 0.0) {
                    return bad("shape", shape);
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return bad("scale", scale);
                }
            }
            DistributionSpec::Cauchy { location, scale } => {
                if !location.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "cauchy location must be finite, got {location}"
                    )));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return bad("scale", scale);
                }
            }
            DistributionSpec::Frechet {
                location,
                shape,
                scale,
            } => {
                if !location.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "frechet location must be finite, got {location}"
                    )));
                }
                if !(shape.is_finite() && shape > 0.0) {
                    return bad("shape", shape);
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return bad("scale", scale);
                }
            }
        }
        Ok(())
    }

    /// P(X <= x).
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Pareto { shape, scale } => {
                if x < scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(shape)
                }
            }
            DistributionSpec::Cauchy { location, scale } => {
                0.5 + ((x - location) / scale).atan() / std::f64::consts::PI
            }
            DistributionSpec::Weibull { shape, scale } => {
                if x < 0.0 {
                    0.0
                } else {
                    1.0 - (-(x / scale).powf(shape)).exp()
                }
            }
            DistributionSpec::Frechet {
                location,
                shape,
                scale,
            } => {
                if x <= location {
                    0.0
                } else {
                    (-((x - location) / scale).powf(-shape)).exp()
                }
            }
        }
    }

    /// P(X > x).
    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Pareto { shape, scale } => {
                if x < scale {
                    1.0
                } else {
                    (scale / x).powf(shape)
                }
            }
            DistributionSpec::Cauchy { location, scale } => {
                0.5 - ((x - location) / scale).atan() / std::f64::consts::PI
            }
            DistributionSpec::Weibull { shape, scale } => {
                if x < 0.0 {
                    1.0
                } else {
                    (-(x / scale).powf(shape)).exp()
                }
            }
            DistributionSpec::Frechet {
                location,
                shape,
                scale,
            } => {
                if x <= location {
                    1.0
                } else {
                    -(-((x - location) / scale).powf(-shape)).exp_m1()
                }
            }
        }
    }

    /// Inverse CDF for `p` in the open interval (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!(
                "quantile level must lie strictly inside (0, 1), got {p}"
            )));
        }
        Ok(match *self {
            DistributionSpec::Pareto { shape, scale } => scale * (1.0 - p).powf(-1.0 / shape),
            DistributionSpec::Cauchy { location, scale } => {
                location + scale * (std::f64::consts::PI * (p - 0.5)).tan()
            }
            DistributionSpec::Weibull { shape, scale } => {
                scale * (-(1.0 - p).ln()).powf(1.0 / shape)
            }
            DistributionSpec::Frechet {
                location,
                shape,
                scale,
            } => location + scale * (-p.ln()).powf(-1.0 / shape),
        })
    }

    /// Natural log of the density; `-inf` outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        match *self {
            DistributionSpec::Pareto { shape, scale } => {
                if x < scale {
                    f64::NEG_INFINITY
                } else {
                    shape.ln() + shape * scale.ln() - (shape + 1.0) * x.ln()
                }
            }
            DistributionSpec::Cauchy { location, scale } => {
                let z = (x - location) / scale;
                -(std::f64::consts::PI * scale).ln() - (1.0 + z * z).ln()
            }
            DistributionSpec::Weibull { shape, scale } => {
                if x < 0.0 || (x == 0.0 && shape != 1.0) {
                    if x == 0.0 && shape < 1.0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                } else if x == 0.0 {
                    -scale.ln()
                } else {
                    shape.ln() - shape * scale.ln() + (shape - 1.0) * x.ln()
                        - (x / scale).powf(shape)
                }
            }
            DistributionSpec::Frechet {
                location,
                shape,
                scale,
            } => {
                if x <= location {
                    f64::NEG_INFINITY
                } else {
                    let t = (x - location) / scale;
                    shape.ln() - scale.ln() - (1.0 + shape) * t.ln() - t.powf(-shape)
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// Index of regular variation, when the family has one. Weibull tails
    /// decay faster than any power, so it reports `None`.
    pub fn tail_index(&self) -> Option<TailIndex> {
        match *self {
            DistributionSpec::Pareto { shape, .. } => Some(TailIndex(shape)),
            DistributionSpec::Cauchy { .. } => Some(TailIndex(1.0)),
            DistributionSpec::Frechet { shape, .. } => Some(TailIndex(shape)),
            DistributionSpec::Weibull { .. } => None,
        }
    }

    /// Default tail balance: one-sided laws put all weight on the right.
    pub fn balance_weights(&self) -> Option<BalanceWeights> {
        match self {
            DistributionSpec::Pareto { .. } | DistributionSpec::Frechet { .. } => {
                Some(BalanceWeights::positive())
            }
            DistributionSpec::Cauchy { .. } => Some(BalanceWeights::symmetric()),
            DistributionSpec::Weibull { .. } => None,
        }
    }

    /// Draw `n` variates by inverse-CDF transform of stream uniforms.
    pub fn sample(&self, n: usize, stream: &mut Stream) -> Result<Vec<f64>> {
        self.validate()?;
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let u = stream.next_uniform();
            out.push(self.quantile(u).expect("stream uniforms are strictly inside (0,1)"));
        }
        Ok(out)
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub spec: DistributionSpec,
    pub log_likelihood: f64,
    pub aic: f64,
    pub bic: f64,
    pub sample_size: usize,
}

impl FitResult {
    fn from_spec(spec: DistributionSpec, log_likelihood: f64, n: usize) -> Self {
        let k = spec.family().parameter_count() as f64;
        FitResult {
            spec,
            log_likelihood,
            aic: 2.0 * k - 2.0 * log_likelihood,
            bic: k * (n as f64).ln() - 2.0 * log_likelihood,
            sample_size: n,
        }
    }
}

fn log_likelihood(spec: &DistributionSpec, sample: &[f64]) -> f64 {
    sample.iter().map(|&x| spec.ln_pdf(x)).sum()
}

/// Maximum-likelihood fit of `family` to `sample`.
///
/// Pareto is closed form (scale = sample minimum). Cauchy and Weibull use
/// derivative-based iteration with a bisection fallback, capped at 200
/// iterations with gradient tolerance 1e-8. Fréchet profiles the location
/// over a golden-section search.
pub fn fit_mle(sample: &[f64], family: Family) -> Result<FitResult> {
    if sample.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "mle fit needs at least 8 observations, got {}",
            sample.len()
        )));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("sample contains non-finite values".into()));
    }
    match family {
        Family::Pareto => fit_pareto(sample),
        Family::Cauchy => fit_cauchy(sample),
        Family::Weibull => fit_weibull(sample),
        Family::Frechet => fit_frechet(sample),
    }
}

/// Fit every family in `families`, sorted by ascending AIC. Families whose
/// fit fails (e.g. Pareto on data with non-positive values) are skipped;
/// an empty result is an error.
pub fn rank_by_aic(sample: &[f64], families: &[Family]) -> Result<Vec<FitResult>> {
    let mut fits: Vec<FitResult> = families
        .iter()
        .filter_map(|&f| fit_mle(sample, f).ok())
        .collect();
    if fits.is_empty() {
        return Err(Error::Domain(
            "no candidate family admits a maximum-likelihood fit for this sample".into(),
        ));
    }
    fits.sort_by(|a, b| a.aic.partial_cmp(&b.aic).expect("finite AIC"));
    Ok(fits)
}

fn fit_pareto(sample: &[f64]) -> Result<FitResult> {
    let scale = sample.iter().cloned().fold(f64::INFINITY, f64::min);
    if scale <= 0.0 {
        return Err(Error::Domain(
            "pareto fit requires strictly positive observations".into(),
        ));
    }
    let log_ratio_sum: f64 = sample.iter().map(|&x| (x / scale).ln()).sum();
    if log_ratio_sum <= 0.0 {
        return Err(Error::Degenerate(
            "pareto fit: all observations equal the sample minimum".into(),
        ));
    }
    let shape = sample.len() as f64 / log_ratio_sum;
    let spec = DistributionSpec::Pareto { shape, scale };
    Ok(FitResult::from_spec(spec, log_likelihood(&spec, sample), sample.len()))
}

fn fit_cauchy(sample: &[f64]) -> Result<FitResult> {
    let n = sample.len() as f64;
    let mut theta = empirical_quantile(sample, 0.5)?;
    let iqr = empirical_quantile(sample, 0.75)? - empirical_quantile(sample, 0.25)?;
    let spread = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - sample.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut gamma = if iqr > 0.0 {
        iqr / 2.0
    } else if spread > 0.0 {
        spread / 4.0
    } else {
        return Err(Error::Degenerate("cauchy fit: constant sample".into()));
    };

    let scores = |theta: f64, gamma: f64| -> (f64, f64, f64, f64) {
        let mut s_t = 0.0; // dl/dtheta
        let mut s_g = 0.0; // dl/dgamma
        let mut h_t = 0.0; // -d2l/dtheta2
        let mut h_g = 0.0; // -d2l/dgamma2
        for &x in sample {
            let z = (x - theta) / gamma;
            let w = 1.0 + z * z;
            s_t += 2.0 * z / (gamma * w);
            s_g += (z * z - 1.0) / (gamma * w);
            h_t += 2.0 * (1.0 - z * z) / (gamma * gamma * w * w);
            h_g += ((z * z - 1.0) / w + 4.0 * z * z / (w * w)) / (gamma * gamma);
        }
        (s_t, s_g, h_t, h_g)
    };
    let loglik = |theta: f64, gamma: f64| {
        log_likelihood(&DistributionSpec::Cauchy { location: theta, scale: gamma }, sample)
    };

    let mut ll = loglik(theta, gamma);
    for iteration in 0..FIT_MAX_ITERATIONS {
        let (s_t, s_g, h_t, h_g) = scores(theta, gamma);
        // Dimensionless gradient: scale-free and per-observation.
        let grad = (gamma * s_t / n).hypot(gamma * s_g / n);
        if grad < FIT_GRADIENT_TOL {
            let spec = DistributionSpec::Cauchy { location: theta, scale: gamma };
            return Ok(FitResult::from_spec(spec, ll, sample.len()));
        }
        // Newton step where curvature is usable, scaled ascent otherwise.
        let mut d_t = if h_t > 0.0 { s_t / h_t } else { gamma * gamma * s_t / n };
        let mut d_g = if h_g > 0.0 { s_g / h_g } else { gamma * gamma * s_g / n };
        let mut improved = false;
        for _ in 0..40 {
            let cand_t = theta + d_t;
            let cand_g = gamma + d_g;
            if cand_g > 0.0 {
                let cand_ll = loglik(cand_t, cand_g);
                if cand_ll > ll {
                    theta = cand_t;
                    gamma = cand_g;
                    ll = cand_ll;
                    improved = true;
                    break;
                }
            }
            d_t *= 0.5;
            d_g *= 0.5;
        }
        if !improved {
            // Ascent stalled: re-solve gamma by bisection at fixed theta.
            // Sum 1/(1+z^2) grows from ~0 to n in gamma, crossing n/2 at the
            // profile root.
            let g_score = |g: f64| -> f64 {
                sample
                    .iter()
                    .map(|&x| {
                        let z = (x - theta) / g;
                        1.0 / (1.0 + z * z)
                    })
                    .sum::<f64>()
                    - n / 2.0
            };
            let (mut lo, mut hi) = (gamma, gamma);
            while g_score(lo) > 0.0 && lo > 1e-300 {
                lo *= 0.5;
            }
            while g_score(hi) < 0.0 && hi < 1e300 {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g_score(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let cand_g = 0.5 * (lo + hi);
            let cand_ll = loglik(theta, cand_g);
            if cand_ll > ll {
                gamma = cand_g;
                ll = cand_ll;
            } else if grad < FIT_GRADIENT_STALL_TOL {
                let spec = DistributionSpec::Cauchy { location: theta, scale: gamma };
                return Ok(FitResult::from_spec(spec, ll, sample.len()));
            } else {
                return Err(Error::OptimizationFailed {
                    iterations: iteration,
                    last: vec![theta, gamma],
                    message: "cauchy likelihood ascent stalled".into(),
                });
            }
        }
    }
    Err(Error::OptimizationFailed {
        iterations: FIT_MAX_ITERATIONS,
        last: vec![theta, gamma],
        message: "cauchy fit did not reach gradient tolerance".into(),
    })
}

/// Profile score in the Weibull shape `k`; strictly increasing in `k`.
fn weibull_profile_score(sample: &[f64], log_x: &[f64], k: f64) -> f64 {
    let weights: Vec<f64> = log_x.iter().map(|&lx| k * lx).collect();
    let ln_b = log_sum_exp(&weights);
    let mut ratio = 0.0; // sum x^k ln x / sum x^k
    for i in 0..sample.len() {
        ratio += (weights[i] - ln_b).exp() * log_x[i];
    }
    let mean_log = mean(log_x);
    ratio - 1.0 / k - mean_log
}

fn fit_weibull(sample: &[f64]) -> Result<FitResult> {
    if sample.iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain(
            "weibull fit requires strictly positive observations".into(),
        ));
    }
    let n = sample.len() as f64;
    let log_x: Vec<f64> = sample.iter().map(|&x| x.ln()).collect();
    let sd_log = {
        let m = mean(&log_x);
        (log_x.iter().map(|&v| (v - m) * (v - m)).sum::<f64>() / n).sqrt()
    };
    if sd_log <= 0.0 {
        return Err(Error::Degenerate("weibull fit: constant sample".into()));
    }

    // Moment start on log scale, then safeguarded Newton inside a bracket.
    let mut k = (std::f64::consts::PI / 6.0f64.sqrt()) / sd_log;
    let (mut lo, mut hi) = (k, k);
    while weibull_profile_score(sample, &log_x, lo) > 0.0 && lo > 1e-8 {
        lo *= 0.5;
    }
    while weibull_profile_score(sample, &log_x, hi) < 0.0 && hi < 1e8 {
        hi *= 2.0;
    }
    if weibull_profile_score(sample, &log_x, lo) > 0.0
        || weibull_profile_score(sample, &log_x, hi) < 0.0
    {
        return Err(Error::OptimizationFailed {
            iterations: 0,
            last: vec![k],
            message: "weibull profile score has no admissible root".into(),
        });
    }
    k = k.clamp(lo, hi);
    let mut converged = false;
    for _ in 0..FIT_MAX_ITERATIONS {
        let f = weibull_profile_score(sample, &log_x, k);
        if f.abs() < FIT_GRADIENT_TOL {
            converged = true;
            break;
        }
        if f < 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        // Numerical derivative is enough: the score is smooth and monotone.
        let h = 1e-6 * k.max(1e-6);
        let df = (weibull_profile_score(sample, &log_x, k + h) - f) / h;
        let newton = if df > 0.0 { k - f / df } else { f64::NAN };
        k = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    if !converged && weibull_profile_score(sample, &log_x, k).abs() >= FIT_GRADIENT_TOL {
        return Err(Error::OptimizationFailed {
            iterations: FIT_MAX_ITERATIONS,
            last: vec![k],
            message: "weibull shape iteration did not converge".into(),
        });
    }
    // lambda^k = mean(x^k), evaluated in log space to dodge overflow.
    let ln_b = log_sum_exp(&log_x.iter().map(|&lx| k * lx).collect::<Vec<_>>());
    let lambda = ((ln_b - n.ln()) / k).exp();
    let spec = DistributionSpec::Weibull { shape: k, scale: lambda };
    Ok(FitResult::from_spec(spec, log_likelihood(&spec, sample), sample.len()))
}

fn fit_frechet(sample: &[f64]) -> Result<FitResult> {
    let min = sample.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range <= 0.0 {
        return Err(Error::Degenerate("frechet fit: constant sample".into()));
    }

    // Given the location, 1/(x - m) is Weibull(shape, 1/scale); profile the
    // location over a golden-section search on the log-likelihood.
    let profile = |m: f64| -> Option<(f64, DistributionSpec)> {
        let inverted: Vec<f64> = sample.iter().map(|&x| 1.0 / (x - m)).collect();
        let fit = fit_weibull(&inverted).ok()?;
        let (w_shape, w_scale) = match fit.spec {
            DistributionSpec::Weibull { shape, scale } => (shape, scale),
            _ => unreachable!(),
        };
        let spec = DistributionSpec::Frechet {
            location: m,
            shape: w_shape,
            scale: 1.0 / w_scale,
        };
        let ll = log_likelihood(&spec, sample);
        ll.is_finite().then_some((ll, spec))
    };

    let hi = min - 1e-6 * range;
    let lo = min - 10.0 * range;
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = profile(c).map(|(ll, _)| ll).unwrap_or(f64::NEG_INFINITY);
    let mut fd = profile(d).map(|(ll, _)| ll).unwrap_or(f64::NEG_INFINITY);
    for _ in 0..120 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = profile(c).map(|(ll, _)| ll).unwrap_or(f64::NEG_INFINITY);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = profile(d).map(|(ll, _)| ll).unwrap_or(f64::NEG_INFINITY);
        }
    }
    let m = 0.5 * (a + b);
    match profile(m) {
        Some((ll, spec)) => Ok(FitResult::from_spec(spec, ll, sample.len())),
        None => Err(Error::OptimizationFailed {
            iterations: 120,
            last: vec![m],
            message: "frechet location profile has no finite likelihood".into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol,
            "expected {expected} +- {tol}, got {actual}"
        );
    }

    #[test]
    fn pareto_survival_reference_point() {
        let d = DistributionSpec::Pareto { shape: 2.0, scale: 1.0 };
        assert_eq!(d.survival(2.0), 0.25);
        assert_eq!(d.survival(0.5), 1.0);
    }

    #[test]
    fn cauchy_median_is_location() {
        let d = DistributionSpec::Cauchy { location: 0.0, scale: 1.0 };
        assert_eq!(d.quantile(0.5).unwrap(), 0.0);
        let shifted = DistributionSpec::Cauchy { location: 3.5, scale: 2.0 };
        assert_eq!(shifted.quantile(0.5).unwrap(), 3.5);
    }

    #[test]
    fn frechet_survival_at_unit_point() {
        let d = DistributionSpec::Frechet { location: 0.0, shape: 1.0, scale: 1.0 };
        assert_close(d.survival(1.0), 1.0 - (-1.0f64).exp(), 1e-15);
    }

    #[test]
    fn pareto_log_survival_is_linear_in_log_x() {
        let d = DistributionSpec::Pareto { shape: 2.414, scale: 1.5 };
        // Slope between any two points of ln S vs ln x equals -shape.
        let xs = [2.0, 5.0, 40.0, 1000.0];
        for w in xs.windows(2) {
            let slope =
                (d.survival(w[1]).ln() - d.survival(w[0]).ln()) / (w[1].ln() - w[0].ln());
            assert_close(slope, -2.414, 1e-12);
        }
    }

    #[test]
    fn quantile_rejects_boundary_levels() {
        let d = DistributionSpec::Weibull { shape: 1.0, scale: 1.0 };
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0).is_err());
        assert!(d.quantile(f64::NAN).is_err());
    }

    #[test]
    fn validation_rejects_nonpositive_scales_and_shapes() {
        assert!(DistributionSpec::Pareto { shape: 0.0, scale: 1.0 }.validate().is_err());
        assert!(DistributionSpec::Pareto { shape: 1.0, scale: -1.0 }.validate().is_err());
        assert!(DistributionSpec::Cauchy { location: 0.0, scale: 0.0 }.validate().is_err());
        assert!(DistributionSpec::Weibull { shape: -2.0, scale: 1.0 }.validate().is_err());
        assert!(DistributionSpec::Frechet { location: 0.0, shape: 1.0, scale: f64::NAN }
            .validate()
            .is_err());
        assert!(DistributionSpec::Frechet { location: 0.0, shape: 2.0, scale: 1.0 }
            .validate()
            .is_ok());
    }

    #[test]
    fn tail_index_by_family() {
        assert_eq!(
            DistributionSpec::Pareto { shape: 3.0, scale: 1.0 }
                .tail_index()
                .unwrap()
                .value(),
            3.0
        );
        assert_eq!(
            DistributionSpec::Cauchy { location: 0.0, scale: 5.0 }
                .tail_index()
                .unwrap()
                .value(),
            1.0
        );
        assert_eq!(
            DistributionSpec::Frechet { location: 0.0, shape: 0.5, scale: 1.0 }
                .tail_index()
                .unwrap()
                .value(),
            0.5
        );
        assert!(DistributionSpec::Weibull { shape: 2.0, scale: 1.0 }
            .tail_index()
            .is_none());
    }

    #[test]
    fn balance_weights_validate_and_default() {
        assert!(BalanceWeights::new(0.7, 0.3).is_ok());
        assert!(BalanceWeights::new(0.7, 0.4).is_err());
        assert!(BalanceWeights::new(-0.1, 1.1).is_err());
        let c = DistributionSpec::Cauchy { location: 0.0, scale: 1.0 };
        assert_eq!(c.balance_weights().unwrap().p(), 0.5);
        let p = DistributionSpec::Pareto { shape: 1.0, scale: 1.0 };
        assert_eq!(p.balance_weights().unwrap().p(), 1.0);
        assert!(DistributionSpec::Weibull { shape: 1.0, scale: 1.0 }
            .balance_weights()
            .is_none());
    }

    #[test]
    fn weibull_unit_sample_mean_near_one() {
        let d = DistributionSpec::Weibull { shape: 1.0, scale: 1.0 };
        let mut s = SeedTree::new(2024).stream("weibull-mean");
        let xs = d.sample(100_000, &mut s).unwrap();
        assert_close(mean(&xs), 1.0, 0.02);
    }

    #[test]
    fn cauchy_sample_median_near_location() {
        let d = DistributionSpec::Cauchy { location: 0.0, scale: 1.0 };
        let mut s = SeedTree::new(2024).stream("cauchy-median");
        let xs = d.sample(100_000, &mut s).unwrap();
        assert_close(empirical_quantile(&xs, 0.5).unwrap(), 0.0, 0.02);
    }

    #[test]
    fn samples_match_analytic_cdf_in_ks_distance() {
        let families = [
            DistributionSpec::Pareto { shape: 2.5, scale: 1.0 },
            DistributionSpec::Cauchy { location: 1.0, scale: 2.0 },
            DistributionSpec::Weibull { shape: 1.5, scale: 2.0 },
            DistributionSpec::Frechet { location: 0.0, shape: 2.0, scale: 1.0 },
        ];
        let tree = SeedTree::new(77);
        for (i, d) in families.iter().enumerate() {
            let mut s = tree.stream(&format!("ks-{i}"));
            let mut xs = d.sample(100_000, &mut s).unwrap();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = xs.len() as f64;
            let mut ks: f64 = 0.0;
            for (j, &x) in xs.iter().enumerate() {
                let f = d.cdf(x);
                ks = ks.max((f - j as f64 / n).abs());
                ks = ks.max(((j + 1) as f64 / n - f).abs());
            }
            assert!(ks < 0.01, "{} KS distance {ks}", d.family().name());
        }
    }

    #[test]
    fn pareto_fit_recovers_parameters() {
        let truth = DistributionSpec::Pareto { shape: 2.414, scale: 1.0 };
        let mut s = SeedTree::new(5).stream("pareto-fit");
        let xs = truth.sample(10_000, &mut s).unwrap();
        let fit = fit_mle(&xs, Family::Pareto).unwrap();
        let (shape, scale) = match fit.spec {
            DistributionSpec::Pareto { shape, scale } => (shape, scale),
            _ => unreachable!(),
        };
        assert_close(shape, 2.414, 0.1);
        // Scale is the sample minimum by convention.
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(scale, min);
        assert_close(scale, 1.0, 1e-3);
    }

    #[test]
    fn pareto_fit_rejects_nonpositive_data() {
        let xs = vec![-1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        assert!(matches!(fit_mle(&xs, Family::Pareto), Err(Error::Domain(_))));
    }

    #[test]
    fn pareto_fit_rejects_constant_sample() {
        let xs = vec![2.0; 16];
        assert!(matches!(fit_mle(&xs, Family::Pareto), Err(Error::Degenerate(_))));
    }

    #[test]
    fn cauchy_fit_recovers_parameters() {
        let truth = DistributionSpec::Cauchy { location: 5.0, scale: 2.0 };
        let mut s = SeedTree::new(6).stream("cauchy-fit");
        let xs = truth.sample(10_000, &mut s).unwrap();
        let fit = fit_mle(&xs, Family::Cauchy).unwrap();
        let (location, scale) = match fit.spec {
            DistributionSpec::Cauchy { location, scale } => (location, scale),
            _ => unreachable!(),
        };
        assert_close(location, 5.0, 0.1);
        assert_close(scale, 2.0, 0.1);
    }

    #[test]
    fn weibull_fit_recovers_parameters() {
        let truth = DistributionSpec::Weibull { shape: 1.5, scale: 1.0 };
        let mut s = SeedTree::new(7).stream("weibull-fit");
        let xs = truth.sample(10_000, &mut s).unwrap();
        let fit = fit_mle(&xs, Family::Weibull).unwrap();
        let (shape, scale) = match fit.spec {
            DistributionSpec::Weibull { shape, scale } => (shape, scale),
            _ => unreachable!(),
        };
        assert_close(shape, 1.5, 0.05);
        assert_close(scale, 1.0, 0.05);
    }

    #[test]
    fn weibull_fit_survives_large_scale_data() {
        // Price-like magnitudes: x^k overflows unless handled in log space.
        let truth = DistributionSpec::Weibull { shape: 40.0, scale: 100_000.0 };
        let mut s = SeedTree::new(8).stream("weibull-big");
        let xs = truth.sample(2_000, &mut s).unwrap();
        let fit = fit_mle(&xs, Family::Weibull).unwrap();
        let (shape, scale) = match fit.spec {
            DistributionSpec::Weibull { shape, scale } => (shape, scale),
            _ => unreachable!(),
        };
        assert_close(shape / 40.0, 1.0, 0.1);
        assert_close(scale / 100_000.0, 1.0, 0.01);
        assert!(fit.log_likelihood.is_finite());
    }

    #[test]
    fn frechet_fit_recovers_shape_and_scale() {
        let truth = DistributionSpec::Frechet { location: 0.0, shape: 2.0, scale: 1.0 };
        let mut s = SeedTree::new(9).stream("frechet-fit");
        let xs = truth.sample(20_000, &mut s).unwrap();
        let fit = fit_mle(&xs, Family::Frechet).unwrap();
        let (location, shape, scale) = match fit.spec {
            DistributionSpec::Frechet { location, shape, scale } => (location, shape, scale),
            _ => unreachable!(),
        };
        assert_close(location, 0.0, 0.2);
        assert_close(shape, 2.0, 0.3);
        assert_close(scale, 1.0, 0.2);
    }

    #[test]
    fn aic_bic_identities_are_exact() {
        let mut s = SeedTree::new(10).stream("identity");
        let xs = DistributionSpec::Weibull { shape: 2.0, scale: 3.0 }
            .sample(500, &mut s)
            .unwrap();
        for family in Family::ALL {
            if let Ok(fit) = fit_mle(&xs, family) {
                let k = family.parameter_count() as f64;
                assert_eq!(fit.aic, 2.0 * k - 2.0 * fit.log_likelihood);
                assert_eq!(fit.bic, k * (xs.len() as f64).ln() - 2.0 * fit.log_likelihood);
            }
        }
    }

    #[test]
    fn aic_ranking_prefers_true_family() {
        let truth = DistributionSpec::Weibull { shape: 1.5, scale: 1.0 };
        let mut s = SeedTree::new(11).stream("ranking");
        let xs = truth.sample(10_000, &mut s).unwrap();
        let ranked = rank_by_aic(&xs, &Family::ALL).unwrap();
        assert_eq!(ranked[0].spec.family(), Family::Weibull);
        let aic_of = |f: Family| ranked.iter().find(|r| r.spec.family() == f).map(|r| r.aic);
        let w = aic_of(Family::Weibull).unwrap();
        assert!(w < aic_of(Family::Cauchy).unwrap());
        assert!(w < aic_of(Family::Pareto).unwrap());
    }

    #[test]
    fn cauchy_fit_converges_when_gain_hits_noise_floor() {
        // Misspecified data: the dimensionless gradient bottoms out near
        // 1e-6 where no f64-representable step still improves the summed
        // likelihood. The fit must accept that iterate, not error.
        let truth = DistributionSpec::Weibull { shape: 1.5, scale: 1.0 };
        let mut s = SeedTree::new(909).child(3).stream("weibull");
        let xs = truth.sample(10_000, &mut s).unwrap();
        let fit = fit_mle(&xs, Family::Cauchy).unwrap();
        let (theta, gamma) = match fit.spec {
            DistributionSpec::Cauchy { location, scale } => (location, scale),
            other => panic!("unexpected family {other:?}"),
        };
        let ll_at = |location: f64, scale: f64| {
            let spec = DistributionSpec::Cauchy { location, scale };
            xs.iter().map(|&x| spec.ln_pdf(x)).sum::<f64>()
        };
        assert_eq!(fit.log_likelihood, ll_at(theta, gamma));
        for delta in [-1e-3, 1e-3] {
            assert!(fit.log_likelihood >= ll_at(theta + delta * gamma, gamma));
            assert!(fit.log_likelihood >= ll_at(theta, gamma * (1.0 + delta)));
        }
    }

    #[test]
    fn fit_rejects_tiny_samples() {
        let xs = vec![1.0, 2.0, 3.0];
        assert!(matches!(
            fit_mle(&xs, Family::Cauchy),
            Err(Error::InsufficientData(_))
        ));
    }
}
