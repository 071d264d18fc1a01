//! Long-memory diagnostics: rescaled-range Hurst estimation, log-periodogram
//! regression for the fractional differencing parameter, and classification
//! of coefficient schemes by decay type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_process::CoefficientScheme;
use crate::stats;

/// Memory class of a series or a coefficient scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Short,
    Long,
    Unknown,
}

/// Diagnostics bundle for one series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemoryReport {
    pub hurst: f64,
    pub gph_d: f64,
    pub gph_se: f64,
    pub gph_bandwidth: usize,
    pub classification: Classification,
}

/// Expected rescaled range of an IID Gaussian sample of size `n`, with the
/// small-sample correction factor (n - 1/2)/n. The exact gamma-ratio front
/// factor is used up to n = 340, its asymptotic form beyond.
fn expected_rescaled_range(n: usize) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n)
        .map(|i| ((nf - i as f64) / i as f64).sqrt())
        .sum();
    let front = if n <= 340 {
        (stats::ln_gamma((nf - 1.0) / 2.0)
            - 0.5 * std::f64::consts::PI.ln()
            - stats::ln_gamma(nf / 2.0))
        .exp()
    } else {
        1.0 / (nf * std::f64::consts::PI / 2.0).sqrt()
    };
    (nf - 0.5) / nf * front * sum
}

/// R/S of one block: range of cumulative deviations over the population
/// standard deviation. `None` when the block is constant.
fn rescaled_range(block: &[f64]) -> Option<f64> {
    let m = stats::mean(block);
    let mut cum = 0.0;
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for &v in block {
        cum += v - m;
        max = max.max(cum);
        min = min.min(cum);
    }
    let s = stats::population_variance(block).sqrt();
    if s == 0.0 {
        return None;
    }
    Some((max - min) / s)
}

const MIN_WINDOW: usize = 8;
const GRID_POINTS: usize = 10;

/// Geometric window grid from [`MIN_WINDOW`] to n/4, about [`GRID_POINTS`]
/// distinct sizes.
fn window_grid(n: usize) -> Vec<usize> {
    let max = n / 4;
    let ratio = (max as f64 / MIN_WINDOW as f64).powf(1.0 / (GRID_POINTS - 1) as f64);
    let mut grid = Vec::with_capacity(GRID_POINTS);
    for k in 0..GRID_POINTS {
        let w = (MIN_WINDOW as f64 * ratio.powi(k as i32)).round() as usize;
        let w = w.clamp(MIN_WINDOW, max);
        if grid.last() != Some(&w) {
            grid.push(w);
        }
    }
    grid
}

/// Hurst exponent by rescaled-range analysis.
///
/// Each window size on a geometric grid contributes the mean R/S over the
/// disjoint blocks of that size; the exponent is 0.5 plus the slope of
/// log R/S against log window size after dividing out the expected R/S of
/// an independent series, which removes the small-window upward bias of the
/// plain statistic.
pub fn hurst_rs(series: &[f64]) -> Result<f64> {
    if series.len() < 64 {
        return Err(Error::InsufficientData(format!(
            "need at least 64 observations, got {}",
            series.len()
        )));
    }
    if stats::population_variance(series) == 0.0 {
        return Err(Error::Degenerate(
            "constant series has zero variance".into(),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for w in window_grid(series.len()) {
        let mut acc = 0.0;
        let mut count = 0usize;
        for block in series.chunks_exact(w) {
            if let Some(rs) = rescaled_range(block) {
                acc += rs;
                count += 1;
            }
        }
        if count == 0 {
            continue;
        }
        xs.push((w as f64).ln());
        ys.push((acc / count as f64).ln() - expected_rescaled_range(w).ln());
    }
    if xs.len() < 3 {
        return Err(Error::Degenerate(
            "too few usable window sizes for the R/S regression".into(),
        ));
    }
    let (slope, _, _) = stats::ols(&xs, &ys)?;
    Ok(0.5 + slope)
}

/// Bandwidth used by [`gph`]: ⌊n^exponent⌋ capped below n/2.
pub fn gph_bandwidth(n: usize, bandwidth_exponent: f64) -> usize {
    ((n as f64).powf(bandwidth_exponent).floor() as usize).min(n / 2 - 1)
}

/// Log-periodogram estimate of the fractional differencing parameter.
///
/// Regresses log I(ω_j) on log(4 sin²(ω_j/2)) over the first
/// ⌊n^bandwidth_exponent⌋ Fourier frequencies and returns the negated slope
/// together with its theoretical standard error √(π²/6 / Σ(x_j − x̄)²).
pub fn gph(series: &[f64], bandwidth_exponent: f64) -> Result<(f64, f64)> {
    if !(bandwidth_exponent > 0.0 && bandwidth_exponent < 1.0) {
        return Err(Error::InvalidParameter(
            "bandwidth_exponent must lie strictly between 0 and 1".into(),
        ));
    }
    let n = series.len();
    if n < 128 {
        return Err(Error::InsufficientData(format!(
            "need at least 128 observations, got {n}"
        )));
    }
    let m = gph_bandwidth(n, bandwidth_exponent);
    if m < 3 {
        return Err(Error::InvalidParameter(
            "bandwidth must cover at least 3 Fourier frequencies".into(),
        ));
    }
    let mean = stats::mean(series);
    let mut xs = Vec::with_capacity(m);
    let mut ys = Vec::with_capacity(m);
    for j in 1..=m {
        let omega = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, &v) in series.iter().enumerate() {
            let phase = omega * t as f64;
            let d = v - mean;
            re += d * phase.cos();
            im -= d * phase.sin();
        }
        let ordinate = (re * re + im * im) / (2.0 * std::f64::consts::PI * n as f64);
        if ordinate <= 0.0 {
            return Err(Error::Degenerate(
                "periodogram ordinate vanished; series carries no signal at a regression frequency"
                    .into(),
            ));
        }
        let half = (omega / 2.0).sin();
        xs.push((4.0 * half * half).ln());
        ys.push(ordinate.ln());
    }
    let (slope, _, _) = stats::ols(&xs, &ys)?;
    let x_mean = stats::mean(&xs);
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let se = (std::f64::consts::PI * std::f64::consts::PI / 6.0 / sxx).sqrt();
    Ok((-slope, se))
}

/// Classify a coefficient scheme by its decay type.
///
/// Parametric schemes classify by construction. Explicit lists are fitted
/// with both decay models on the nonzero coefficients at positive lags
/// (log-magnitude against lag, and against log lag); the better fit wins
/// when its R² reaches 0.9 and its slope is negative, otherwise the scheme
/// is unknown. Fewer than three usable points means finite support: short.
pub fn classify_scheme(scheme: &CoefficientScheme) -> Classification {
    let coefficients = match scheme {
        CoefficientScheme::Exponential { .. } => return Classification::Short,
        CoefficientScheme::PowerLaw { .. } => return Classification::Long,
        CoefficientScheme::Explicit { coefficients } => coefficients,
    };
    let points: Vec<(f64, f64)> = coefficients
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, b)| **b != 0.0)
        .map(|(j, b)| (j as f64, b.abs().ln()))
        .collect();
    if points.len() < 3 {
        return Classification::Short;
    }
    let lags: Vec<f64> = points.iter().map(|p| p.0).collect();
    let log_lags: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let magnitudes: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = |x: &[f64]| -> Option<(f64, f64)> {
        let (slope, intercept, _) = stats::ols(x, &magnitudes).ok()?;
        let tss: f64 = {
            let m = stats::mean(&magnitudes);
            magnitudes.iter().map(|y| (y - m) * (y - m)).sum()
        };
        if tss == 0.0 {
            return None;
        }
        let rss: f64 = x
            .iter()
            .zip(&magnitudes)
            .map(|(xv, yv)| {
                let r = yv - (intercept + slope * xv);
                r * r
            })
            .sum();
        Some((1.0 - rss / tss, slope))
    };
    let exponential = fit(&lags);
    let power = fit(&log_lags);
    match (exponential, power) {
        (Some((r2e, se)), Some((r2p, sp))) => {
            let (r2, slope, class) = if r2p > r2e {
                (r2p, sp, Classification::Long)
            } else {
                (r2e, se, Classification::Short)
            };
            if r2 >= 0.9 && slope < 0.0 {
                class
            } else {
                Classification::Unknown
            }
        }
        _ => Classification::Unknown,
    }
}

/// Classify a series from its estimated exponents.
fn classify_estimates(hurst: f64, gph_d: f64) -> Classification {
    if hurst > 0.75 || gph_d > 0.5 {
        Classification::Long
    } else if hurst < 0.65 && gph_d < 0.25 {
        Classification::Short
    } else {
        Classification::Unknown
    }
}

/// Run both estimators on a series and classify it.
pub fn memory_report(series: &[f64], bandwidth_exponent: f64) -> Result<MemoryReport> {
    let hurst = hurst_rs(series)?;
    let (gph_d, gph_se) = gph(series, bandwidth_exponent)?;
    Ok(MemoryReport {
        hurst,
        gph_d,
        gph_se,
        gph_bandwidth: gph_bandwidth(series.len(), bandwidth_exponent),
        classification: classify_estimates(hurst, gph_d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;

    fn white_noise(n: usize, seed: u64) -> Vec<f64> {
        let mut s = SeedTree::new(seed).stream("noise");
        (0..n).map(|_| s.next_gaussian()).collect()
    }

    fn integrated_noise(n: usize, seed: u64) -> Vec<f64> {
        let mut cum = 0.0;
        white_noise(n, seed)
            .into_iter()
            .map(|v| {
                cum += v;
                cum
            })
            .collect()
    }

    #[test]
    fn expected_rescaled_range_increases_and_tracks_sqrt_growth() {
        let mut prev = 0.0;
        for n in [8, 16, 64, 256, 1024, 4096] {
            let e = expected_rescaled_range(n);
            assert!(e > prev, "n = {n}");
            prev = e;
        }
        // local log-log slope approaches 1/2 from above
        let slope_small = (expected_rescaled_range(16).ln() - expected_rescaled_range(8).ln())
            / std::f64::consts::LN_2;
        let slope_large = (expected_rescaled_range(8192).ln()
            - expected_rescaled_range(4096).ln())
            / std::f64::consts::LN_2;
        assert!(slope_small > slope_large);
        assert!(slope_small > 0.5 && slope_small < 0.75, "{slope_small}");
        assert!((slope_large - 0.5).abs() < 0.02, "{slope_large}");
        // continuity across the exact/asymptotic switch at n = 340
        let below = expected_rescaled_range(340);
        let above = expected_rescaled_range(341);
        assert!((above / below - 1.0).abs() < 0.01);
    }

    #[test]
    fn white_noise_hurst_is_near_half() {
        let h = hurst_rs(&white_noise(1 << 14, 7)).unwrap();
        assert!((h - 0.5).abs() < 0.05, "H = {h}");
    }

    #[test]
    fn integrated_noise_hurst_is_near_one() {
        let h = hurst_rs(&integrated_noise(1 << 14, 7)).unwrap();
        assert!((h - 1.0).abs() < 0.07, "H = {h}");
    }

    #[test]
    fn integrated_exceeds_white_on_every_seeded_pair() {
        for seed in 0..6 {
            let w = hurst_rs(&white_noise(4096, seed)).unwrap();
            let i = hurst_rs(&integrated_noise(4096, seed)).unwrap();
            assert!(i > w, "seed {seed}: integrated {i} vs white {w}");
        }
    }

    #[test]
    fn hurst_is_exactly_invariant_under_power_of_two_scaling() {
        let x = white_noise(2048, 3);
        let h = hurst_rs(&x).unwrap();
        let doubled: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let negated: Vec<f64> = x.iter().map(|v| -2.0 * v).collect();
        assert_eq!(h, hurst_rs(&doubled).unwrap());
        assert_eq!(h, hurst_rs(&negated).unwrap());
    }

    #[test]
    fn hurst_is_invariant_under_general_affine_maps() {
        let x = white_noise(2048, 4);
        let h = hurst_rs(&x).unwrap();
        let mapped: Vec<f64> = x.iter().map(|v| -1.7 * v + 9.25).collect();
        let hm = hurst_rs(&mapped).unwrap();
        assert!((h - hm).abs() < 1e-9, "{h} vs {hm}");
    }

    #[test]
    fn hurst_rejects_short_and_constant_input() {
        assert!(matches!(
            hurst_rs(&[1.0; 63]),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            hurst_rs(&[2.5; 128]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn gph_white_noise_d_is_near_zero() {
        let (d, se) = gph(&white_noise(1 << 14, 9), 0.5).unwrap();
        assert!(d.abs() < 0.1, "d = {d}");
        assert!(se > 0.0 && se < 0.2, "se = {se}");
    }

    #[test]
    fn gph_integrated_noise_d_is_near_one() {
        let (d, _) = gph(&integrated_noise(1 << 14, 9), 0.5).unwrap();
        assert!((d - 1.0).abs() < 0.15, "d = {d}");
    }

    #[test]
    fn gph_is_shift_invariant() {
        let x = white_noise(1024, 2);
        let (d, _) = gph(&x, 0.5).unwrap();
        let shifted: Vec<f64> = x.iter().map(|v| v + 5.0).collect();
        let (ds, _) = gph(&shifted, 0.5).unwrap();
        assert!((d - ds).abs() < 1e-10, "{d} vs {ds}");
    }

    #[test]
    fn gph_validates_input() {
        let x = white_noise(1024, 2);
        assert!(matches!(
            gph(&x, 0.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            gph(&x, 1.0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            gph(&x[..100], 0.5),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(gph(&[1.0; 512], 0.5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn gph_bandwidth_stays_below_half_length() {
        for n in [128usize, 500, 4096] {
            for k in [0.3, 0.5, 0.9, 0.99] {
                let m = gph_bandwidth(n, k);
                assert!(m < n / 2, "n = {n}, k = {k}, m = {m}");
            }
        }
    }

    #[test]
    fn parametric_schemes_classify_by_construction() {
        let e = CoefficientScheme::Exponential { phi: 0.3 };
        assert_eq!(classify_scheme(&e), Classification::Short);
        let p = CoefficientScheme::PowerLaw { beta: 2.0 };
        assert_eq!(classify_scheme(&p), Classification::Long);
        // beta >= 1 still classifies long by decay shape
        let p1 = CoefficientScheme::PowerLaw { beta: 10.0 };
        assert_eq!(classify_scheme(&p1), Classification::Long);
    }

    #[test]
    fn explicit_finite_support_is_short() {
        let x = CoefficientScheme::Explicit {
            coefficients: vec![1.0, 0.0, 0.0, 0.0],
        };
        assert_eq!(classify_scheme(&x), Classification::Short);
        let two = CoefficientScheme::Explicit {
            coefficients: vec![1.0, 0.5, 0.25],
        };
        assert_eq!(classify_scheme(&two), Classification::Short);
    }

    #[test]
    fn explicit_lists_recover_their_generating_decay() {
        let geometric: Vec<f64> = (0..30).map(|j| 0.6f64.powi(j)).collect();
        let g = CoefficientScheme::Explicit {
            coefficients: geometric,
        };
        assert_eq!(classify_scheme(&g), Classification::Short);

        let power: Vec<f64> = (0..30)
            .map(|j| if j == 0 { 1.0 } else { (j as f64).powf(-1.5) })
            .collect();
        let p = CoefficientScheme::Explicit { coefficients: power };
        assert_eq!(classify_scheme(&p), Classification::Long);
    }

    #[test]
    fn explicit_without_decay_is_unknown() {
        let alternating = CoefficientScheme::Explicit {
            coefficients: vec![1.0, 0.1, 1.0, 0.1, 1.0, 0.1, 1.0, 0.1],
        };
        assert_eq!(classify_scheme(&alternating), Classification::Unknown);
        let growing = CoefficientScheme::Explicit {
            coefficients: (0..10).map(|j| 1.5f64.powi(j)).collect(),
        };
        assert_eq!(classify_scheme(&growing), Classification::Unknown);
    }

    #[test]
    fn memory_report_separates_white_from_integrated() {
        let white = memory_report(&white_noise(1 << 13, 5), 0.5).unwrap();
        assert_eq!(white.classification, Classification::Short);
        assert!(white.gph_bandwidth < (1 << 13) / 2);

        let cum = memory_report(&integrated_noise(1 << 13, 5), 0.5).unwrap();
        assert_eq!(cum.classification, Classification::Long);
        assert!(cum.hurst > white.hurst);
    }
}
