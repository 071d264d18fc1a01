//! Small shared numeric helpers.

use crate::error::{Error, Result};

/// Arithmetic mean. Empty input is the caller's bug.
pub fn mean(xs: &[f64]) -> f64 {
    debug_assert!(!xs.is_empty());
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divides by n).
pub fn population_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Empirical quantile by linear interpolation of order statistics
/// (the `h = (n-1)p` convention). `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InsufficientData("quantile of empty sample".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "quantile level {p} outside [0, 1]"
        )));
    }
    let n = sorted.len();
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return Ok(sorted[n - 1]);
    }
    let frac = h - lo as f64;
    Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
}

/// Convenience wrapper that sorts a copy.
pub fn quantile(xs: &[f64], p: f64) -> Result<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    quantile_sorted(&v, p)
}

/// Ordinary least squares fit of `y = intercept + slope * x`.
/// Returns `(slope, intercept, residual_se_of_slope)`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "ols: {} x-values vs {} y-values",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData(
            "ols needs at least 3 points".into(),
        ));
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        sxx += dx * dx;
        sxy += dx * (y[i] - my);
    }
    if sxx <= 0.0 {
        return Err(Error::Degenerate(
            "ols: zero variance in the regressor".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut rss = 0.0;
    for i in 0..n {
        let r = y[i] - intercept - slope * x[i];
        rss += r * r;
    }
    let se = (rss / (n as f64 - 2.0) / sxx).sqrt();
    Ok((slope, intercept, se))
}

/// Natural log of the gamma function, Lanczos approximation (g = 7, 9 terms).
/// Absolute error below 1e-13 for positive arguments.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().abs().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// log(sum(exp(v))) evaluated stably.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    debug_assert!(!v.is_empty());
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates_between_order_statistics() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(quantile(&v, 1.0).unwrap(), 4.0);
        assert_eq!(quantile(&v, 0.5).unwrap(), 2.5);
        // h = 3 * 0.25 = 0.75 -> between 1.0 and 2.0
        assert!((quantile(&v, 0.25).unwrap() - 1.75).abs() < 1e-12);
    }

    #[test]
    fn quantile_rejects_bad_level() {
        assert!(quantile(&[1.0], 1.5).is_err());
        assert!(quantile(&[], 0.5).is_err());
    }

    #[test]
    fn ln_gamma_matches_known_values() {
        // Gamma(0.5) = sqrt(pi), Gamma(1) = 1, Gamma(5) = 24, Gamma(10.5) via
        // published value.
        assert!((ln_gamma(0.5) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-12);
        assert!(ln_gamma(1.0).abs() < 1e-12);
        assert!(ln_gamma(2.0).abs() < 1e-12);
        assert!((ln_gamma(5.0) - 24.0f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(10.5) - 1_133_278.388_948_904f64.ln()).abs() < 1e-9);
        // recurrence Gamma(x+1) = x Gamma(x)
        for &x in &[0.7, 1.3, 3.9, 17.2, 171.0] {
            let lhs = ln_gamma(x + 1.0);
            let rhs = x.ln() + ln_gamma(x);
            assert!((lhs - rhs).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        let (slope, intercept, se) = ols(&x, &y).unwrap();
        assert!((slope + 2.0).abs() < 1e-12);
        assert!((intercept - 3.0).abs() < 1e-12);
        assert!(se < 1e-10);
    }

    #[test]
    fn ols_rejects_constant_regressor() {
        let x = [1.0; 5];
        let y = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(matches!(ols(&x, &y), Err(Error::Degenerate(_))));
    }

    #[test]
    fn log_sum_exp_handles_large_exponents() {
        let v = [700.0, 701.0];
        let expected = 701.0 + (1.0 + (-1.0f64).exp()).ln();
        assert!((log_sum_exp(&v) - expected).abs() < 1e-10);
    }
}
