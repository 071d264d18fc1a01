//! Hartigan's dip statistic and its bootstrap unimodality test.
//!
//! The dip of a sample is the smallest sup-norm distance between its
//! empirical CDF and any unimodal CDF (convex below the mode, concave above,
//! with a jump permitted at the mode). It is computed by the iterative
//! greatest-convex-minorant / least-concave-majorant construction: fit both
//! hulls over the current candidate modal interval, record how far the
//! empirical CDF escapes a purely convex fit on the left flank and a purely
//! concave fit on the right flank, shrink to the interval where the hulls
//! separate most, and stop once the separation no longer exceeds the best
//! flank deviation. Every deviation is tracked in step counts; the dip is
//! half the final count divided by n.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeedTree;

/// Outcome of [`dip_test`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DipResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_bootstrap: usize,
}

/// Dip statistic of a sample. Requires n ≥ 4 and finite values.
pub fn dip_statistic(sample: &[f64]) -> Result<f64> {
    if sample.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "dip needs at least 4 observations, got {}",
            sample.len()
        )));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("dip input must be finite".into()));
    }
    let mut x = sample.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(dip_sorted(&x))
}

/// Lower convex hull of the points (x[i], i + offset) for i in [low..=high];
/// `mirror` flips the slope comparison, producing the upper concave hull.
/// Touch indices come back ascending; collinear points are kept off the list.
fn hull(x: &[f64], low: usize, high: usize, mirror: bool) -> Vec<usize> {
    let mut touches: Vec<usize> = Vec::with_capacity(high - low + 2);
    for i in low..=high {
        while touches.len() >= 2 {
            let b = touches[touches.len() - 1];
            let a = touches[touches.len() - 2];
            let dy1 = (b - a) as f64;
            let dx1 = x[b] - x[a];
            let dy2 = (i - b) as f64;
            let dx2 = x[i] - x[b];
            // pop while the middle point breaks convexity (or concavity when
            // mirrored); vertical tie segments compare as infinite slopes
            let violates = if mirror {
                dy1 * dx2 < dy2 * dx1
            } else {
                dy1 * dx2 > dy2 * dx1
            };
            if violates {
                touches.pop();
            } else {
                break;
            }
        }
        touches.push(i);
    }
    touches
}

/// Polyline values of a hull at every index in [low..=high]. `value_of` maps
/// a touch index to its count; interpolation is linear in x, or linear in
/// index across zero-width tie segments.
fn eval_hull(
    x: &[f64],
    touches: &[usize],
    low: usize,
    high: usize,
    value_of: impl Fn(usize) -> f64,
) -> Vec<f64> {
    let mut vals = vec![0.0; high - low + 1];
    if touches.len() == 1 {
        vals[0] = value_of(touches[0]);
        return vals;
    }
    let mut seg = 0;
    for i in low..=high {
        while touches[seg + 1] < i {
            seg += 1;
        }
        let a = touches[seg];
        let b = touches[seg + 1];
        let (va, vb) = (value_of(a), value_of(b));
        let t = if x[b] == x[a] {
            (i - a) as f64 / (b - a) as f64
        } else {
            (x[i] - x[a]) / (x[b] - x[a])
        };
        vals[i - low] = va + (vb - va) * t;
    }
    vals
}

fn dip_sorted(x: &[f64]) -> f64 {
    let n = x.len();
    if x[0] == x[n - 1] {
        return 0.0;
    }
    let mut low = 0usize;
    let mut high = n - 1;
    // one ECDF step away from the mode always costs half a count
    let mut best = 1.0f64;
    loop {
        let gcm = hull(x, low, high, false);
        let lcm = hull(x, low, high, true);
        let g_val = eval_hull(x, &gcm, low, high, |i| i as f64);
        let l_val = eval_hull(x, &lcm, low, high, |i| (i + 1) as f64);

        let mut d = f64::NEG_INFINITY;
        let mut i_star = low;
        for i in low..=high {
            let sep = l_val[i - low] - g_val[i - low];
            if sep > d {
                d = sep;
                i_star = i;
            }
        }
        if d <= best {
            break;
        }

        let ga = *gcm.iter().rev().find(|t| **t <= i_star).unwrap();
        let lb = *lcm.iter().find(|t| **t >= i_star).unwrap();

        // left flank must admit a convex fit, right flank a concave one
        for i in low..=ga {
            best = best.max((i + 1) as f64 - g_val[i - low]);
        }
        for i in lb..=high {
            best = best.max(l_val[i - low] - i as f64);
        }

        if ga == low && lb == high {
            break;
        }
        low = ga;
        high = lb;
    }
    best / (2.0 * n as f64)
}

/// Bootstrap unimodality test: the p-value is the fraction of `n_bootstrap`
/// uniform samples of the same size whose dip reaches the observed one.
pub fn dip_test(sample: &[f64], n_bootstrap: usize, seed: u64) -> Result<DipResult> {
    if n_bootstrap == 0 {
        return Err(Error::InvalidParameter(
            "n_bootstrap must be positive".into(),
        ));
    }
    let statistic = dip_statistic(sample)?;
    let tree = SeedTree::new(seed);
    let mut exceed = 0usize;
    let mut draws = vec![0.0f64; sample.len()];
    for r in 0..n_bootstrap {
        let mut stream = tree.child(r as u64).stream("dip-bootstrap");
        for v in draws.iter_mut() {
            *v = stream.next_uniform();
        }
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if dip_sorted(&draws) >= statistic {
            exceed += 1;
        }
    }
    Ok(DipResult {
        statistic,
        p_value: exceed as f64 / n_bootstrap as f64,
        n_bootstrap,
    })
}
