//! Distributional change-point detection by binary segmentation.
//!
//! Every admissible split of a segment is scored with the two-sample
//! Kolmogorov–Smirnov statistic between the observations before and after
//! it, so a break is any change in distribution, not just a mean shift.
//! Detection is greedy: the segment whose best split scores highest is cut
//! first, its halves re-enter the candidate pool, and the process stops when
//! `max_changepoints` splits are placed or no remaining split clears the
//! large-sample KS critical value at the 1% level.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum segment length used by the command-line pipeline.
pub const DEFAULT_MIN_SEGMENT: usize = 100;

/// Significance level a split must clear to count as a change point.
const SPLIT_ALPHA: f64 = 0.01;

/// Detected distributional breaks. A location ℓ means the first ℓ
/// observations form the segment left of the break, so segments are
/// `[0, ℓ₁)`, `[ℓ₁, ℓ₂)`, …, `[ℓ_k, n)` in zero-based index ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePointResult {
    /// Break locations in ascending order.
    pub locations: Vec<usize>,
    /// The same locations in the order detection placed them.
    pub discovery_order: Vec<usize>,
    /// Number of segments the breaks induce: `locations.len() + 1`.
    pub n_segments: usize,
    /// KS statistic of each accepted split, aligned with `discovery_order`.
    pub statistic_per_split: Vec<f64>,
}

impl ChangePointResult {
    /// Half-open index ranges of the segments for a series of length `n`.
    pub fn segment_bounds(&self, n: usize) -> Vec<(usize, usize)> {
        let mut bounds = Vec::with_capacity(self.locations.len() + 1);
        let mut start = 0usize;
        for &loc in &self.locations {
            bounds.push((start, loc));
            start = loc;
        }
        bounds.push((start, n));
        bounds
    }
}

/// Two-sample Kolmogorov–Smirnov statistic: the largest absolute gap
/// between the two empirical CDFs.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(
            "KS statistic needs two non-empty samples".into(),
        ));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Domain("KS input must be finite".into()));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|p, q| p.partial_cmp(q).unwrap());
    sb.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < sa.len() && j < sb.len() {
        let v = sa[i].min(sb[j]);
        while i < sa.len() && sa[i] <= v {
            i += 1;
        }
        while j < sb.len() && sb[j] <= v {
            j += 1;
        }
        let gap = (i as f64 / na - j as f64 / nb).abs();
        if gap > d {
            d = gap;
        }
    }
    Ok(d)
}

/// Asymptotic two-sample KS critical value at level `SPLIT_ALPHA`.
fn split_threshold(m: usize, r: usize) -> f64 {
    let c = (-(SPLIT_ALPHA / 2.0).ln() / 2.0).sqrt();
    c * (((m + r) as f64) / ((m * r) as f64)).sqrt()
}

/// Best admissible split of `seg`: the local split index in
/// `[min_segment, len - min_segment]` with the largest KS statistic between
/// the two sides, ties resolved toward the earliest index. `None` when the
/// segment is too short to split.
fn best_split(seg: &[f64], min_segment: usize) -> Option<(usize, f64)> {
    let n = seg.len();
    if n < 2 * min_segment {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| seg[p].partial_cmp(&seg[q]).unwrap());
    let mut best: Option<(usize, f64)> = None;
    for s in min_segment..=(n - min_segment) {
        let (m, r) = (s as f64, (n - s) as f64);
        let (mut cl, mut cr) = (0usize, 0usize);
        let mut d = 0.0f64;
        let mut idx = 0usize;
        while idx < n {
            let v = seg[order[idx]];
            while idx < n && seg[order[idx]] == v {
                if order[idx] < s {
                    cl += 1;
                } else {
                    cr += 1;
                }
                idx += 1;
            }
            let gap = (cl as f64 / m - cr as f64 / r).abs();
            if gap > d {
                d = gap;
            }
        }
        if best.map(|(_, bd)| d > bd).unwrap_or(true) {
            best = Some((s, d));
        }
    }
    best
}

/// Candidate split of the segment `[lo, hi)`, ordered by statistic with
/// ties broken toward the earlier segment so detection is deterministic.
struct Candidate {
    stat: f64,
    lo: usize,
    hi: usize,
    split: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.stat
            .partial_cmp(&other.stat)
            .unwrap()
            .then(other.lo.cmp(&self.lo))
    }
}

fn push_candidate(
    series: &[f64],
    lo: usize,
    hi: usize,
    min_segment: usize,
    heap: &mut BinaryHeap<Candidate>,
) {
    if let Some((s, stat)) = best_split(&series[lo..hi], min_segment) {
        if stat > split_threshold(s, hi - lo - s) {
            heap.push(Candidate {
                stat,
                lo,
                hi,
                split: lo + s,
            });
        }
    }
}

/// Detect up to `max_changepoints` distributional breaks, never placing a
/// break closer than `min_segment` to a segment edge.
pub fn detect_changepoints(
    series: &[f64],
    max_changepoints: usize,
    min_segment: usize,
) -> Result<ChangePointResult> {
    if max_changepoints == 0 {
        return Err(Error::InvalidParameter(
            "max_changepoints must be positive".into(),
        ));
    }
    if min_segment == 0 {
        return Err(Error::InvalidParameter(
            "min_segment must be positive".into(),
        ));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "change-point input must be finite".into(),
        ));
    }
    let n = series.len();
    if n < 2 * min_segment {
        return Err(Error::InsufficientData(format!(
            "need at least {} observations for min_segment {}, got {}",
            2 * min_segment,
            min_segment,
            n
        )));
    }

    let mut heap = BinaryHeap::new();
    push_candidate(series, 0, n, min_segment, &mut heap);
    let mut discovery_order: Vec<usize> = Vec::new();
    let mut statistic_per_split: Vec<f64> = Vec::new();
    while discovery_order.len() < max_changepoints {
        let Some(c) = heap.pop() else { break };
        discovery_order.push(c.split);
        statistic_per_split.push(c.stat);
        push_candidate(series, c.lo, c.split, min_segment, &mut heap);
        push_candidate(series, c.split, c.hi, min_segment, &mut heap);
    }
    let mut locations = discovery_order.clone();
    locations.sort_unstable();
    Ok(ChangePointResult {
        n_segments: locations.len() + 1,
        locations,
        discovery_order,
        statistic_per_split,
    })
}
