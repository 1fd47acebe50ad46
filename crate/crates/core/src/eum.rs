//! Plug-in threshold classifiers: a fixed cutoff, and a cutoff tuned on
//! held-out data to optimize the empirical metric.

use serde::{Deserialize, Serialize};

use crate::error::{check_binary, check_probabilities, Error, Result};
use crate::metric::{ConfusionTriple, MetricSpec};

/// The cutoff used by the accuracy-oriented baseline.
pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PluginThreshold {
    pub delta: f64,
    pub achieved_val_utility: f64,
    /// Human-readable summary of the candidate set.
    pub grid: String,
    pub candidates: usize,
}

/// `s_i = 1` iff `eta_i >= delta`.
pub fn classify_threshold(etas: &[f64], delta: f64) -> Vec<u8> {
    etas.iter().map(|&e| u8::from(e >= delta)).collect()
}

/// Candidate cutoffs: sorted unique scores, their midpoints, and `{0, 1}`.
pub fn threshold_candidates(etas: &[f64]) -> Vec<f64> {
    let mut unique: Vec<f64> = etas.to_vec();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let mut out = Vec::with_capacity(2 * unique.len() + 2);
    out.push(0.0);
    for w in unique.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    if let Some(&last) = unique.last() {
        out.push(last);
    }
    out.push(1.0);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Chooses the cutoff that optimizes the empirical metric on validation
/// data. Ties go to the smallest cutoff.
pub fn select_threshold(m: &MetricSpec, etas_val: &[f64], y_val: &[u8]) -> Result<PluginThreshold> {
    if etas_val.len() != y_val.len() {
        return Err(Error::LengthMismatch {
            expected: etas_val.len(),
            found: y_val.len(),
        });
    }
    if etas_val.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_probabilities(etas_val)?;
    check_binary(y_val)?;

    let n = etas_val.len();
    // Scores sorted descending with cumulative positives, so the counts at
    // any cutoff come from one binary search.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| etas_val[b].total_cmp(&etas_val[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| etas_val[i]).collect();
    let mut cum_pos = vec![0usize; n + 1];
    for (j, &i) in order.iter().enumerate() {
        cum_pos[j + 1] = cum_pos[j] + usize::from(y_val[i]);
    }
    let positives = cum_pos[n];

    let candidates = threshold_candidates(etas_val);
    let utilities: Vec<f64> = candidates
        .iter()
        .map(|&delta| {
            let predicted = sorted.partition_point(|&e| e >= delta);
            let t = ConfusionTriple::from_counts(cum_pos[predicted], predicted, positives, n);
            m.phi(t)
        })
        .collect();
    let best = m
        .orientation
        .select(&utilities, 0.0)
        .expect("candidate set always contains 0 and 1");
    Ok(PluginThreshold {
        delta: candidates[best],
        achieved_val_utility: utilities[best],
        grid: "unique validation scores, midpoints, {0, 1}".into(),
        candidates: candidates.len(),
    })
}
