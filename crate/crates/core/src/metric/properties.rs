//! Grid scans for the monotonicity properties that imply the ranking principle.

use serde::{Deserialize, Serialize};

use super::{MetricSpec, Orientation};

/// Largest grid size accepted by the scans.
pub const MAX_SCAN_N: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TpMonotonicity {
    /// Strictly increasing in `u` at every fixed `(v, p)`.
    pub holds: bool,
    /// Constant in `u` at every fixed `(v, p)`.
    pub tp_independent: bool,
}

/// Scans every `(v, p)` slice of the size-`n` grid for strict increase in `u`.
///
/// Minimize-oriented metrics are not scanned for increase (`holds` is
/// false); `tp_independent` is reported for every metric.
pub fn check_tp_monotonic(m: &MetricSpec, n: usize) -> TpMonotonicity {
    assert!((1..=MAX_SCAN_N).contains(&n), "grid size must be in 1..={MAX_SCAN_N}");
    let nf = n as f64;
    let mut increasing = true;
    let mut independent = true;
    for v in 0..=n {
        for p in 0..=n {
            let lo = (v + p).saturating_sub(n);
            let hi = v.min(p);
            let mut prev: Option<f64> = None;
            for u in lo..=hi {
                let val = m.phi_uvp(u as f64 / nf, v as f64 / nf, p as f64 / nf);
                if let Some(prev) = prev {
                    increasing &= val > prev;
                    independent &= val == prev;
                }
                prev = Some(val);
            }
        }
    }
    TpMonotonicity {
        holds: increasing && m.orientation == Orientation::Maximize,
        tp_independent: independent,
    }
}

/// Scans the `(TPR, TNR)` representation at every interior positive rate.
///
/// With `p` fixed, the metric must strictly increase whenever TPR and TNR
/// both strictly increase.
pub fn check_tpn_monotonic(m: &MetricSpec, n: usize) -> bool {
    assert!((2..=MAX_SCAN_N).contains(&n), "grid size must be in 2..={MAX_SCAN_N}");
    let nf = n as f64;
    for positives in 1..n {
        let negatives = n - positives;
        let p = positives as f64 / nf;
        // gamma[tp][tn]
        let gamma: Vec<Vec<f64>> = (0..=positives)
            .map(|tp| {
                (0..=negatives)
                    .map(|tn| {
                        let fp = negatives - tn;
                        m.phi_uvp(tp as f64 / nf, (tp + fp) as f64 / nf, p)
                    })
                    .collect()
            })
            .collect();
        // Running maximum over the lower-left quadrant.
        let mut prefix_max = vec![vec![f64::NEG_INFINITY; negatives + 1]; positives + 1];
        for tp in 0..=positives {
            for tn in 0..=negatives {
                let mut best = gamma[tp][tn];
                if tp > 0 {
                    best = best.max(prefix_max[tp - 1][tn]);
                }
                if tn > 0 {
                    best = best.max(prefix_max[tp][tn - 1]);
                }
                prefix_max[tp][tn] = best;
                if tp > 0 && tn > 0 && gamma[tp][tn] <= prefix_max[tp - 1][tn - 1] {
                    return false;
                }
            }
        }
    }
    true
}
