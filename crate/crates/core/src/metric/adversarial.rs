//! Metrics that break the monotonicity conditions, used as negative fixtures.

use super::{MetricSpec, Orientation};

/// `2 tp + fp`, i.e. `u + v`: increasing in `u` but not jointly
/// increasing in TPR and TNR.
pub fn tp_plus_predicted() -> MetricSpec {
    MetricSpec::custom("2TP+FP", Orientation::Maximize, |t| t.u + t.v)
}

/// `-u`: rewards missed positives. Its optimum is always the empty
/// prediction, so the ranking inequality holds vacuously.
pub fn negated_tp() -> MetricSpec {
    MetricSpec::custom("NegTP", Orientation::Maximize, |t| -t.u)
}

/// `-u - 10 |v - 1/2|`: pins the prediction count near `n/2` and then
/// rewards missed positives, so the optimum picks the lowest probabilities.
pub fn inverted_ranking() -> MetricSpec {
    MetricSpec::custom("InvertedRanking", Orientation::Maximize, |t| {
        -t.u - 10.0 * (t.v - 0.5).abs()
    })
}
