//! Confusion-matrix arithmetic and the `(u, v, p)` metric representation.
//!
//! Every binary metric handled by this crate is evaluated through three
//! normalized counts over a test set of size `n`:
//!
//! - `u`: true positives divided by `n`,
//! - `v`: predicted positives divided by `n`,
//! - `p`: actual positives divided by `n`.
//!
//! The remaining confusion-matrix cells follow as `fp = v - u`, `fn = p - u`
//! and `tn = 1 - v - p + u`. Ratios that become `0/0` on an empty class are
//! resolved by [`DegenerateRules`].

mod fractional;
mod properties;
mod registry;

pub mod adversarial;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_binary, Error, Result};

pub use fractional::{check_fl_regularity, FractionalLinearParams, Rational};
pub use properties::{check_tp_monotonic, check_tpn_monotonic, TpMonotonicity, MAX_SCAN_N};
pub use registry::{registry_lookup, registry_metrics, REGISTRY_NAMES};

/// Normalized confusion counts `(u, v, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionTriple {
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl ConfusionTriple {
    pub fn new(u: f64, v: f64, p: f64) -> Self {
        Self { u, v, p }
    }

    /// Builds the triple from integer counts on a test set of size `n`.
    pub fn from_counts(tp: usize, predicted: usize, positives: usize, n: usize) -> Self {
        let n = n as f64;
        Self {
            u: tp as f64 / n,
            v: predicted as f64 / n,
            p: positives as f64 / n,
        }
    }

    pub fn fp(&self) -> f64 {
        (self.v - self.u).max(0.0)
    }

    pub fn fn_(&self) -> f64 {
        (self.p - self.u).max(0.0)
    }

    pub fn tn(&self) -> f64 {
        (1.0 - self.v - self.p + self.u).max(0.0)
    }

    pub fn tpr(&self, rules: &DegenerateRules) -> f64 {
        if self.p <= 0.0 {
            rules.tpr_when_p_zero
        } else {
            self.u / self.p
        }
    }

    pub fn tnr(&self, rules: &DegenerateRules) -> f64 {
        if self.p >= 1.0 {
            rules.tnr_when_p_one
        } else {
            self.tn() / (1.0 - self.p)
        }
    }

    pub fn precision(&self, rules: &DegenerateRules) -> f64 {
        if self.v <= 0.0 {
            rules.prec_when_v_zero
        } else {
            self.u / self.v
        }
    }

    fn all_empty(&self) -> bool {
        self.u <= 0.0 && self.v <= 0.0 && self.p <= 0.0
    }
}

/// Computes `(u, v, p)` for predictions `s` against labels `y`.
pub fn confusion_triple(s: &[u8], y: &[u8]) -> Result<ConfusionTriple> {
    if s.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: s.len(),
            found: y.len(),
        });
    }
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_binary(s)?;
    check_binary(y)?;
    let mut tp = 0usize;
    let mut predicted = 0usize;
    let mut positives = 0usize;
    for (&si, &yi) in s.iter().zip(y) {
        tp += usize::from(si & yi);
        predicted += usize::from(si);
        positives += usize::from(yi);
    }
    Ok(ConfusionTriple::from_counts(tp, predicted, positives, s.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Maximize,
    Minimize,
}

impl Orientation {
    /// True when `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Orientation::Maximize => a > b,
            Orientation::Minimize => a < b,
        }
    }

    /// Index of the first entry within `tol` of the extremum.
    pub fn select(self, values: &[f64], tol: f64) -> Option<usize> {
        let best = values.iter().copied().reduce(|acc, x| {
            if self.better(x, acc) {
                x
            } else {
                acc
            }
        })?;
        values.iter().position(|&x| (x - best).abs() <= tol)
    }
}

/// Values substituted for ratios that are undefined on an empty class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegenerateRules {
    pub tpr_when_p_zero: f64,
    pub tnr_when_p_one: f64,
    pub prec_when_v_zero: f64,
    /// Used by ratio metrics (F-beta, Jaccard, G-TP/PR) at `u = v = p = 0`.
    pub value_when_all_empty: f64,
}

impl Default for DegenerateRules {
    fn default() -> Self {
        Self {
            tpr_when_p_zero: 1.0,
            tnr_when_p_one: 1.0,
            prec_when_v_zero: 1.0,
            value_when_all_empty: 1.0,
        }
    }
}

impl DegenerateRules {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.tpr_when_p_zero,
            self.tnr_when_p_one,
            self.prec_when_v_zero,
            self.value_when_all_empty,
        ];
        if fields.iter().all(|f| (0.0..=1.0).contains(f)) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "degenerate-rule values must lie in [0, 1]".into(),
            ))
        }
    }
}

pub type PhiFn = Arc<dyn Fn(ConfusionTriple) -> f64 + Send + Sync>;

/// How a metric turns `(u, v, p)` into a score.
#[derive(Clone)]
pub enum MetricKind {
    /// Arithmetic mean of TPR and TNR.
    Am,
    FBeta { beta: f64 },
    Jaccard,
    /// Geometric mean of TPR and precision.
    GTpPr,
    /// Geometric mean of TPR and TNR.
    GMean,
    /// Harmonic mean of TPR and TNR.
    HMean,
    /// One minus half the squared TPR and TNR shortfalls.
    QMean,
    /// Squared error in counting, `(p - v)^2`.
    Sec,
    /// Ratio of affine functions; evaluated from the stored parameters.
    FractionalLinear,
    Custom(PhiFn),
}

impl fmt::Debug for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Am => write!(f, "Am"),
            MetricKind::FBeta { beta } => write!(f, "FBeta {{ beta: {beta} }}"),
            MetricKind::Jaccard => write!(f, "Jaccard"),
            MetricKind::GTpPr => write!(f, "GTpPr"),
            MetricKind::GMean => write!(f, "GMean"),
            MetricKind::HMean => write!(f, "HMean"),
            MetricKind::QMean => write!(f, "QMean"),
            MetricKind::Sec => write!(f, "Sec"),
            MetricKind::FractionalLinear => write!(f, "FractionalLinear"),
            MetricKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// A named metric with its evaluator, orientation and conventions.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    pub name: String,
    pub kind: MetricKind,
    pub orientation: Orientation,
    pub conventions: DegenerateRules,
    pub fl_params: Option<FractionalLinearParams>,
}

impl MetricSpec {
    /// A maximize- or minimize-oriented metric defined by an arbitrary closure.
    pub fn custom<F>(name: impl Into<String>, orientation: Orientation, phi: F) -> Self
    where
        F: Fn(ConfusionTriple) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            kind: MetricKind::Custom(Arc::new(phi)),
            orientation,
            conventions: DegenerateRules::default(),
            fl_params: None,
        }
    }

    /// A maximize-oriented fractional-linear metric. Points where the
    /// denominator vanishes evaluate to `value_when_all_empty`.
    pub fn fractional_linear(name: impl Into<String>, params: FractionalLinearParams) -> Self {
        Self {
            name: name.into(),
            kind: MetricKind::FractionalLinear,
            orientation: Orientation::Maximize,
            conventions: DegenerateRules::default(),
            fl_params: Some(params),
        }
    }

    pub fn with_conventions(mut self, conventions: DegenerateRules) -> Self {
        self.conventions = conventions;
        self
    }

    /// True when the quadratic-time optimizer applies.
    pub fn is_sfl(&self) -> bool {
        self.fl_params
            .as_ref()
            .is_some_and(FractionalLinearParams::is_sfl_eligible)
    }

    pub fn phi(&self, t: ConfusionTriple) -> f64 {
        let rules = &self.conventions;
        match &self.kind {
            MetricKind::Am => 0.5 * (t.tpr(rules) + t.tnr(rules)),
            MetricKind::FBeta { beta } => {
                if t.all_empty() {
                    return rules.value_when_all_empty;
                }
                let prec = t.precision(rules);
                let rec = t.tpr(rules);
                if prec <= 0.0 || rec <= 0.0 {
                    return 0.0;
                }
                let b2 = beta * beta;
                (1.0 + b2) / (1.0 / prec + b2 / rec)
            }
            MetricKind::Jaccard => {
                if t.all_empty() {
                    return rules.value_when_all_empty;
                }
                t.u / (t.u + t.fp() + t.fn_())
            }
            MetricKind::GTpPr => {
                if t.all_empty() {
                    return rules.value_when_all_empty;
                }
                (t.tpr(rules) * t.precision(rules)).sqrt()
            }
            MetricKind::GMean => (t.tpr(rules) * t.tnr(rules)).sqrt(),
            MetricKind::HMean => {
                let tpr = t.tpr(rules);
                let tnr = t.tnr(rules);
                if tpr <= 0.0 || tnr <= 0.0 {
                    0.0
                } else {
                    2.0 / (1.0 / tpr + 1.0 / tnr)
                }
            }
            MetricKind::QMean => {
                let a = 1.0 - t.tpr(rules);
                let b = 1.0 - t.tnr(rules);
                1.0 - 0.5 * (a * a + b * b)
            }
            MetricKind::Sec => {
                let diff = t.p - t.v;
                diff * diff
            }
            MetricKind::FractionalLinear => {
                let params = self
                    .fl_params
                    .as_ref()
                    .expect("fractional-linear metric without parameters");
                params
                    .eval(t.u, t.v, t.p)
                    .unwrap_or(rules.value_when_all_empty)
            }
            MetricKind::Custom(f) => f(t),
        }
    }

    #[inline]
    pub fn phi_uvp(&self, u: f64, v: f64, p: f64) -> f64 {
        self.phi(ConfusionTriple { u, v, p })
    }

    /// Metric value of predictions `s` against labels `y`.
    pub fn evaluate(&self, s: &[u8], y: &[u8]) -> Result<f64> {
        Ok(self.phi(confusion_triple(s, y)?))
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f1() -> MetricSpec {
        registry_lookup("F_beta", Some(1.0)).unwrap()
    }

    #[test]
    fn confusion_triple_examples() {
        let t = confusion_triple(&[1, 0], &[1, 1]).unwrap();
        assert_eq!(t, ConfusionTriple::new(0.5, 0.5, 1.0));
        let t = confusion_triple(&[0, 0, 0], &[0, 0, 0]).unwrap();
        assert_eq!(t, ConfusionTriple::new(0.0, 0.0, 0.0));
        let t = confusion_triple(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap();
        assert_eq!(t, ConfusionTriple::new(0.25, 0.5, 0.5));
    }

    #[test]
    fn f_beta_weights_recall_by_beta_squared() {
        // tp = 2, fp = 2, fn = 0 on n = 10; from counts,
        // (1 + b2) tp / ((1 + b2) tp + b2 fn + fp).
        let t = ConfusionTriple::new(0.2, 0.4, 0.2);
        let f2 = registry_lookup("F2", None).unwrap();
        let f_half = registry_lookup("F0.5", None).unwrap();
        assert!((f2.phi(t) - 10.0 / 12.0).abs() < 1e-15);
        assert!((f_half.phi(t) - 2.5 / 4.5).abs() < 1e-15);
        for m in [f2, f_half] {
            let fl = m.fl_params.clone().unwrap();
            assert!((fl.eval(0.2, 0.4, 0.2).unwrap() - m.phi(t)).abs() < 1e-15, "{}", m.name);
        }
    }

    #[test]
    fn confusion_triple_errors() {
        assert!(matches!(
            confusion_triple(&[1, 0], &[1]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            confusion_triple(&[1, 2], &[1, 0]),
            Err(Error::NonBinary { index: 1, .. })
        ));
        assert!(matches!(confusion_triple(&[], &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn phi_examples() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(f1().phi_uvp(0.5, 0.5, 0.5), 1.0));
        assert!(close(f1().phi_uvp(0.3, 0.5, 0.4), 2.0 * 0.3 / 0.9));
        let jac = registry_lookup("Jaccard", None).unwrap();
        assert!(close(jac.phi_uvp(0.25, 0.5, 0.5), 1.0 / 3.0));
        let sec = registry_lookup("SEC", None).unwrap();
        for u in [0.0, 0.1, 0.3, 0.4] {
            assert!(close(sec.phi_uvp(u, 0.4, 0.7), 0.09));
        }
    }

    #[test]
    fn degenerate_points_use_conventions() {
        let f = f1();
        assert_eq!(f.phi_uvp(0.0, 0.0, 0.0), 1.0);
        assert_eq!(f.phi_uvp(0.0, 0.0, 1.0), 0.0);
        assert_eq!(f.phi_uvp(0.0, 1.0, 0.0), 0.0);

        let rules = DegenerateRules {
            value_when_all_empty: 0.0,
            ..DegenerateRules::default()
        };
        assert_eq!(f.clone().with_conventions(rules).phi_uvp(0.0, 0.0, 0.0), 0.0);

        // AM with no positives: TPR defaults to 1, TNR is 1 - v.
        let am = registry_lookup("AM", None).unwrap();
        assert!((am.phi_uvp(0.0, 0.25, 0.0) - 0.875).abs() < 1e-15);
    }

    #[test]
    fn orientation_select_prefers_first_within_tolerance() {
        let v = [0.1, 0.5, 0.5 + 1e-14, 0.2];
        assert_eq!(Orientation::Maximize.select(&v, 1e-12), Some(1));
        assert_eq!(Orientation::Minimize.select(&v, 1e-12), Some(0));
        assert_eq!(Orientation::Maximize.select(&[], 1e-12), None);
    }

    #[test]
    fn invalid_rules_rejected() {
        let rules = DegenerateRules {
            tpr_when_p_zero: 1.5,
            ..DegenerateRules::default()
        };
        assert!(rules.validate().is_err());
        assert!(DegenerateRules::default().validate().is_ok());
    }
}
