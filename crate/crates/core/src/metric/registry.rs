use super::fractional::{rational_approximation, FractionalLinearParams, Rational};
use super::{DegenerateRules, MetricKind, MetricSpec, Orientation};
use crate::error::{Error, Result};

/// Canonical names accepted by [`registry_lookup`] (case-insensitive).
pub const REGISTRY_NAMES: &[&str] = &[
    "AM", "F_beta", "Jaccard", "G-TPPR", "G-Mean", "H-Mean", "Q-Mean", "SEC",
];

const MAX_BETA_DENOMINATOR: i64 = 1_000_000;

fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| !matches!(c, '-' | '_' | '/' | ' '))
        .flat_map(char::to_lowercase)
        .collect()
}

fn spec(name: impl Into<String>, kind: MetricKind, orientation: Orientation) -> MetricSpec {
    MetricSpec {
        name: name.into(),
        kind,
        orientation,
        conventions: DegenerateRules::default(),
        fl_params: None,
    }
}

fn format_beta(beta: f64) -> String {
    let s = format!("{beta}");
    s.strip_suffix(".0").unwrap_or(&s).to_string()
}

fn f_beta(beta: f64) -> Result<MetricSpec> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidBeta(beta));
    }
    let b2 = beta * beta;
    // (1 + b2) u / (b2 p + v); quadratic-time eligible only if b2 is rational.
    let fl_params = rational_approximation(b2, MAX_BETA_DENOMINATOR, 1e-14).map(|b2| {
        FractionalLinearParams {
            c: [0.0, 1.0 + b2_f64(b2), 0.0, 0.0],
            d: [
                Rational::from_integer(0),
                Rational::from_integer(0),
                Rational::from_integer(1),
                b2,
            ],
        }
    });
    let mut m = spec(
        format!("F{}", format_beta(beta)),
        MetricKind::FBeta { beta },
        Orientation::Maximize,
    );
    m.fl_params = fl_params;
    Ok(m)
}

fn b2_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Looks up a metric by name. `beta` applies to the F-measure only and
/// defaults to 1; names `F1`, `F2`, `F0.5` carry their own beta.
pub fn registry_lookup(name: &str, beta: Option<f64>) -> Result<MetricSpec> {
    let key = normalize(name);
    let m = match key.as_str() {
        "am" => spec("AM", MetricKind::Am, Orientation::Maximize),
        "fbeta" | "f" | "fmeasure" => f_beta(beta.unwrap_or(1.0))?,
        "jaccard" => {
            let mut m = spec("Jaccard", MetricKind::Jaccard, Orientation::Maximize);
            m.fl_params = Some(FractionalLinearParams::with_integer_denominator(
                [0.0, 1.0, 0.0, 0.0],
                [0, -1, 1, 1],
            )?);
            m
        }
        "gtppr" => spec("G-TPPR", MetricKind::GTpPr, Orientation::Maximize),
        "gmean" => spec("G-Mean", MetricKind::GMean, Orientation::Maximize),
        "hmean" => spec("H-Mean", MetricKind::HMean, Orientation::Maximize),
        "qmean" => spec("Q-Mean", MetricKind::QMean, Orientation::Maximize),
        "sec" => spec("SEC", MetricKind::Sec, Orientation::Minimize),
        other => match other.strip_prefix('f').map(str::parse::<f64>) {
            Some(Ok(b)) => {
                if let Some(explicit) = beta {
                    if explicit != b {
                        return Err(Error::InvalidParameter(format!(
                            "metric '{name}' conflicts with beta = {explicit}"
                        )));
                    }
                }
                f_beta(b)?
            }
            _ => return Err(Error::UnknownMetric(name.to_string())),
        },
    };
    Ok(m)
}

/// The full comparison set: AM, F0.5, F1, F2, Jaccard, G-TPPR, G-Mean,
/// H-Mean, Q-Mean and SEC.
pub fn registry_metrics() -> Vec<MetricSpec> {
    let mut out = vec![registry_lookup("AM", None).unwrap()];
    for beta in [0.5, 1.0, 2.0] {
        out.push(f_beta(beta).unwrap());
    }
    for name in ["Jaccard", "G-TPPR", "G-Mean", "H-Mean", "Q-Mean", "SEC"] {
        out.push(registry_lookup(name, None).unwrap());
    }
    out
}
