//! Expected-utility optimal predictions on a fixed test set.
//!
//! Given per-instance probabilities `eta_i = P(y_i = 1 | x_i)` with labels
//! drawn independently, the expected metric value of a prediction vector
//! `s` only depends on how many positives fall inside and outside the
//! predicted-positive set. Both counts are Poisson-binomial, so
//!
//! ```text
//! E[metric(s, y)] = sum_{k1, k2} C[k1] D[k2] phi(k1/n, k/n, (k1+k2)/n)
//! ```
//!
//! where `C` covers the predicted positives and `D` the rest. For metrics
//! whose optimum is a top-`k` set of the sorted probabilities, scanning all
//! `n + 1` cutoffs gives the optimum in `O(n^3)` ([`optimize_general`]).
//! For ratio metrics with rational denominator coefficients the inner sum
//! over `k2` is shared across cutoffs and the scan drops to `O(n^2)`
//! ([`optimize_sfl`]). [`brute_force`] searches all `2^n` vectors.

use serde::{Deserialize, Serialize};

use crate::error::{check_binary, check_probabilities, Error, Result};
use crate::metric::{ConfusionTriple, FractionalLinearParams, MetricSpec};
use crate::poisson_binomial::{coefficients_unchecked, for_each_prefix_descending, CoefficientTable};

/// Tolerance for comparing utilities computed along different routes.
pub const UTILITY_TOL: f64 = 1e-9;
/// Utilities closer than this are treated as tied when picking a cutoff.
pub const TIE_TOL: f64 = 1e-12;
pub const MAX_BRUTE_FORCE_N: usize = 15;
/// Upper bound on exhaustive label enumeration.
pub const MAX_ENUMERATION_N: usize = 20;
/// Upper bound on the lookup-table size of the quadratic-time route.
pub const MAX_SFL_SLOTS: i128 = 1 << 28;

/// Probabilities sorted in non-increasing order, ties kept in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortedEtas {
    values: Vec<f64>,
    /// `perm[j]` is the original index of `values[j]`.
    perm: Vec<usize>,
}

impl SortedEtas {
    pub fn new(etas: &[f64]) -> Result<Self> {
        check_probabilities(etas)?;
        let mut perm: Vec<usize> = (0..etas.len()).collect();
        perm.sort_by(|&a, &b| etas[b].total_cmp(&etas[a]));
        let values = perm.iter().map(|&i| etas[i]).collect();
        Ok(Self { values, perm })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Labels the `k` largest probabilities positive, in original order.
    pub fn top_k_labels(&self, k: usize) -> Vec<u8> {
        let mut s = vec![0u8; self.len()];
        for &i in &self.perm[..k] {
            s[i] = 1;
        }
        s
    }
}

/// An optimal prediction vector together with the per-cutoff utilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub k_star: usize,
    /// Binary labels in the original instance order.
    pub s_star: Vec<u8>,
    pub utility: f64,
    /// `utility_curve[k]` is the expected utility of labelling the `k`
    /// largest probabilities positive. For [`brute_force`] it is the best
    /// expected utility over all vectors with `k` positives.
    pub utility_curve: Vec<f64>,
}

fn finish(m: &MetricSpec, sorted: &SortedEtas, curve: Vec<f64>) -> Prediction {
    let k_star = m
        .orientation
        .select(&curve, TIE_TOL)
        .expect("utility curve has n + 1 >= 1 entries");
    Prediction {
        k_star,
        s_star: sorted.top_k_labels(k_star),
        utility: curve[k_star],
        utility_curve: curve,
    }
}

/// `sum_{k1, k2} C[k1] D[k2] phi(k1/n, k/n, (k1+k2)/n)` with `k = |C| - 1`.
fn partition_utility(m: &MetricSpec, inside: &[f64], outside: &[f64], n: usize) -> f64 {
    let nf = n as f64;
    let k = inside.len() - 1;
    let v = k as f64 / nf;
    let mut total = 0.0;
    for (k1, &c) in inside.iter().enumerate() {
        let u = k1 as f64 / nf;
        let mut inner = 0.0;
        for (k2, &d) in outside.iter().enumerate() {
            inner += d * m.phi(ConfusionTriple {
                u,
                v,
                p: (k1 + k2) as f64 / nf,
            });
        }
        total += c * inner;
    }
    total
}

/// Expected utility of labelling the `k` largest probabilities positive.
pub fn expected_utility_topk(m: &MetricSpec, etas: &SortedEtas, k: usize) -> Result<f64> {
    let n = etas.len();
    if k > n {
        return Err(Error::CutoffOutOfRange { k, n });
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let values = etas.values();
    let inside = coefficients_unchecked(&values[..k]);
    let outside = coefficients_unchecked(&values[k..]);
    Ok(partition_utility(m, inside.as_slice(), outside.as_slice(), n))
}

/// Expected utility of an arbitrary prediction vector.
pub fn expected_utility_arbitrary(m: &MetricSpec, etas: &[f64], s: &[u8]) -> Result<f64> {
    if etas.len() != s.len() {
        return Err(Error::LengthMismatch {
            expected: etas.len(),
            found: s.len(),
        });
    }
    if etas.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_probabilities(etas)?;
    check_binary(s)?;
    Ok(arbitrary_unchecked(m, etas, s))
}

fn arbitrary_unchecked(m: &MetricSpec, etas: &[f64], s: &[u8]) -> f64 {
    let mut inside = CoefficientTable::empty();
    let mut outside = CoefficientTable::empty();
    for (&eta, &si) in etas.iter().zip(s) {
        if si == 1 {
            inside.push(eta);
        } else {
            outside.push(eta);
        }
    }
    partition_utility(m, inside.as_slice(), outside.as_slice(), etas.len())
}

/// Expected utility by summing over all `2^n` label vectors.
pub fn expected_utility_exhaustive(m: &MetricSpec, etas: &[f64], s: &[u8]) -> Result<f64> {
    let n = etas.len();
    if n != s.len() {
        return Err(Error::LengthMismatch {
            expected: n,
            found: s.len(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::TooLargeForBruteForce {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    check_probabilities(etas)?;
    check_binary(s)?;
    let predicted: usize = s.iter().map(|&x| usize::from(x)).sum();
    let mut total = 0.0;
    for labels in 0u32..(1 << n) {
        let mut prob = 1.0;
        let mut tp = 0;
        let mut positives = 0;
        for i in 0..n {
            let yi = (labels >> i) & 1 == 1;
            if yi {
                prob *= etas[i];
                positives += 1;
                tp += usize::from(s[i]);
            } else {
                prob *= 1.0 - etas[i];
            }
        }
        total += prob * m.phi(ConfusionTriple::from_counts(tp, predicted, positives, n));
    }
    Ok(total)
}

fn validate_input(etas: &[f64]) -> Result<SortedEtas> {
    if etas.is_empty() {
        return Err(Error::EmptyInput);
    }
    SortedEtas::new(etas)
}

/// Optimal top-`k` prediction for any metric, scanning every cutoff
/// `k = 0..=n` in `O(n^3)` total.
///
/// The result is the optimum over all `2^n` vectors whenever the metric
/// is strictly increasing in true positives (or independent of them).
pub fn optimize_general(m: &MetricSpec, etas: &[f64]) -> Result<Prediction> {
    let sorted = validate_input(etas)?;
    let curve = general_curve(m, sorted.values());
    Ok(finish(m, &sorted, curve))
}

fn general_curve(m: &MetricSpec, values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut curve = vec![0.0; n + 1];
    let mut suffix = CoefficientTable::empty();
    for_each_prefix_descending(values, |k, prefix| {
        curve[k] = partition_utility(m, prefix.as_slice(), suffix.as_slice(), n);
        if k > 0 {
            suffix.push(values[k - 1]);
        }
    });
    curve
}

/// Integer addressing for the shared-denominator table.
///
/// Slot `i` holds `b(k, alpha_i)` with `alpha_i = (i + j0 n) / scale` and
/// `b(k, alpha) = sum_{k2} D_k[k2] / (alpha + d3 k2)`.
#[derive(Debug, Clone, Copy)]
struct SflIndex {
    j0: i128,
    ju1: i128,
    ju2: i128,
    jv: i128,
    scale: i128,
}

impl SflIndex {
    fn new(params: &FractionalLinearParams) -> Self {
        let q = params.d.map(|r| i128::from(*r.numer()));
        let r = params.d.map(|r| i128::from(*r.denom()));
        Self {
            j0: r[1] * r[2] * r[3] * q[0],
            ju1: r[0] * r[2] * r[3] * q[1],
            ju2: r[0] * r[1] * r[2] * q[3],
            jv: r[0] * r[1] * r[3] * q[2],
            scale: r[0] * r[1] * r[2] * r[3],
        }
    }

    /// Slot read for cutoff `k` and `k1` positives inside.
    fn visited(&self, k: usize, k1: usize) -> i128 {
        (self.ju1 + self.ju2) * k1 as i128 + self.jv * k as i128
    }

    /// Inclusive slot range that must hold valid values at each level `k`.
    fn needed_ranges(&self, n: usize) -> Vec<(i128, i128)> {
        let mut ranges = vec![(0, -1); n + 1];
        let slope = self.ju1 + self.ju2;
        for k in 1..=n {
            let kk = k as i128;
            let mut lo = (slope * kk).min(0) + self.jv * kk;
            let mut hi = (slope * kk).max(0) + self.jv * kk;
            if k > 1 {
                let (plo, phi) = ranges[k - 1];
                lo = lo.min(plo).min(plo + self.ju2);
                hi = hi.max(phi).max(phi + self.ju2);
            }
            ranges[k] = (lo, hi);
        }
        ranges
    }
}

/// Optimal top-`k` prediction for ratio metrics
/// `(c0 + c1 u + c2 v) / (d0 + d1 u + d2 v + d3 p)` with `c1 > d1` and
/// rational `d_i`, in `O(n^2)`.
///
/// The cutoff `k = 0` is evaluated directly so conventions for the empty
/// prediction apply.
pub fn optimize_sfl(m: &MetricSpec, etas: &[f64]) -> Result<Prediction> {
    let params = match &m.fl_params {
        Some(p) if p.is_sfl_eligible() => p.clone(),
        _ => return Err(Error::NotSfl(m.name.clone())),
    };
    let sorted = validate_input(etas)?;
    let curve = sfl_curve(m, &params, sorted.values())?;
    Ok(finish(m, &sorted, curve))
}

fn sfl_curve(m: &MetricSpec, params: &FractionalLinearParams, eta: &[f64]) -> Result<Vec<f64>> {
    let n = eta.len();
    let idx = SflIndex::new(params);
    let ranges = idx.needed_ranges(n);
    let (lo, hi) = ranges[n];
    let slots = hi - lo + 1;
    if slots > MAX_SFL_SLOTS {
        return Err(Error::IndexRangeTooLarge(slots));
    }
    let offset = lo;
    let slot = |i: i128| -> usize {
        debug_assert!(i >= lo && i <= hi, "slot {i} outside [{lo}, {hi}]");
        (i - offset) as usize
    };

    let n_i = n as i128;
    let scale = idx.scale as f64;
    let mut table: Vec<f64> = (lo..=hi)
        .map(|i| {
            let den = i + idx.j0 * n_i;
            if den == 0 {
                f64::NAN
            } else {
                scale / den as f64
            }
        })
        .collect();

    let [c0, c1, c2, _] = params.c;
    let nf = n as f64;
    let mut curve = vec![0.0; n + 1];
    let mut failure = None;

    for_each_prefix_descending(eta, |k, prefix| {
        if failure.is_some() {
            return;
        }
        if k == 0 {
            let all = coefficients_unchecked(eta);
            curve[0] = partition_utility(m, &[1.0], all.as_slice(), n);
            return;
        }
        let mut score = 0.0;
        for (k1, &c) in prefix.as_slice().iter().enumerate() {
            let b = table[slot(idx.visited(k, k1))];
            score += (c0 * nf + c1 * k1 as f64 + c2 * k as f64) * c * b;
        }
        if !score.is_finite() {
            failure = Some(Error::DenominatorZero { k });
            return;
        }
        curve[k] = score;

        // Move the table from level k to level k - 1.
        if k > 1 && idx.ju2 != 0 {
            let e = eta[k - 1];
            let q = 1.0 - e;
            let (nlo, nhi) = ranges[k - 1];
            let shift = idx.ju2;
            if shift > 0 {
                for i in nlo..=nhi {
                    table[slot(i)] = q * table[slot(i)] + e * table[slot(i + shift)];
                }
            } else {
                for i in (nlo..=nhi).rev() {
                    table[slot(i)] = q * table[slot(i)] + e * table[slot(i + shift)];
                }
            }
        }
    });

    match failure {
        Some(err) => Err(err),
        None => Ok(curve),
    }
}

fn mask_to_labels(mask: u32, n: usize, out: &mut [u8]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = ((mask >> (n - 1 - i)) & 1) as u8;
    }
}

/// Expected utility of every prediction vector, indexed so that ascending
/// index is lexicographic order of the label vector.
fn all_utilities(m: &MetricSpec, etas: &[f64]) -> Result<Vec<f64>> {
    let n = etas.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::TooLargeForBruteForce {
            n,
            max: MAX_BRUTE_FORCE_N,
        });
    }
    check_probabilities(etas)?;
    let mut s = vec![0u8; n];
    Ok((0u32..(1 << n))
        .map(|mask| {
            mask_to_labels(mask, n, &mut s);
            arbitrary_unchecked(m, etas, &s)
        })
        .collect())
}

/// Exhaustive search over all `2^n` prediction vectors (`n <= 15`).
///
/// Among vectors within [`TIE_TOL`] of the extremum, the lexicographically
/// smallest is returned.
pub fn brute_force(m: &MetricSpec, etas: &[f64]) -> Result<Prediction> {
    let n = etas.len();
    let utilities = all_utilities(m, etas)?;
    let best_mask = m
        .orientation
        .select(&utilities, TIE_TOL)
        .expect("at least one prediction vector");
    let mut curve: Vec<Option<f64>> = vec![None; n + 1];
    for (mask, &u) in utilities.iter().enumerate() {
        let k = (mask as u32).count_ones() as usize;
        curve[k] = Some(match curve[k] {
            Some(best) if !m.orientation.better(u, best) => best,
            _ => u,
        });
    }
    let mut s_star = vec![0u8; n];
    mask_to_labels(best_mask as u32, n, &mut s_star);
    Ok(Prediction {
        k_star: (best_mask as u32).count_ones() as usize,
        s_star,
        utility: utilities[best_mask],
        utility_curve: curve.into_iter().map(|c| c.expect("every count occurs")).collect(),
    })
}

/// `min{eta_i : s_i = 1} >= max{eta_i : s_i = 0}`.
pub fn satisfies_ranking(etas: &[f64], s: &[u8]) -> bool {
    let min_pos = etas
        .iter()
        .zip(s)
        .filter(|(_, &si)| si == 1)
        .map(|(&e, _)| e)
        .fold(f64::INFINITY, f64::min);
    let max_neg = etas
        .iter()
        .zip(s)
        .filter(|(_, &si)| si == 0)
        .map(|(&e, _)| e)
        .fold(f64::NEG_INFINITY, f64::max);
    min_pos >= max_neg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrpCheck {
    pub holds: bool,
    /// An optimal vector; it satisfies the ranking inequality when `holds`.
    pub optimum: Vec<u8>,
    pub utility: f64,
    /// Number of vectors within [`UTILITY_TOL`] of the optimum.
    pub optimal_count: usize,
    /// The lexicographically smallest optimal vector when no optimal vector
    /// satisfies the ranking inequality.
    pub witness: Option<Vec<u8>>,
}

/// Checks whether some exhaustively optimal prediction labels positive
/// exactly a top set of the probabilities (`n <= 15`).
pub fn verify_prp(m: &MetricSpec, etas: &[f64]) -> Result<PrpCheck> {
    let n = etas.len();
    let utilities = all_utilities(m, etas)?;
    let best_mask = m
        .orientation
        .select(&utilities, TIE_TOL)
        .expect("at least one prediction vector");
    let best = utilities[best_mask];
    let mut s = vec![0u8; n];
    let mut first_optimal: Option<Vec<u8>> = None;
    let mut optimal_count = 0;
    let mut ranked: Option<(Vec<u8>, f64)> = None;
    for (mask, &u) in utilities.iter().enumerate() {
        if (u - best).abs() > UTILITY_TOL {
            continue;
        }
        optimal_count += 1;
        mask_to_labels(mask as u32, n, &mut s);
        if first_optimal.is_none() {
            first_optimal = Some(s.clone());
        }
        if ranked.is_none() && satisfies_ranking(etas, &s) {
            ranked = Some((s.clone(), u));
        }
    }
    let first_optimal = first_optimal.expect("the extremum itself is optimal");
    Ok(match ranked {
        Some((optimum, utility)) => PrpCheck {
            holds: true,
            optimum,
            utility,
            optimal_count,
            witness: None,
        },
        None => PrpCheck {
            holds: false,
            optimum: first_optimal.clone(),
            utility: best,
            optimal_count,
            witness: Some(first_optimal),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{adversarial, registry_lookup};

    fn metric(name: &str) -> MetricSpec {
        registry_lookup(name, None).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn topk_examples() {
        let f1 = metric("F1");
        let one = SortedEtas::new(&[0.9]).unwrap();
        assert!(close(expected_utility_topk(&f1, &one, 1).unwrap(), 0.9, 1e-15));
        assert!(close(expected_utility_topk(&f1, &one, 0).unwrap(), 0.1, 1e-15));
        let two = SortedEtas::new(&[0.8, 0.4]).unwrap();
        // 0.48 * 1 + 0.32 * 2/3
        assert!(close(expected_utility_topk(&f1, &two, 1).unwrap(), 0.48 + 0.32 * 2.0 / 3.0, 1e-15));
        assert!(matches!(
            expected_utility_topk(&f1, &two, 3),
            Err(Error::CutoffOutOfRange { .. })
        ));
    }

    #[test]
    fn arbitrary_examples() {
        let f1 = metric("F1");
        let etas = [0.8, 0.4];
        let u = expected_utility_arbitrary(&f1, &etas, &[0, 1]).unwrap();
        assert!(close(u, 0.08 + 0.32 * 2.0 / 3.0, 1e-15));
        let all = expected_utility_arbitrary(&f1, &etas, &[1, 1]).unwrap();
        let sorted = SortedEtas::new(&etas).unwrap();
        assert!(close(all, expected_utility_topk(&f1, &sorted, 2).unwrap(), 1e-15));

        // Point-mass labels reproduce the plain metric value.
        let y = [1.0, 0.0, 1.0, 1.0, 0.0];
        let s = [1u8, 1, 0, 1, 0];
        let y_bits: Vec<u8> = y.iter().map(|&v| v as u8).collect();
        for m in crate::metric::registry_metrics() {
            let expected = m.evaluate(&s, &y_bits).unwrap();
            let got = expected_utility_arbitrary(&m, &y, &s).unwrap();
            assert!(close(got, expected, 1e-15), "{}", m.name);
        }

        assert!(matches!(
            expected_utility_arbitrary(&f1, &etas, &[1]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn general_examples() {
        let f1 = metric("F1");
        let p = optimize_general(&f1, &[0.9]).unwrap();
        assert_eq!(p.k_star, 1);
        assert!(close(p.utility, 0.9, 1e-15));

        let p = optimize_general(&f1, &[0.8, 0.4]).unwrap();
        let expected = [0.12, 0.48 + 0.32 * 2.0 / 3.0, 0.32 + 0.48 * 2.0 / 3.0 + 0.08 * 2.0 / 3.0];
        for (a, b) in p.utility_curve.iter().zip(expected) {
            assert!(close(*a, b, 1e-12));
        }
        assert_eq!(p.k_star, 1);
        assert_eq!(p.s_star, vec![1, 0]);

        let sec = metric("SEC");
        let p = optimize_general(&sec, &[0.9, 0.8, 0.1]).unwrap();
        assert_eq!(p.k_star, 2);
        assert_eq!(p.s_star, vec![1, 1, 0]);

        assert!(matches!(optimize_general(&f1, &[]), Err(Error::EmptyInput)));
        assert!(optimize_general(&f1, &[0.5, 1.2]).is_err());
    }

    #[test]
    fn sfl_examples() {
        let f1 = metric("F1");
        let a = optimize_sfl(&f1, &[0.9]).unwrap();
        assert_eq!(a.k_star, 1);
        assert!(close(a.utility, 0.9, 1e-15));

        let jac = metric("Jaccard");
        let a = optimize_sfl(&jac, &[0.8, 0.4]).unwrap();
        let b = optimize_general(&jac, &[0.8, 0.4]).unwrap();
        assert_eq!(a.k_star, b.k_star);
        assert!(close(a.utility, b.utility, 1e-9));

        assert!(matches!(optimize_sfl(&metric("AM"), &[0.5]), Err(Error::NotSfl(_))));
    }

    #[test]
    fn sfl_matches_general_for_custom_fractional_metrics() {
        // Negative d1, nontrivial d0 and d2 with denominators other than 1.
        let params = FractionalLinearParams::new(
            [0.5, 1.0, 0.25, 0.0],
            [
                crate::metric::Rational::new(1, 2),
                crate::metric::Rational::new(-1, 3),
                crate::metric::Rational::new(3, 4),
                crate::metric::Rational::new(2, 5),
            ],
        )
        .unwrap();
        let m = MetricSpec::fractional_linear("custom", params);
        assert!(m.is_sfl());
        let etas: Vec<f64> = (0..23).map(|i| ((i * 53 + 7) % 97) as f64 / 97.0).collect();
        let a = optimize_sfl(&m, &etas).unwrap();
        let b = optimize_general(&m, &etas).unwrap();
        for (x, y) in a.utility_curve.iter().zip(&b.utility_curve) {
            assert!(close(*x, *y, 1e-9), "{x} vs {y}");
        }

        // d3 = 0 keeps the table constant.
        let params = FractionalLinearParams::with_integer_denominator([0.0, 3.0, 0.0, 0.0], [1, 1, 1, 0])
            .unwrap();
        let m = MetricSpec::fractional_linear("no-d3", params);
        let a = optimize_sfl(&m, &etas).unwrap();
        let b = optimize_general(&m, &etas).unwrap();
        for (x, y) in a.utility_curve.iter().zip(&b.utility_curve) {
            assert!(close(*x, *y, 1e-9), "{x} vs {y}");
        }
    }

    #[test]
    fn sfl_reports_zero_denominator() {
        // Denominator n - k vanishes at the full prediction.
        let params = FractionalLinearParams::with_integer_denominator([0.0, 1.0, 0.0, 0.0], [1, 0, -1, 0])
            .unwrap();
        let m = MetricSpec::fractional_linear("bad", params);
        assert!(matches!(
            optimize_sfl(&m, &[0.3, 0.6, 0.2]),
            Err(Error::DenominatorZero { k: 3 })
        ));
    }

    #[test]
    fn brute_force_examples() {
        let f1 = metric("F1");
        let p = brute_force(&f1, &[0.9]).unwrap();
        assert_eq!(p.s_star, vec![1]);
        assert!(close(p.utility, 0.9, 1e-15));

        for m in crate::metric::registry_metrics() {
            let etas = [0.35; 5];
            let a = brute_force(&m, &etas).unwrap();
            let b = optimize_general(&m, &etas).unwrap();
            assert!(close(a.utility, b.utility, 1e-9), "{}", m.name);
        }

        let err = brute_force(&f1, &[0.5; 16]).unwrap_err();
        assert!(matches!(err, Error::TooLargeForBruteForce { n: 16, max: 15 }));
    }

    #[test]
    fn brute_force_tie_break_is_lexicographic() {
        // All vectors with the same count tie under equal probabilities;
        // the lexicographically smallest puts the positives last.
        let f1 = metric("F1");
        let p = brute_force(&f1, &[0.6, 0.6, 0.6]).unwrap();
        let expected: Vec<u8> = {
            let mut s = vec![0u8; 3];
            for i in 3 - p.k_star..3 {
                s[i] = 1;
            }
            s
        };
        assert_eq!(p.s_star, expected);
    }

    #[test]
    fn prp_holds_for_f1_and_fails_for_inverted_ranking() {
        let etas = [0.12, 0.93, 0.55, 0.41, 0.77, 0.05, 0.68, 0.3, 0.86, 0.21];
        assert!(verify_prp(&metric("F1"), &etas).unwrap().holds);
        assert!(verify_prp(&metric("SEC"), &etas).unwrap().holds);

        let check = verify_prp(&adversarial::inverted_ranking(), &[0.9, 0.1]).unwrap();
        assert!(!check.holds);
        assert_eq!(check.witness, Some(vec![0, 1]));
    }

    #[test]
    fn negated_tp_optimum_is_the_empty_prediction() {
        // Brute force over the four vectors: (0,0) scores 0, the rest are negative.
        let m = adversarial::negated_tp();
        let p = brute_force(&m, &[0.9, 0.1]).unwrap();
        assert_eq!(p.s_star, vec![0, 0]);
        let check = verify_prp(&m, &[0.9, 0.1]).unwrap();
        assert!(check.holds);
        assert_eq!(check.optimum, vec![0, 0]);
    }

    #[test]
    fn exhaustive_enumeration_matches_factorization() {
        let etas = [0.3, 0.75, 0.1, 0.9, 0.5, 0.62];
        for m in crate::metric::registry_metrics() {
            for mask in 0u32..64 {
                let mut s = vec![0u8; 6];
                mask_to_labels(mask, 6, &mut s);
                let a = expected_utility_exhaustive(&m, &etas, &s).unwrap();
                let b = expected_utility_arbitrary(&m, &etas, &s).unwrap();
                assert!(close(a, b, 1e-12), "{} {s:?}: {a} vs {b}", m.name);
            }
        }
    }

    #[test]
    fn sorted_etas_are_stable_on_ties() {
        let s = SortedEtas::new(&[0.2, 0.7, 0.2, 0.7]).unwrap();
        assert_eq!(s.values(), &[0.7, 0.7, 0.2, 0.2]);
        assert_eq!(s.perm(), &[1, 3, 0, 2]);
        assert_eq!(s.top_k_labels(1), vec![0, 1, 0, 0]);
    }
}
