use dtaopt_core::data::split_indices;
use dtaopt_core::metric::{adversarial, check_tp_monotonic, check_tpn_monotonic};
use dtaopt_core::optimizer::expected_utility_exhaustive;
use dtaopt_core::{
    classify_threshold, coefficients, expected_utility_topk, optimize_general, optimize_sfl, registry_lookup,
    registry_metrics, MetricSpec, SortedEtas,
};
use proptest::prelude::*;

fn etas(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 1..=max_len)
}

/// Probability of each success count by enumerating all `2^m` outcomes.
fn enumerate_counts(etas: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; etas.len() + 1];
    for mask in 0u32..(1 << etas.len()) {
        let p: f64 = etas
            .iter()
            .enumerate()
            .map(|(i, &e)| if mask >> i & 1 == 1 { e } else { 1.0 - e })
            .product();
        out[mask.count_ones() as usize] += p;
    }
    out
}

/// Textbook metric values from raw counts; only called where every ratio is defined.
fn from_counts(name: &str, s: &[u8], y: &[u8]) -> f64 {
    let (mut tp, mut fp, mut fn_, mut tn) = (0.0, 0.0, 0.0, 0.0);
    for (&a, &b) in s.iter().zip(y) {
        match (a, b) {
            (1, 1) => tp += 1.0,
            (1, 0) => fp += 1.0,
            (0, 1) => fn_ += 1.0,
            _ => tn += 1.0,
        }
    }
    let n = tp + fp + fn_ + tn;
    let tpr = tp / (tp + fn_);
    let tnr = tn / (tn + fp);
    let prec = tp / (tp + fp);
    let f = |b2: f64| (1.0 + b2) * tp / ((1.0 + b2) * tp + b2 * fn_ + fp);
    match name {
        "AM" => (tpr + tnr) / 2.0,
        "F0.5" => f(0.25),
        "F1" => f(1.0),
        "F2" => f(4.0),
        "Jaccard" => tp / (tp + fp + fn_),
        "G-TPPR" => (tpr * prec).sqrt(),
        "G-Mean" => (tpr * tnr).sqrt(),
        "H-Mean" => 2.0 * tpr * tnr / (tpr + tnr),
        "Q-Mean" => 1.0 - ((1.0 - tpr).powi(2) + (1.0 - tnr).powi(2)) / 2.0,
        "SEC" => ((tp + fn_) / n - (tp + fp) / n).powi(2),
        other => panic!("no oracle for {other}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coefficients_match_enumeration(e in etas(12)) {
        let table = coefficients(&e).unwrap();
        let oracle = enumerate_counts(&e);
        prop_assert_eq!(table.len(), e.len() + 1);
        for (a, b) in table.as_slice().iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        prop_assert!((table.total() - 1.0).abs() <= 1e-12);
        prop_assert!((table.mean() - e.iter().sum::<f64>()).abs() <= 1e-10);
    }

    #[test]
    fn coefficients_are_permutation_invariant(e in etas(40), seed in any::<u64>()) {
        let mut shuffled = e.clone();
        dtaopt_core::SplitMix64::new(seed).shuffle(&mut shuffled);
        let a = coefficients(&e).unwrap();
        let b = coefficients(&shuffled).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn topk_utility_matches_label_enumeration(e in etas(9), k_frac in 0.0f64..=1.0) {
        let sorted = SortedEtas::new(&e).unwrap();
        let k = (k_frac * e.len() as f64).round() as usize;
        let s = sorted.top_k_labels(k);
        for m in registry_metrics() {
            let fast = expected_utility_topk(&m, &sorted, k).unwrap();
            let slow = expected_utility_exhaustive(&m, &e, &s).unwrap();
            prop_assert!((fast - slow).abs() <= 1e-10, "{}: {} vs {}", m.name, fast, slow);
        }
    }

    #[test]
    fn optimum_is_permutation_equivariant(e in prop::collection::vec(0.001f64..0.999, 2..30), seed in any::<u64>()) {
        let mut distinct = e.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        prop_assume!(distinct.len() == e.len());
        let mut perm: Vec<usize> = (0..e.len()).collect();
        dtaopt_core::SplitMix64::new(seed).shuffle(&mut perm);
        let permuted: Vec<f64> = perm.iter().map(|&i| e[i]).collect();
        for name in ["F1", "AM", "SEC"] {
            let m = registry_lookup(name, None).unwrap();
            let a = optimize_general(&m, &e).unwrap();
            let b = optimize_general(&m, &permuted).unwrap();
            prop_assert_eq!(a.k_star, b.k_star);
            let expected: Vec<u8> = perm.iter().map(|&i| a.s_star[i]).collect();
            prop_assert_eq!(expected, b.s_star);
        }
    }

    #[test]
    fn quadratic_route_matches_cubic_for_rational_f_beta(e in etas(60), num in 1i64..6, den in 1i64..6) {
        let beta = (num as f64 / den as f64).sqrt();
        let m = registry_lookup("F_beta", Some(beta)).unwrap();
        prop_assume!(m.is_sfl());
        let a = optimize_general(&m, &e).unwrap();
        let b = optimize_sfl(&m, &e).unwrap();
        for (x, y) in a.utility_curve.iter().zip(&b.utility_curve) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn metrics_match_textbook_counts(pairs in prop::collection::vec((0u8..=1, 0u8..=1), 1..=12)) {
        let (s, y): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
        let all_cells = [(1, 1), (1, 0), (0, 1), (0, 0)]
            .iter()
            .all(|&(a, b)| s.iter().zip(&y).any(|(&x, &z)| (x, z) == (a, b)));
        prop_assume!(all_cells);
        for m in registry_metrics() {
            let got = m.evaluate(&s, &y).unwrap();
            let want = from_counts(&m.name, &s, &y);
            prop_assert!((got - want).abs() <= 1e-12, "{}: {} vs {}", m.name, got, want);
        }
    }

    #[test]
    fn threshold_counts_decrease_with_delta(e in etas(50), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let count = |d| classify_threshold(&e, d).iter().filter(|&&x| x == 1).count();
        prop_assert!(count(lo) >= count(hi));
    }

    #[test]
    fn splits_are_deterministic_partitions(n in 2usize..300, frac in 0.01f64..0.99, seed in any::<u64>()) {
        let (a, b) = split_indices(n, frac, seed).unwrap();
        prop_assert_eq!((a.clone(), b.clone()), split_indices(n, frac, seed).unwrap());
        prop_assert!(!a.is_empty() && !b.is_empty());
        let mut all: Vec<usize> = a.into_iter().chain(b).collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }
}

#[test]
fn joint_monotonicity_implies_tp_monotonicity() {
    let mut metrics: Vec<MetricSpec> = registry_metrics();
    metrics.extend([adversarial::tp_plus_predicted(), adversarial::negated_tp(), adversarial::inverted_ranking()]);
    for m in &metrics {
        for n in [5, 12, 25] {
            if check_tpn_monotonic(m, n) {
                assert!(check_tp_monotonic(m, n).holds, "{} at n={n}", m.name);
            }
        }
    }
}

#[test]
fn fractional_linear_form_matches_phi_on_grid() {
    let n: usize = 30;
    let nf = n as f64;
    for name in ["F0.5", "F1", "F2", "Jaccard"] {
        let m = registry_lookup(name, None).unwrap();
        let fl = m.fl_params.clone().unwrap();
        for v in 0..=n {
            for p in 0..=n {
                for u in (v + p).saturating_sub(n)..=v.min(p) {
                    let (u, v, p) = (u as f64 / nf, v as f64 / nf, p as f64 / nf);
                    if let Some(ratio) = fl.eval(u, v, p) {
                        assert!((ratio - m.phi_uvp(u, v, p)).abs() <= 1e-12, "{name} at ({u}, {v}, {p})");
                    }
                }
            }
        }
    }
}
