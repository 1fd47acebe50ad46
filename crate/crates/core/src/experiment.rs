//! Experiment drivers shared by the command-line tool, the acceptance suite
//! and the benchmarks: the Gaussian/sigmoid PRP experiment, the synthetic
//! corpus generator, the DTA / fixed-threshold / plug-in comparison, and
//! scaling measurements.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{macro_average, split_indices, BinaryTask, Dataset, DenseMatrix, Features, TaskSet};
use crate::error::{Error, Result};
use crate::estimator::{predict_proba, sigmoid, train_logistic, TrainOptions};
use crate::eum::{classify_threshold, select_threshold, DEFAULT_THRESHOLD};
use crate::metric::{registry_lookup, MetricSpec, Orientation};
use crate::optimizer::{
    brute_force, expected_utility_arbitrary, optimize_general, optimize_sfl, verify_prp, Prediction,
    SortedEtas, MAX_BRUTE_FORCE_N, UTILITY_TOL,
};

/// Version of the machine-readable report layout.
pub const SCHEMA_VERSION: u32 = 1;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Cubic search over top-k cutoffs; any metric.
    General,
    /// Quadratic search; simple fractional-linear metrics only.
    Sfl,
    /// Exhaustive search over all `2^n` vectors.
    Brute,
    /// Plug-in threshold tuned on held-out data.
    Eum,
    /// Fixed threshold at 1/2.
    Fixed,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::General,
        Algorithm::Sfl,
        Algorithm::Brute,
        Algorithm::Eum,
        Algorithm::Fixed,
    ];

    /// The quadratic route when the metric allows it, the cubic one otherwise.
    pub fn auto_for(m: &MetricSpec) -> Self {
        if m.is_sfl() {
            Algorithm::Sfl
        } else {
            Algorithm::General
        }
    }

    pub fn is_dta(self) -> bool {
        matches!(self, Algorithm::General | Algorithm::Sfl | Algorithm::Brute)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::General => "general",
            Algorithm::Sfl => "sfl",
            Algorithm::Brute => "brute",
            Algorithm::Eum => "eum",
            Algorithm::Fixed => "fixed",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm '{s}'")))
    }
}

/// Runs one of the expected-utility optimizers.
pub fn dta_predict(m: &MetricSpec, algorithm: Algorithm, etas: &[f64]) -> Result<Prediction> {
    match algorithm {
        Algorithm::General => optimize_general(m, etas),
        Algorithm::Sfl => optimize_sfl(m, etas),
        Algorithm::Brute => brute_force(m, etas),
        Algorithm::Eum | Algorithm::Fixed => Err(Error::InvalidParameter(format!(
            "'{algorithm}' is a thresholding rule, not an expected-utility optimizer"
        ))),
    }
}

/// Checks the preconditions tying an algorithm to a metric and a size.
pub fn check_algorithm(m: &MetricSpec, algorithm: Algorithm, n: usize) -> Result<()> {
    match algorithm {
        Algorithm::Sfl if !m.is_sfl() => Err(Error::NotSfl(m.name.clone())),
        Algorithm::Brute if n > MAX_BRUTE_FORCE_N => Err(Error::TooLargeForBruteForce {
            n,
            max: MAX_BRUTE_FORCE_N,
        }),
        _ => Ok(()),
    }
}

fn standard_normal<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Draws `w` and `x_1..x_n` from a standard Gaussian in `dim` dimensions and
/// returns `sigmoid(w . x_i)`.
pub fn gaussian_sigmoid_etas<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Vec<f64> {
    let w = standard_normal(rng, dim);
    (0..n).map(|_| sigmoid(dot(&w, &standard_normal(rng, dim)))).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrpConfig {
    pub n: usize,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for PrpConfig {
    fn default() -> Self {
        Self {
            n: 10,
            dim: 2,
            trials: 100,
            seed: 0,
        }
    }
}

/// One (trial, metric) cell: the probabilities in descending order and the
/// optimal labels in the same order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrpTrial {
    pub trial: usize,
    pub metric: String,
    pub sorted_etas: Vec<f64>,
    pub sorted_labels: Vec<u8>,
    pub optimal_utility: f64,
    pub prp_holds: bool,
    /// An optimal vector (original order) violating the ranking, if PRP fails.
    pub witness: Option<Vec<u8>>,
    /// `optimize_general` matches the exhaustive optimum.
    pub general_matches: bool,
    /// `optimize_sfl` matches the exhaustive optimum; `None` if not applicable.
    pub sfl_matches: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrpSummary {
    pub metric: String,
    pub trials: usize,
    pub prp_passes: usize,
    pub general_matches: usize,
    pub sfl_matches: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrpReport {
    pub config: PrpConfig,
    pub summary: Vec<PrpSummary>,
    pub trials: Vec<PrpTrial>,
}

impl PrpReport {
    pub fn all_pass(&self) -> bool {
        self.summary.iter().all(|s| {
            s.prp_passes == s.trials
                && s.general_matches == s.trials
                && s.sfl_matches.is_none_or(|c| c == s.trials)
        })
    }
}

/// Probabilities for every trial, drawn in order from one seeded stream.
pub fn prp_trial_etas(config: &PrpConfig) -> Vec<Vec<f64>> {
    let mut rng = seeded_rng(config.seed);
    (0..config.trials)
        .map(|_| gaussian_sigmoid_etas(&mut rng, config.n, config.dim))
        .collect()
}

/// Evaluates one metric on one probability vector.
pub fn prp_trial(m: &MetricSpec, trial: usize, etas: &[f64]) -> Result<PrpTrial> {
    let check = verify_prp(m, etas)?;
    let general = optimize_general(m, etas)?;
    let sfl = if m.is_sfl() { Some(optimize_sfl(m, etas)?) } else { None };
    let matches = |p: &Prediction| (p.utility - check.utility).abs() <= UTILITY_TOL;
    let sorted = SortedEtas::new(etas)?;
    let sorted_labels = sorted.perm().iter().map(|&i| check.optimum[i]).collect();
    Ok(PrpTrial {
        trial,
        metric: m.name.clone(),
        sorted_etas: sorted.values().to_vec(),
        sorted_labels,
        optimal_utility: check.utility,
        prp_holds: check.holds,
        witness: check.witness,
        general_matches: matches(&general),
        sfl_matches: sfl.as_ref().map(matches),
    })
}

pub fn summarize_prp(metrics: &[MetricSpec], trials: &[PrpTrial]) -> Vec<PrpSummary> {
    metrics
        .iter()
        .map(|m| {
            let rows: Vec<&PrpTrial> = trials.iter().filter(|t| t.metric == m.name).collect();
            PrpSummary {
                metric: m.name.clone(),
                trials: rows.len(),
                prp_passes: rows.iter().filter(|t| t.prp_holds).count(),
                general_matches: rows.iter().filter(|t| t.general_matches).count(),
                sfl_matches: m
                    .is_sfl()
                    .then(|| rows.iter().filter(|t| t.sfl_matches == Some(true)).count()),
            }
        })
        .collect()
}

/// Sequential PRP experiment over `config.trials` Gaussian draws.
pub fn run_prp_experiment(metrics: &[MetricSpec], config: &PrpConfig) -> Result<PrpReport> {
    if config.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if config.n > MAX_BRUTE_FORCE_N {
        return Err(Error::TooLargeForBruteForce {
            n: config.n,
            max: MAX_BRUTE_FORCE_N,
        });
    }
    let mut trials = Vec::new();
    for (t, etas) in prp_trial_etas(config).iter().enumerate() {
        for m in metrics {
            trials.push(prp_trial(m, t, etas)?);
        }
    }
    Ok(PrpReport {
        config: config.clone(),
        summary: summarize_prp(metrics, &trials),
        trials,
    })
}

/// A logistic model with known parameters, used to synthesize labelled data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmoidGenerator {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl SigmoidGenerator {
    pub const DEFAULT_DIM: usize = 5;
    pub const DEFAULT_POSITIVE_RATE: f64 = 0.1;

    /// Draws standard Gaussian weights and picks the bias by bisection so
    /// that the mean probability over Gaussian inputs is `positive_rate`.
    pub fn new(dim: usize, positive_rate: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if !(positive_rate > 0.0 && positive_rate < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "positive rate must be in (0, 1) (found {positive_rate})"
            )));
        }
        let mut rng = seeded_rng(seed);
        let weights = standard_normal(&mut rng, dim);
        let logits: Vec<f64> = (0..20_000)
            .map(|_| dot(&weights, &standard_normal(&mut rng, dim)))
            .collect();
        let mean_eta = |b: f64| logits.iter().map(|t| sigmoid(t + b)).sum::<f64>() / logits.len() as f64;
        let (mut lo, mut hi) = (-50.0, 50.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mean_eta(mid) < positive_rate {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Self {
            weights,
            bias: 0.5 * (lo + hi),
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn eta(&self, x: &[f64]) -> f64 {
        sigmoid(dot(&self.weights, x) + self.bias)
    }

    /// Gaussian inputs, their true probabilities, and Bernoulli labels.
    pub fn sample(&self, n: usize, seed: u64) -> (DenseMatrix, Vec<f64>, Vec<u8>) {
        let mut rng = seeded_rng(seed);
        let mut data = Vec::with_capacity(n * self.dim());
        let mut etas = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let x = standard_normal(&mut rng, self.dim());
            let eta = self.eta(&x);
            labels.push(u8::from(rng.random::<f64>() < eta));
            etas.push(eta);
            data.extend(x);
        }
        let x = DenseMatrix::from_vec(n, self.dim(), data).expect("sized above");
        (x, etas, labels)
    }

    pub fn dataset(&self, name: &str, n: usize, seed: u64) -> Dataset {
        let (x, _, y) = self.sample(n, seed);
        Dataset::new(name, Features::Dense(x), y.into_iter().map(i64::from).collect())
            .expect("labels are binary and sized to the features")
    }
}

/// The generator behind the bundled corpus, and the seeds of its files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticCorpusConfig {
    pub name: String,
    pub dim: usize,
    pub positive_rate: f64,
    pub generator_seed: u64,
    pub n_train: usize,
    pub n_test: usize,
}

impl Default for SyntheticCorpusConfig {
    fn default() -> Self {
        Self {
            name: "synthetic".into(),
            dim: SigmoidGenerator::DEFAULT_DIM,
            positive_rate: SigmoidGenerator::DEFAULT_POSITIVE_RATE,
            generator_seed: 2024,
            n_train: 2000,
            n_test: 500,
        }
    }
}

impl SyntheticCorpusConfig {
    pub fn generator(&self) -> Result<SigmoidGenerator> {
        SigmoidGenerator::new(self.dim, self.positive_rate, self.generator_seed)
    }

    /// A train/test pair for one replication; distinct `replicate` values
    /// give independent samples from the same generator.
    pub fn draw(&self, replicate: u64) -> Result<(Dataset, Dataset)> {
        let g = self.generator()?;
        let base = replicate.wrapping_mul(2).wrapping_add(1) ^ self.generator_seed.rotate_left(32);
        Ok((
            g.dataset(&format!("{}-train", self.name), self.n_train, base),
            g.dataset(&format!("{}-test", self.name), self.n_test, base.wrapping_add(1)),
        ))
    }
}

/// A metric together with the optimizer used for its DTA column.
#[derive(Debug, Clone)]
pub struct MetricPlan {
    pub metric: MetricSpec,
    pub algorithm: Algorithm,
}

impl MetricPlan {
    pub fn new(metric: MetricSpec, algorithm: Algorithm) -> Result<Self> {
        if !algorithm.is_dta() {
            return Err(Error::InvalidParameter(format!(
                "the DTA column needs an optimizer, not '{algorithm}'"
            )));
        }
        if algorithm == Algorithm::Sfl && !metric.is_sfl() {
            return Err(Error::NotSfl(metric.name.clone()));
        }
        Ok(Self { metric, algorithm })
    }

    pub fn auto(metric: MetricSpec) -> Self {
        let algorithm = Algorithm::auto_for(&metric);
        Self { metric, algorithm }
    }
}

/// F1 and Jaccard through the quadratic route, AM and G-TP/PR through the
/// cubic one.
pub fn default_compare_plans() -> Vec<MetricPlan> {
    [("F1", Algorithm::Sfl), ("Jaccard", Algorithm::Sfl), ("AM", Algorithm::General), ("G-TPPR", Algorithm::General)]
        .into_iter()
        .map(|(name, a)| MetricPlan::new(registry_lookup(name, None).expect("registry name"), a).expect("valid plan"))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareConfig {
    pub train: TrainOptions,
    /// Fraction of the training rows used to fit the plug-in model; the
    /// rest select its threshold.
    pub split_fraction: f64,
    pub seed: u64,
    /// Overrides the tuned plug-in threshold.
    pub forced_delta: Option<f64>,
    /// Apply the plug-in threshold to the model fit on all training rows
    /// instead of the model fit on the first part of the split.
    pub eum_refit: bool,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            train: TrainOptions::default(),
            split_fraction: 0.5,
            seed: 0,
            forced_delta: None,
            eum_refit: false,
        }
    }
}

/// Per-class test utilities for one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskResult {
    pub class_id: i64,
    pub metric: String,
    pub algorithm: Algorithm,
    pub k_star: usize,
    pub delta: f64,
    pub utility_dta: f64,
    pub utility_baseline: f64,
    pub utility_eum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub dataset: String,
    pub metric: String,
    pub algorithm: Algorithm,
    #[serde(rename = "T")]
    pub min_positives: usize,
    pub classes: usize,
    pub utility_dta: f64,
    pub utility_baseline: f64,
    pub utility_eum: f64,
}

/// Runs every metric plan on one one-vs-rest task. The DTA and baseline
/// columns see only test features; test labels are used for scoring.
pub fn compare_task(task: &BinaryTask, plans: &[MetricPlan], config: &CompareConfig) -> Result<Vec<TaskResult>> {
    let train_x = task.train.features.as_ref();
    let test_x = task.test.features.as_ref();
    let full = train_logistic(train_x, &task.train.labels, &config.train)?;
    let eta_test = predict_proba(&full, test_x)?;

    let (fit_idx, val_idx) = split_indices(train_x.rows(), config.split_fraction, config.seed)?;
    let fit_y: Vec<u8> = fit_idx.iter().map(|&i| task.train.labels[i]).collect();
    let val_y: Vec<u8> = val_idx.iter().map(|&i| task.train.labels[i]).collect();
    let half = train_logistic(&train_x.select_rows(&fit_idx), &fit_y, &config.train)?;
    let eta_val = predict_proba(&half, &train_x.select_rows(&val_idx))?;
    let eta_eum = if config.eum_refit {
        eta_test.clone()
    } else {
        predict_proba(&half, test_x)?
    };

    let baseline = classify_threshold(&eta_test, DEFAULT_THRESHOLD);
    let y = &task.test.labels;
    plans
        .iter()
        .map(|plan| {
            let m = &plan.metric;
            let pred = dta_predict(m, plan.algorithm, &eta_test)?;
            let delta = match config.forced_delta {
                Some(d) => d,
                None => select_threshold(m, &eta_val, &val_y)?.delta,
            };
            Ok(TaskResult {
                class_id: task.class_id,
                metric: m.name.clone(),
                algorithm: plan.algorithm,
                k_star: pred.k_star,
                delta,
                utility_dta: m.evaluate(&pred.s_star, y)?,
                utility_baseline: m.evaluate(&baseline, y)?,
                utility_eum: m.evaluate(&classify_threshold(&eta_eum, delta), y)?,
            })
        })
        .collect()
}

/// Macro-averages per-class results into one row per metric, in plan order.
pub fn aggregate(tasks: &TaskSet, plans: &[MetricPlan], results: &[TaskResult]) -> Result<Vec<ComparisonRow>> {
    plans
        .iter()
        .map(|plan| {
            let rows: Vec<&TaskResult> = results.iter().filter(|r| r.metric == plan.metric.name).collect();
            let col = |f: fn(&TaskResult) -> f64| macro_average(&rows.iter().map(|r| f(r)).collect::<Vec<_>>());
            Ok(ComparisonRow {
                dataset: tasks.name.clone(),
                metric: plan.metric.name.clone(),
                algorithm: plan.algorithm,
                min_positives: tasks.min_positives,
                classes: rows.len(),
                utility_dta: col(|r| r.utility_dta)?,
                utility_baseline: col(|r| r.utility_baseline)?,
                utility_eum: col(|r| r.utility_eum)?,
            })
        })
        .collect()
}

/// Sequential comparison over all tasks.
pub fn compare(tasks: &TaskSet, plans: &[MetricPlan], config: &CompareConfig) -> Result<Vec<ComparisonRow>> {
    let mut results = Vec::new();
    for task in &tasks.tasks {
        results.extend(compare_task(task, plans, config)?);
    }
    aggregate(tasks, plans, &results)
}

/// Median of `values` (mean of the two middle entries for even lengths).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 0 { 0.5 * (v[mid - 1] + v[mid]) } else { v[mid] })
}

/// Regret of optimizing against perturbed probabilities: for each trial,
/// `U(s*; eta) - U(s_hat; eta)` where `s_hat` is optimal for
/// `clamp(eta + Uniform(-eps, eps))`. Minimized metrics report the
/// sign-adjusted difference so that regret is nonnegative in both cases.
pub fn perturbation_regret(m: &MetricSpec, n: usize, eps: f64, trials: usize, seed: u64) -> Result<Vec<f64>> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be >= 0 (found {eps})")));
    }
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let eta = gaussian_sigmoid_etas(&mut rng, n, 2);
        let eta_hat: Vec<f64> = eta
            .iter()
            .map(|e| {
                let noise = if eps > 0.0 { rng.random_range(-eps..eps) } else { 0.0 };
                (e + noise).clamp(0.0, 1.0)
            })
            .collect();
        let best = optimize_general(m, &eta)?;
        let hat = optimize_general(m, &eta_hat)?;
        let diff = expected_utility_arbitrary(m, &eta, &best.s_star)? - expected_utility_arbitrary(m, &eta, &hat.s_star)?;
        out.push(match m.orientation {
            Orientation::Maximize => diff,
            Orientation::Minimize => -diff,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub metric: String,
    pub n: usize,
    pub seconds: f64,
    /// Time relative to the previous size in the list.
    pub ratio: Option<f64>,
}

/// Median wall time of `f`, repeating until `min_total` has elapsed (at
/// least three runs).
pub fn time_median<F: FnMut()>(mut f: F, min_total: Duration) -> Duration {
    let mut samples = Vec::new();
    let start = Instant::now();
    while samples.len() < 3 || start.elapsed() < min_total {
        let t = Instant::now();
        f();
        samples.push(t.elapsed());
        if samples.len() >= 1000 {
            break;
        }
    }
    samples.sort();
    samples[samples.len() / 2]
}

/// Times an optimizer on uniform random probabilities for each `n`.
pub fn scaling_benchmark(
    m: &MetricSpec,
    algorithm: Algorithm,
    sizes: &[usize],
    seed: u64,
    min_total: Duration,
) -> Result<Vec<BenchRow>> {
    let mut rng = seeded_rng(seed);
    let mut rows: Vec<BenchRow> = Vec::with_capacity(sizes.len());
    for &n in sizes {
        check_algorithm(m, algorithm, n)?;
        let etas: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        dta_predict(m, algorithm, &etas)?;
        let elapsed = time_median(
            || {
                std::hint::black_box(dta_predict(m, algorithm, std::hint::black_box(&etas)).ok());
            },
            min_total,
        );
        let seconds = elapsed.as_secs_f64();
        let ratio = rows.last().map(|prev| seconds / prev.seconds);
        rows.push(BenchRow {
            algorithm,
            metric: m.name.clone(),
            n,
            seconds,
            ratio,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::make_tasks;
    use crate::metric::{adversarial, registry_metrics};

    #[test]
    fn algorithm_parsing() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("SFL".parse::<Algorithm>().unwrap(), Algorithm::Sfl);
        assert!("fast".parse::<Algorithm>().is_err());
    }

    #[test]
    fn algorithm_guards() {
        let am = registry_lookup("AM", None).unwrap();
        assert!(matches!(check_algorithm(&am, Algorithm::Sfl, 10), Err(Error::NotSfl(_))));
        assert!(matches!(
            check_algorithm(&am, Algorithm::Brute, 20),
            Err(Error::TooLargeForBruteForce { n: 20, .. })
        ));
        assert!(dta_predict(&am, Algorithm::Fixed, &[0.5]).is_err());
        assert!(MetricPlan::new(am, Algorithm::Sfl).is_err());
    }

    #[test]
    fn prp_experiment_small() {
        let metrics: Vec<MetricSpec> = ["AM", "F1", "Jaccard", "G-TPPR"]
            .iter()
            .map(|n| registry_lookup(n, None).unwrap())
            .collect();
        let cfg = PrpConfig { trials: 5, ..Default::default() };
        let report = run_prp_experiment(&metrics, &cfg).unwrap();
        assert!(report.all_pass(), "{:?}", report.summary);
        assert_eq!(report.trials.len(), 20);
        let t = &report.trials[0];
        assert!(t.sorted_etas.windows(2).all(|w| w[0] >= w[1]));
        // PRP holds, so the sorted labels form a prefix of ones.
        assert!(t.sorted_labels.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn prp_experiment_is_deterministic() {
        let m = vec![registry_lookup("F1", None).unwrap()];
        let cfg = PrpConfig { trials: 3, seed: 9, ..Default::default() };
        let a = run_prp_experiment(&m, &cfg).unwrap();
        let b = run_prp_experiment(&m, &cfg).unwrap();
        assert_eq!(a.trials[2].sorted_etas, b.trials[2].sorted_etas);
    }

    #[test]
    fn inverted_ranking_reports_witnesses() {
        let m = vec![adversarial::inverted_ranking()];
        let cfg = PrpConfig { trials: 10, ..Default::default() };
        let report = run_prp_experiment(&m, &cfg).unwrap();
        assert!(report.summary[0].prp_passes < 10);
        assert!(report.trials.iter().any(|t| !t.prp_holds && t.witness.is_some()));
    }

    #[test]
    fn prp_rejects_large_n() {
        let m = registry_metrics();
        let cfg = PrpConfig { n: 16, ..Default::default() };
        assert!(run_prp_experiment(&m, &cfg).is_err());
    }

    #[test]
    fn generator_hits_the_positive_rate() {
        let g = SigmoidGenerator::new(5, 0.1, 3).unwrap();
        let (_, etas, y) = g.sample(20_000, 4);
        let mean_eta = etas.iter().sum::<f64>() / etas.len() as f64;
        let rate = y.iter().map(|&v| f64::from(v)).sum::<f64>() / y.len() as f64;
        assert!((mean_eta - 0.1).abs() < 0.01, "{mean_eta}");
        assert!((rate - 0.1).abs() < 0.015, "{rate}");
    }

    #[test]
    fn corpus_draws_are_reproducible_and_distinct() {
        let cfg = SyntheticCorpusConfig { n_train: 50, n_test: 20, ..Default::default() };
        let (a, _) = cfg.draw(1).unwrap();
        let (b, _) = cfg.draw(1).unwrap();
        let (c, _) = cfg.draw(2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.features, c.features);
    }

    fn synthetic_tasks() -> TaskSet {
        let cfg = SyntheticCorpusConfig { n_train: 400, n_test: 200, ..Default::default() };
        let (train, test) = cfg.draw(0).unwrap();
        make_tasks(&train, &test, 5).unwrap()
    }

    #[test]
    fn forced_half_threshold_with_refit_equals_baseline() {
        let tasks = synthetic_tasks();
        let plans = default_compare_plans();
        let cfg = CompareConfig {
            forced_delta: Some(0.5),
            eum_refit: true,
            ..Default::default()
        };
        for row in compare(&tasks, &plans, &cfg).unwrap() {
            assert_eq!(row.utility_eum, row.utility_baseline, "{}", row.metric);
        }
    }

    #[test]
    fn compare_rows_are_in_range() {
        let tasks = synthetic_tasks();
        let plans = default_compare_plans();
        let rows = compare(&tasks, &plans, &CompareConfig::default()).unwrap();
        assert_eq!(rows.len(), plans.len());
        for r in &rows {
            for u in [r.utility_dta, r.utility_baseline, r.utility_eum] {
                assert!((0.0..=1.0).contains(&u), "{r:?}");
            }
            assert_eq!(r.classes, 1);
        }
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn zero_noise_has_zero_regret() {
        let f1 = registry_lookup("F1", None).unwrap();
        let r = perturbation_regret(&f1, 20, 0.0, 5, 1).unwrap();
        assert!(r.iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn scaling_benchmark_reports_ratios() {
        let f1 = registry_lookup("F1", None).unwrap();
        let rows = scaling_benchmark(&f1, Algorithm::Sfl, &[10, 20], 0, Duration::from_millis(1)).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].ratio.is_none());
        assert!(rows[1].ratio.unwrap() > 0.0);
    }
}
