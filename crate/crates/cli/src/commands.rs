use std::fs::File;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use dtaopt_core::data::{align_dims, read_dataset, write_svmlight, Dataset, DatasetManifest};
use dtaopt_core::experiment::{
    aggregate, check_algorithm, compare_task, default_compare_plans, dta_predict, prp_trial, prp_trial_etas,
    scaling_benchmark, summarize_prp, BenchRow, CompareConfig, MetricPlan, PrpConfig, PrpReport, SigmoidGenerator,
    SyntheticCorpusConfig, TaskResult,
};
use dtaopt_core::metric::adversarial;
use dtaopt_core::{
    classify_threshold, make_tasks, predict_proba, registry_lookup, select_threshold, train_logistic, Algorithm,
    ComparisonRow, CsvOptions, FileFormat, LabelColumn, LinearModel, MetricSpec, TrainOptions, DEFAULT_THRESHOLD,
};

use crate::args::{BenchArgs, CompareArgs, GenerateArgs, InputArgs, PredictArgs, TrainArgs, VerifyPrpArgs};
use crate::output::{join, Sink};

fn resolve_metrics(names: &[String], beta: Option<f64>) -> Result<Vec<MetricSpec>> {
    names
        .iter()
        .map(|n| registry_lookup(n, beta).with_context(|| format!("resolving metric '{n}'")))
        .collect()
}

fn csv_options(label_column: &str, no_header: bool) -> CsvOptions {
    CsvOptions {
        has_header: !no_header,
        label_column: LabelColumn::parse(label_column),
    }
}

fn read_file(path: &Path, csv: &CsvOptions) -> Result<Dataset> {
    read_dataset(path, FileFormat::from_path(path), csv).with_context(|| format!("reading {}", path.display()))
}

fn read_pair(input: &InputArgs) -> Result<(Dataset, Dataset)> {
    if let Some(m) = &input.manifest {
        let manifest = DatasetManifest::load(m).with_context(|| format!("reading manifest {}", m.display()))?;
        let (mut train, mut test) = manifest.read()?;
        train.name.clone_from(&manifest.name);
        test.name = manifest.name;
        return Ok((train, test));
    }
    let (Some(train), Some(test)) = (&input.train, &input.test) else {
        bail!("give either --manifest or both --train and --test");
    };
    let csv = csv_options(&input.label_column, input.no_header);
    Ok(align_dims(read_file(train, &csv)?, read_file(test, &csv)?)?)
}

#[derive(Serialize)]
struct PrpCsvRow<'a> {
    trial: usize,
    metric: &'a str,
    prp_holds: bool,
    general_matches: bool,
    sfl_matches: Option<bool>,
    k_star: usize,
    optimal_utility: f64,
    sorted_etas: String,
    sorted_labels: String,
    witness: Option<String>,
}

pub fn verify_prp(args: &VerifyPrpArgs, sink: &Sink) -> Result<()> {
    let names = if args.metric.metrics.is_empty() {
        ["AM", "F1", "Jaccard", "G-TPPR"].map(String::from).to_vec()
    } else {
        args.metric.metrics.clone()
    };
    let mut metrics = resolve_metrics(&names, args.metric.beta)?;
    if args.adversarial {
        metrics.push(adversarial::inverted_ranking());
    }
    let config = PrpConfig {
        n: args.n,
        dim: args.dim,
        trials: args.trials,
        seed: args.seed,
    };
    if config.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if config.n == 0 {
        bail!("--n must be at least 1");
    }
    for m in &metrics {
        check_algorithm(m, Algorithm::Brute, config.n)?;
    }
    let draws = prp_trial_etas(&config);
    let per_trial: Vec<Vec<_>> = draws
        .par_iter()
        .enumerate()
        .map(|(t, etas)| metrics.iter().map(|m| prp_trial(m, t, etas)).collect::<dtaopt_core::Result<Vec<_>>>())
        .collect::<dtaopt_core::Result<_>>()?;
    let trials: Vec<_> = per_trial.into_iter().flatten().collect();
    let report = PrpReport {
        summary: summarize_prp(&metrics, &trials),
        config,
        trials,
    };
    let rows: Vec<PrpCsvRow> = report
        .trials
        .iter()
        .map(|t| PrpCsvRow {
            trial: t.trial,
            metric: &t.metric,
            prp_holds: t.prp_holds,
            general_matches: t.general_matches,
            sfl_matches: t.sfl_matches,
            k_star: t.sorted_labels.iter().filter(|&&l| l == 1).count(),
            optimal_utility: t.optimal_utility,
            sorted_etas: join(&t.sorted_etas),
            sorted_labels: join(&t.sorted_labels),
            witness: t.witness.as_deref().map(join),
        })
        .collect();
    sink.emit("verify-prp", args, &report, &rows)
}

#[derive(Serialize)]
struct CompareResult<'a> {
    dataset: &'a str,
    classes: Vec<i64>,
    rows: &'a [ComparisonRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    per_class: Option<&'a [TaskResult]>,
}

pub fn compare(args: &CompareArgs, sink: &Sink) -> Result<()> {
    let (train, test) = read_pair(&args.input)?;
    let plans = if args.metric.metrics.is_empty() && args.algorithm.is_none() {
        default_compare_plans()
    } else {
        let names = if args.metric.metrics.is_empty() {
            ["F1", "Jaccard", "AM", "G-TPPR"].map(String::from).to_vec()
        } else {
            args.metric.metrics.clone()
        };
        resolve_metrics(&names, args.metric.beta)?
            .into_iter()
            .map(|m| match args.algorithm {
                Some(a) => Ok(MetricPlan::new(m, a.into())?),
                None => Ok(MetricPlan::auto(m)),
            })
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(d) = args.eum_delta {
        if !(0.0..=1.0).contains(&d) {
            bail!("--eum-delta must be in [0, 1] (found {d})");
        }
    }
    let config = CompareConfig {
        train: TrainOptions {
            lambda: args.lambda,
            ..Default::default()
        },
        split_fraction: args.split_fraction,
        seed: args.seed,
        forced_delta: args.eum_delta,
        eum_refit: args.eum_refit,
    };
    let tasks = make_tasks(&train, &test, args.min_positives)?;
    let mut results: Vec<TaskResult> = tasks
        .tasks
        .par_iter()
        .map(|task| compare_task(task, &plans, &config))
        .collect::<dtaopt_core::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    results.sort_by(|a, b| (a.class_id, &a.metric).cmp(&(b.class_id, &b.metric)));
    let rows = aggregate(&tasks, &plans, &results)?;
    let result = CompareResult {
        dataset: &tasks.name,
        classes: tasks.tasks.iter().map(|t| t.class_id).collect(),
        rows: &rows,
        per_class: args.per_class.then_some(results.as_slice()),
    };
    sink.emit("compare", args, &result, &rows)
}

pub fn bench(args: &BenchArgs, sink: &Sink) -> Result<()> {
    let m = registry_lookup(&args.metric, args.beta)?;
    let mut rows: Vec<BenchRow> = Vec::new();
    for &a in &args.algorithms {
        let a = Algorithm::from(a);
        if !a.is_dta() {
            bail!("bench times the expected-utility optimizers; '{a}' is a thresholding rule");
        }
        rows.extend(scaling_benchmark(&m, a, &args.sizes, args.seed, Duration::from_millis(args.min_time_ms))?);
    }
    sink.emit("bench", args, &serde_json::json!({ "rows": rows }), &rows)
}

pub fn train(args: &TrainArgs, sink: &Sink) -> Result<()> {
    let data = read_file(&args.train, &csv_options(&args.label_column, args.no_header))?;
    let y = data.binary_labels(args.class);
    let options = TrainOptions {
        lambda: args.lambda,
        max_iters: args.max_iters,
        tol: args.tol,
    };
    let model = train_logistic(&data.features.to_dense(), &y, &options)?;
    sink.raw_json(&model)
}

#[derive(Serialize)]
struct PredictResult<'a> {
    metric: &'a str,
    algorithm: Algorithm,
    n: usize,
    k_star: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_utility: Option<f64>,
    etas: &'a [f64],
    s_star: &'a [u8],
}

#[derive(Serialize)]
struct PredictRow {
    index: usize,
    eta: f64,
    label: u8,
}

fn model_inputs(model: &LinearModel, data: Dataset) -> Result<dtaopt_core::DenseMatrix> {
    if data.dim() > model.d {
        return Err(dtaopt_core::Error::DimensionMismatch {
            expected: model.d,
            found: data.dim(),
        }
        .into());
    }
    Ok(data.with_dim(model.d)?.features.to_dense())
}

pub fn predict(args: &PredictArgs, sink: &Sink) -> Result<()> {
    let model = LinearModel::load(&args.model).with_context(|| format!("loading model {}", args.model.display()))?;
    let m = registry_lookup(&args.metric, args.beta)?;
    let csv = csv_options(&args.label_column, args.no_header);
    let test = read_file(&args.test, &csv)?;
    let etas = predict_proba(&model, &model_inputs(&model, test)?)?;
    let algorithm = args.algorithm.map_or_else(|| Algorithm::auto_for(&m), Algorithm::from);
    check_algorithm(&m, algorithm, etas.len())?;

    let (labels, delta, expected_utility) = match algorithm {
        Algorithm::General | Algorithm::Sfl | Algorithm::Brute => {
            let pred = dta_predict(&m, algorithm, &etas)?;
            (pred.s_star, None, Some(pred.utility))
        }
        Algorithm::Fixed => {
            let d = args.delta.unwrap_or(DEFAULT_THRESHOLD);
            (classify_threshold(&etas, d), Some(d), None)
        }
        Algorithm::Eum => {
            let d = match (args.delta, &args.validation) {
                (Some(d), _) => d,
                (None, Some(path)) => {
                    let val = read_file(path, &csv)?;
                    let y = val.binary_labels(args.class);
                    let eta_val = predict_proba(&model, &model_inputs(&model, val)?)?;
                    select_threshold(&m, &eta_val, &y)?.delta
                }
                (None, None) => bail!("--algorithm eum needs --validation or --delta"),
            };
            (classify_threshold(&etas, d), Some(d), None)
        }
    };
    let result = PredictResult {
        metric: &m.name,
        algorithm,
        n: etas.len(),
        k_star: labels.iter().filter(|&&l| l == 1).count(),
        delta,
        expected_utility,
        etas: &etas,
        s_star: &labels,
    };
    let rows: Vec<PredictRow> = etas
        .iter()
        .zip(&labels)
        .enumerate()
        .map(|(index, (&eta, &label))| PredictRow { index, eta, label })
        .collect();
    sink.emit("predict", args, &result, &rows)
}

#[derive(Serialize)]
struct GenerateResult {
    manifest: String,
    train: String,
    test: String,
    generator: SigmoidGenerator,
    train_positives: usize,
    test_positives: usize,
}

pub fn generate(args: &GenerateArgs, sink: &Sink) -> Result<()> {
    let corpus = SyntheticCorpusConfig {
        name: args.name.clone(),
        dim: args.dim,
        positive_rate: args.positive_rate,
        generator_seed: args.generator_seed,
        n_train: args.n_train,
        n_test: args.n_test,
    };
    let (train, test) = corpus.draw(args.seed)?;
    std::fs::create_dir_all(&args.dir).with_context(|| format!("creating {}", args.dir.display()))?;
    let train_name = format!("{}.train.svm", args.name);
    let test_name = format!("{}.test.svm", args.name);
    let manifest_path = args.dir.join(format!("{}.manifest", args.name));
    write_svmlight(&train, File::create(args.dir.join(&train_name))?)?;
    write_svmlight(&test, File::create(args.dir.join(&test_name))?)?;
    std::fs::write(
        &manifest_path,
        format!(
            "# logistic generator: dim={} positive_rate={} generator_seed={} replicate={}\nname={}\nformat=svmlight\ntrain={train_name}\ntest={test_name}\n",
            args.dim, args.positive_rate, args.generator_seed, args.seed, args.name
        ),
    )?;
    let positives = |d: &Dataset| d.labels.iter().filter(|&&l| l == 1).count();
    let result = GenerateResult {
        manifest: manifest_path.display().to_string(),
        train: args.dir.join(&train_name).display().to_string(),
        test: args.dir.join(&test_name).display().to_string(),
        generator: corpus.generator()?,
        train_positives: positives(&train),
        test_positives: positives(&test),
    };
    sink.emit("generate", args, &result, std::slice::from_ref(&result))
}
