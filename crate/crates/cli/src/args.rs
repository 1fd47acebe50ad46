use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dtaopt_core::Algorithm;

#[derive(Debug, Parser)]
#[command(name = "dtaopt", version, about = "Expected-utility optimal classification for non-decomposable metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format for reports.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmArg {
    General,
    Sfl,
    Brute,
    Eum,
    Fixed,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::General => Algorithm::General,
            AlgorithmArg::Sfl => Algorithm::Sfl,
            AlgorithmArg::Brute => Algorithm::Brute,
            AlgorithmArg::Eum => Algorithm::Eum,
            AlgorithmArg::Fixed => Algorithm::Fixed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gaussian/sigmoid ranking-principle experiment with brute-force checks.
    VerifyPrp(VerifyPrpArgs),
    /// DTA vs fixed-threshold vs plug-in threshold on a train/test pair.
    Compare(CompareArgs),
    /// Wall-time scaling of the optimizers.
    Bench(BenchArgs),
    /// Fit a logistic model and write it as JSON.
    Train(TrainArgs),
    /// Predict probabilities and optimal labels for a test file.
    Predict(PredictArgs),
    /// Write a synthetic train/test corpus with a manifest.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MetricArgs {
    /// Metric name; repeat or comma-separate for several.
    #[arg(long = "metric", value_delimiter = ',')]
    pub metrics: Vec<String>,

    /// F-measure beta for names like `F_beta`.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// `key=value` manifest naming a train/test pair.
    #[arg(long, conflicts_with_all = ["train", "test"])]
    pub manifest: Option<PathBuf>,

    #[arg(long, requires = "test")]
    pub train: Option<PathBuf>,

    #[arg(long, requires = "train")]
    pub test: Option<PathBuf>,

    /// CSV label column: `last`, a zero-based index, or a header name.
    #[arg(long, default_value = "last")]
    pub label_column: String,

    /// CSV files have no header row.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyPrpArgs {
    #[command(flatten)]
    pub metric: MetricArgs,

    #[arg(long, default_value_t = 10)]
    pub n: usize,

    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Add a metric that violates the ranking principle.
    #[arg(long)]
    pub adversarial: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub metric: MetricArgs,

    /// DTA optimizer for every metric (default: sfl where eligible, else general).
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,

    #[arg(long, default_value_t = 1e-4)]
    pub lambda: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Share of training rows used to fit the plug-in model.
    #[arg(long, default_value_t = 0.5)]
    pub split_fraction: f64,

    /// T: minimum positives per class in both splits.
    #[arg(long, default_value_t = 1)]
    pub min_positives: usize,

    /// Use this plug-in threshold instead of tuning one.
    #[arg(long)]
    pub eum_delta: Option<f64>,

    /// Apply the plug-in threshold to the model fit on all training rows.
    #[arg(long)]
    pub eum_refit: bool,

    /// Also report per-class results.
    #[arg(long)]
    pub per_class: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(long, default_value = "F1")]
    pub metric: String,

    #[arg(long)]
    pub beta: Option<f64>,

    #[arg(long = "algorithm", value_enum, value_delimiter = ',', default_values_t = [AlgorithmArg::General, AlgorithmArg::Sfl])]
    pub algorithms: Vec<AlgorithmArg>,

    /// Problem sizes; each is timed on fresh uniform probabilities.
    #[arg(long = "n", value_delimiter = ',', default_values_t = [100, 200, 400])]
    pub sizes: Vec<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Minimum measuring time per size, in milliseconds.
    #[arg(long, default_value_t = 300)]
    pub min_time_ms: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    /// Training file (svmlight, or CSV by extension).
    #[arg(long)]
    pub train: PathBuf,

    /// Positive class for multiclass files.
    #[arg(long, default_value_t = 1)]
    pub class: i64,

    #[arg(long, default_value_t = 1e-4)]
    pub lambda: f64,

    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,

    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    #[arg(long, default_value = "last")]
    pub label_column: String,

    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,

    #[arg(long)]
    pub test: PathBuf,

    #[arg(long, default_value = "F1")]
    pub metric: String,

    #[arg(long)]
    pub beta: Option<f64>,

    /// Default: sfl where eligible, else general.
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmArg>,

    /// Labelled validation file for `--algorithm eum`.
    #[arg(long)]
    pub validation: Option<PathBuf>,

    /// Threshold for `fixed` (default 0.5) or a forced one for `eum`.
    #[arg(long)]
    pub delta: Option<f64>,

    /// Positive class when scoring multiclass labels.
    #[arg(long, default_value_t = 1)]
    pub class: i64,

    #[arg(long, default_value = "last")]
    pub label_column: String,

    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    /// Directory receiving `<name>.train.svm`, `<name>.test.svm` and `<name>.manifest`.
    #[arg(long)]
    pub dir: PathBuf,

    #[arg(long, default_value = "synthetic")]
    pub name: String,

    #[arg(long, default_value_t = 2000)]
    pub n_train: usize,

    #[arg(long, default_value_t = 500)]
    pub n_test: usize,

    #[arg(long, default_value_t = 5)]
    pub dim: usize,

    #[arg(long, default_value_t = 0.1)]
    pub positive_rate: f64,

    #[arg(long, default_value_t = 2024)]
    pub generator_seed: u64,

    /// Replicate index; each gives an independent sample from the same generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
