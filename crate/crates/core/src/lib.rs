//! Decision-theoretic optimal predictions for non-decomposable binary
//! classification metrics.
//!
//! Given per-instance probabilities `eta_i = P(y_i = 1 | x_i)`, the
//! optimizers return the label vector that maximizes (or minimizes) the
//! expected value of a metric computed on the whole test set. Metrics are
//! expressed through `phi(u, v, p)` with `u` the true-positive rate of the
//! sample, `v` the predicted-positive rate and `p` the positive rate.
//!
//! ```
//! use dtaopt_core::{optimize_general, registry_lookup};
//!
//! let f1 = registry_lookup("F1", None).unwrap();
//! let pred = optimize_general(&f1, &[0.9, 0.1, 0.8]).unwrap();
//! assert_eq!(pred.s_star, vec![1, 0, 1]);
//! ```

pub mod data;
pub mod error;
pub mod estimator;
pub mod eum;
pub mod experiment;
pub mod metric;
pub mod optimizer;
pub mod poisson_binomial;
pub mod rng;

pub use data::{
    make_tasks, macro_average, parse_csv, parse_svmlight, split, BinaryDataset, BinaryTask, CsvOptions, Dataset,
    DatasetManifest, DenseMatrix, Features, FileFormat, LabelColumn, SparseMatrix, TaskSet,
};
pub use error::{Error, Result};
pub use estimator::{predict_proba, train_logistic, LinearModel, LogisticObjective, TrainOptions};
pub use eum::{classify_threshold, select_threshold, PluginThreshold, DEFAULT_THRESHOLD};
pub use experiment::{Algorithm, ComparisonRow, SCHEMA_VERSION};
pub use metric::{
    confusion_triple, registry_lookup, registry_metrics, ConfusionTriple, DegenerateRules, MetricKind, MetricSpec,
    Orientation,
};
pub use optimizer::{
    brute_force, expected_utility_arbitrary, expected_utility_topk, optimize_general, optimize_sfl, verify_prp,
    Prediction, PrpCheck, SortedEtas,
};
pub use poisson_binomial::{coefficients, CoefficientTable};
pub use rng::SplitMix64;
