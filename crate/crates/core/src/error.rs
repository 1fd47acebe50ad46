use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("entry {index} is not binary (found {value})")]
    NonBinary { index: usize, value: f64 },

    #[error("probability at index {index} is outside [0, 1] (found {value})")]
    ProbabilityOutOfRange { index: usize, value: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("cutoff {k} out of range for n = {n}")]
    CutoffOutOfRange { k: usize, n: usize },

    #[error("n too large for brute force: n = {n}, maximum is {max}")]
    TooLargeForBruteForce { n: usize, max: usize },

    #[error("unknown metric '{0}'")]
    UnknownMetric(String),

    #[error("beta must be positive and finite (found {0})")]
    InvalidBeta(f64),

    #[error("metric '{0}' is not in the quadratic-time fractional-linear family")]
    NotSfl(String),

    #[error("fractional-linear denominator is zero at cutoff k = {k}")]
    DenominatorZero { k: usize },

    #[error("fractional-linear index range too large ({0} slots)")]
    IndexRangeTooLarge(i128),

    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no records")]
    NoRecords,

    #[error("no class survives the minimum-positives filter (T = {0})")]
    NoClassSurvives(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NonBinary { .. } => "non_binary",
            Error::ProbabilityOutOfRange { .. } => "probability_out_of_range",
            Error::EmptyInput => "empty_input",
            Error::CutoffOutOfRange { .. } => "cutoff_out_of_range",
            Error::TooLargeForBruteForce { .. } => "too_large_for_brute_force",
            Error::UnknownMetric(_) => "unknown_metric",
            Error::InvalidBeta(_) => "invalid_beta",
            Error::NotSfl(_) => "not_sfl",
            Error::DenominatorZero { .. } => "denominator_zero",
            Error::IndexRangeTooLarge(_) => "index_range_too_large",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Parse { .. } => "parse",
            Error::NoRecords => "no_records",
            Error::NoClassSurvives(_) => "no_class_survives",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn check_binary(values: &[u8]) -> Result<()> {
    match values.iter().position(|&v| v > 1) {
        Some(index) => Err(Error::NonBinary {
            index,
            value: f64::from(values[index]),
        }),
        None => Ok(()),
    }
}

pub(crate) fn check_probabilities(etas: &[f64]) -> Result<()> {
    match etas.iter().position(|e| !(0.0..=1.0).contains(e)) {
        Some(index) => Err(Error::ProbabilityOutOfRange {
            index,
            value: etas[index],
        }),
        None => Ok(()),
    }
}
