//! Dataset ingestion, one-vs-rest task construction and seeded splits.
//!
//! Supported inputs are svmlight/libsvm text (`label idx:val ...`, 1-based
//! ascending indices), numeric CSV, and `key=value` manifests naming a
//! train/test pair.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Sparse matrix as `(row, col, value)` triplets in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Features {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

impl Features {
    pub fn rows(&self) -> usize {
        match self {
            Features::Dense(m) => m.rows(),
            Features::Sparse(m) => m.rows,
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Features::Dense(m) => m.cols(),
            Features::Sparse(m) => m.cols,
        }
    }

    pub fn nonzeros(&self) -> usize {
        match self {
            Features::Dense(m) => m.data().iter().filter(|v| **v != 0.0).count(),
            Features::Sparse(m) => m.triplets.iter().filter(|t| t.2 != 0.0).count(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Features::Dense(m) => m.clone(),
            Features::Sparse(m) => {
                let mut out = DenseMatrix::zeros(m.rows, m.cols);
                for &(r, c, v) in &m.triplets {
                    out.data[r * m.cols + c] = v;
                }
                out
            }
        }
    }

    fn select_rows(&self, idx: &[usize]) -> Self {
        match self {
            Features::Dense(m) => Features::Dense(m.select_rows(idx)),
            Features::Sparse(m) => {
                let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m.rows];
                for &(r, c, v) in &m.triplets {
                    by_row[r].push((c, v));
                }
                let triplets = idx
                    .iter()
                    .enumerate()
                    .flat_map(|(new, &old)| by_row[old].iter().map(move |&(c, v)| (new, c, v)))
                    .collect();
                Features::Sparse(SparseMatrix {
                    rows: idx.len(),
                    cols: m.cols,
                    triplets,
                })
            }
        }
    }

    fn with_cols(self, cols: usize) -> Self {
        match self {
            Features::Sparse(mut m) => {
                m.cols = cols;
                Features::Sparse(m)
            }
            Features::Dense(m) => {
                let mut out = DenseMatrix::zeros(m.rows, cols);
                for r in 0..m.rows {
                    out.data[r * cols..r * cols + m.cols].copy_from_slice(m.row(r));
                }
                Features::Dense(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub features: Features,
    /// Class ids (nonnegative) or binary labels.
    pub labels: Vec<i64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, features: Features, labels: Vec<i64>) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: features.rows(),
                found: labels.len(),
            });
        }
        if let Some(bad) = labels.iter().find(|&&l| l < 0) {
            return Err(Error::InvalidParameter(format!("negative class id {bad}")));
        }
        Ok(Self {
            name: name.into(),
            features,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    /// Widens the feature space to `cols` columns (new columns are zero).
    pub fn with_dim(mut self, cols: usize) -> Result<Self> {
        if cols < self.dim() {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: self.dim(),
            });
        }
        self.features = self.features.with_cols(cols);
        Ok(self)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            name: self.name.clone(),
            features: self.features.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// One-vs-rest labels for `class_id`.
    pub fn binary_labels(&self, class_id: i64) -> Vec<u8> {
        self.labels.iter().map(|&l| u8::from(l == class_id)).collect()
    }
}

/// Maps `{-1, +1}` label sets to `{0, 1}`; rejects other negative ids.
fn normalize_labels(labels: &mut [i64]) -> Result<()> {
    if !labels.iter().any(|&l| l < 0) {
        return Ok(());
    }
    if labels.iter().all(|&l| l == -1 || l == 1) {
        for l in labels.iter_mut() {
            *l = i64::from(*l == 1);
        }
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "negative labels are only accepted as a {-1, +1} binary encoding".into(),
        ))
    }
}

fn parse_label(token: &str, line: usize) -> Result<i64> {
    let value: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid label '{token}'"),
    })?;
    if value.fract() != 0.0 || !value.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("label '{token}' is not an integer"),
        });
    }
    Ok(value as i64)
}

/// Parses svmlight/libsvm text. `#` starts a comment; `qid:` tokens are ignored.
pub fn parse_svmlight<R: Read>(reader: R, name: impl Into<String>) -> Result<Dataset> {
    let mut labels = Vec::new();
    let mut triplets = Vec::new();
    let mut cols = 0usize;
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = parse_label(tokens.next().expect("non-empty line"), lineno)?;
        let row = labels.len();
        let mut last: Option<usize> = None;
        for tok in tokens {
            if tok.starts_with("qid:") {
                continue;
            }
            let (idx, val) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("expected idx:val, found '{tok}'"),
            })?;
            let idx: usize = idx.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid feature index '{idx}'"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    message: "feature indices are 1-based".into(),
                });
            }
            if last.is_some_and(|l| idx <= l) {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("feature index {idx} is not ascending"),
                });
            }
            let val: f64 = val.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid feature value '{val}'"),
            })?;
            if !val.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("non-finite feature value '{val}'"),
                });
            }
            last = Some(idx);
            cols = cols.max(idx);
            triplets.push((row, idx - 1, val));
        }
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(Error::NoRecords);
    }
    normalize_labels(&mut labels)?;
    let features = Features::Sparse(SparseMatrix {
        rows: labels.len(),
        cols,
        triplets,
    });
    Dataset::new(name, features, labels)
}

pub fn read_svmlight(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let name = dataset_name(path);
    parse_svmlight(std::fs::File::open(path)?, name)
}

/// Writes svmlight text, one record per row, nonzero entries only.
pub fn write_svmlight<W: Write>(data: &Dataset, mut out: W) -> Result<()> {
    let dense;
    let rows: Vec<Vec<(usize, f64)>> = match &data.features {
        Features::Sparse(m) => {
            let mut rows = vec![Vec::new(); m.rows];
            for &(r, c, v) in &m.triplets {
                rows[r].push((c, v));
            }
            rows
        }
        Features::Dense(m) => {
            dense = m;
            (0..dense.rows())
                .map(|r| {
                    dense
                        .row(r)
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0.0)
                        .map(|(c, v)| (c, *v))
                        .collect()
                })
                .collect()
        }
    };
    for (label, row) in data.labels.iter().zip(rows) {
        write!(out, "{label}")?;
        for (c, v) in row {
            if v != 0.0 {
                write!(out, " {}:{}", c + 1, v)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelColumn {
    Name(String),
    /// Zero-based column index.
    Index(usize),
    Last,
}

impl LabelColumn {
    /// `last`, a zero-based index, or a header name.
    pub fn parse(spec: &str) -> Self {
        if spec.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = spec.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(spec.to_string())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub has_header: bool,
    pub label_column: LabelColumn,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            has_header: true,
            label_column: LabelColumn::Last,
        }
    }
}

/// Parses numeric CSV into a dense dataset.
pub fn parse_csv<R: Read>(reader: R, name: impl Into<String>, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header_index = match (&options.label_column, options.has_header) {
        (LabelColumn::Name(col), true) => {
            let headers = rdr.headers().map_err(csv_error)?;
            Some(headers.iter().position(|h| h == col).ok_or_else(|| {
                Error::InvalidParameter(format!("label column '{col}' not found in header"))
            })?)
        }
        (LabelColumn::Name(col), false) => {
            return Err(Error::InvalidParameter(format!(
                "label column '{col}' given by name but the file has no header"
            )))
        }
        _ => None,
    };

    let mut width: Option<usize> = None;
    let mut label_idx = 0usize;
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        match width {
            None => {
                width = Some(record.len());
                label_idx = match &options.label_column {
                    LabelColumn::Last => record.len() - 1,
                    LabelColumn::Index(i) => *i,
                    LabelColumn::Name(_) => header_index.expect("resolved above"),
                };
                if label_idx >= record.len() {
                    return Err(Error::InvalidParameter(format!(
                        "label column {label_idx} out of range for {} columns",
                        record.len()
                    )));
                }
            }
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("ragged row: expected {w} fields, found {}", record.len()),
                });
            }
            _ => {}
        }
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                labels.push(parse_label(cell, line)?);
            } else {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("non-numeric cell '{cell}' in column {j}"),
                })?;
                data.push(v);
            }
        }
    }
    let Some(width) = width else {
        return Err(Error::NoRecords);
    };
    normalize_labels(&mut labels)?;
    let features = Features::Dense(DenseMatrix::from_vec(labels.len(), width - 1, data)?);
    Dataset::new(name, features, labels)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn read_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    parse_csv(std::fs::File::open(path)?, dataset_name(path), options)
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    Svmlight,
    Csv,
}

impl FileFormat {
    /// `.csv` files are CSV; everything else is svmlight.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => FileFormat::Csv,
            _ => FileFormat::Svmlight,
        }
    }
}

pub fn read_dataset(path: impl AsRef<Path>, format: FileFormat, csv: &CsvOptions) -> Result<Dataset> {
    match format {
        FileFormat::Svmlight => read_svmlight(path),
        FileFormat::Csv => read_csv(path, csv),
    }
}

/// A train/test pair described by a `key=value` file.
///
/// Recognized keys: `name`, `format` (`svmlight` or `csv`), `train`,
/// `test`, `label_column`, `header` (`true`/`false`). Relative paths are
/// resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub format: FileFormat,
    pub train: PathBuf,
    pub test: PathBuf,
    pub csv: CsvOptions,
}

impl DatasetManifest {
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected key=value, found '{line}'"),
            })?;
            kv.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let get = |k: &str| {
            kv.get(k)
                .cloned()
                .ok_or_else(|| Error::InvalidParameter(format!("manifest is missing '{k}'")))
        };
        let train = base.join(get("train")?);
        let test = base.join(get("test")?);
        let format = match kv.get("format").map(|s| s.to_ascii_lowercase()) {
            None => FileFormat::from_path(&train),
            Some(f) if f == "svmlight" || f == "libsvm" => FileFormat::Svmlight,
            Some(f) if f == "csv" => FileFormat::Csv,
            Some(f) => return Err(Error::InvalidParameter(format!("unknown format '{f}'"))),
        };
        let mut csv = CsvOptions::default();
        if let Some(col) = kv.get("label_column") {
            csv.label_column = LabelColumn::parse(col);
        }
        if let Some(h) = kv.get("header") {
            csv.has_header = match h.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => true,
                "false" | "no" | "0" => false,
                other => {
                    return Err(Error::InvalidParameter(format!("invalid header flag '{other}'")))
                }
            };
        }
        Ok(Self {
            name: kv.get("name").cloned().unwrap_or_else(|| dataset_name(&train)),
            format,
            train,
            test,
            csv,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or_else(|| Path::new(".")))
    }

    /// Reads both files and aligns their feature dimension.
    pub fn read(&self) -> Result<(Dataset, Dataset)> {
        let train = read_dataset(&self.train, self.format, &self.csv)?;
        let test = read_dataset(&self.test, self.format, &self.csv)?;
        align_dims(train, test)
    }
}

/// Widens both datasets to the larger feature dimension.
pub fn align_dims(train: Dataset, test: Dataset) -> Result<(Dataset, Dataset)> {
    let d = train.dim().max(test.dim());
    Ok((train.with_dim(d)?, test.with_dim(d)?))
}

/// Seeded partition into `(first, second)` with `round(fraction * n)` rows
/// in the first part (clamped so both parts are nonempty). Rows keep their
/// original relative order.
pub fn split(data: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (a, b) = split_indices(data.len(), fraction, seed)?;
    Ok((data.select_rows(&a), data.select_rows(&b)))
}

pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "split fraction must be in (0, 1) (found {fraction})"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cannot split {n} rows")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut perm);
    let first = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut a = perm[..first].to_vec();
    let mut b = perm[first..].to_vec();
    a.sort_unstable();
    b.sort_unstable();
    Ok((a, b))
}

/// Features with binary labels for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryDataset {
    pub features: Arc<DenseMatrix>,
    pub labels: Vec<u8>,
}

impl BinaryDataset {
    pub fn positives(&self) -> usize {
        self.labels.iter().map(|&l| usize::from(l)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTask {
    pub class_id: i64,
    pub train: BinaryDataset,
    pub test: BinaryDataset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskSet {
    pub name: String,
    pub min_positives: usize,
    pub tasks: Vec<BinaryTask>,
}

fn is_binary(labels: &[i64]) -> bool {
    labels.iter().all(|&l| l == 0 || l == 1)
}

/// One-vs-rest tasks for every class with at least `min_positives`
/// positives in both splits. Datasets labelled `{0, 1}` give one task for
/// class 1.
pub fn make_tasks(train: &Dataset, test: &Dataset, min_positives: usize) -> Result<TaskSet> {
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            found: test.dim(),
        });
    }
    if min_positives == 0 {
        return Err(Error::InvalidParameter("T must be at least 1".into()));
    }
    let classes: BTreeSet<i64> = if is_binary(&train.labels) && is_binary(&test.labels) {
        BTreeSet::from([1])
    } else {
        train.labels.iter().chain(&test.labels).copied().collect()
    };
    let train_x = Arc::new(train.features.to_dense());
    let test_x = Arc::new(test.features.to_dense());
    let tasks: Vec<BinaryTask> = classes
        .into_iter()
        .map(|c| BinaryTask {
            class_id: c,
            train: BinaryDataset {
                features: Arc::clone(&train_x),
                labels: train.binary_labels(c),
            },
            test: BinaryDataset {
                features: Arc::clone(&test_x),
                labels: test.binary_labels(c),
            },
        })
        .filter(|t| t.train.positives() >= min_positives && t.test.positives() >= min_positives)
        .collect();
    if tasks.is_empty() {
        return Err(Error::NoClassSurvives(min_positives));
    }
    Ok(TaskSet {
        name: train.name.clone(),
        min_positives,
        tasks,
    })
}

pub fn macro_average(per_class: &[f64]) -> Result<f64> {
    if per_class.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(per_class.iter().sum::<f64>() / per_class.len() as f64)
}
