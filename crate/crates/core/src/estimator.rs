//! L2-regularized logistic regression for estimating `P(y = 1 | x)`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::DenseMatrix;
use crate::error::{check_binary, Error, Result};

/// Lower and upper clamp applied to predicted probabilities.
pub const PROBA_CLAMP: f64 = 1e-12;

const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub lambda: f64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            max_iters: 2000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub final_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub d: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub lambda: f64,
    /// Absent for models assembled by hand.
    pub training_meta: Option<TrainingMeta>,
}

pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Regularized mean log-loss over a fixed training set.
///
/// Parameters are packed as `[w_1, ..., w_d, bias]`; the bias is not
/// regularized.
#[derive(Debug, Clone, Copy)]
pub struct LogisticObjective<'a> {
    x: &'a DenseMatrix,
    y: &'a [u8],
    lambda: f64,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(x: &'a DenseMatrix, y: &'a [u8], lambda: f64) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.rows(),
                found: y.len(),
            });
        }
        if x.rows() == 0 {
            return Err(Error::EmptyInput);
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be >= 0 (found {lambda})")));
        }
        check_binary(y)?;
        if x.data().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(Self { x, y, lambda })
    }

    pub fn dim(&self) -> usize {
        self.x.cols() + 1
    }

    fn logit(&self, params: &[f64], row: usize) -> f64 {
        let d = self.x.cols();
        self.x
            .row(row)
            .iter()
            .zip(&params[..d])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            + params[d]
    }

    pub fn loss(&self, params: &[f64]) -> f64 {
        let d = self.x.cols();
        let n = self.x.rows() as f64;
        let data: f64 = (0..self.x.rows())
            .map(|i| {
                let t = self.logit(params, i);
                softplus(t) - f64::from(self.y[i]) * t
            })
            .sum();
        let reg: f64 = params[..d].iter().map(|w| w * w).sum();
        data / n + 0.5 * self.lambda * reg
    }

    pub fn gradient(&self, params: &[f64]) -> Vec<f64> {
        let d = self.x.cols();
        let n = self.x.rows() as f64;
        let mut grad = vec![0.0; d + 1];
        for i in 0..self.x.rows() {
            let r = sigmoid(self.logit(params, i)) - f64::from(self.y[i]);
            for (g, xv) in grad[..d].iter_mut().zip(self.x.row(i)) {
                *g += r * xv;
            }
            grad[d] += r;
        }
        for g in &mut grad {
            *g /= n;
        }
        for (g, w) in grad[..d].iter_mut().zip(&params[..d]) {
            *g += self.lambda * w;
        }
        grad
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Full-batch gradient descent from zero with Armijo backtracking.
pub fn train_logistic(x: &DenseMatrix, y: &[u8], options: &TrainOptions) -> Result<LinearModel> {
    let objective = LogisticObjective::new(x, y, options.lambda)?;
    let d = x.cols();
    let mut params = vec![0.0; d + 1];
    let mut loss = objective.loss(&params);
    let mut grad = objective.gradient(&params);
    let mut grad_norm = norm(&grad);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut candidate = vec![0.0; d + 1];

    while iterations < options.max_iters && grad_norm > options.tol {
        let g2 = grad_norm * grad_norm;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            for ((c, p), g) in candidate.iter_mut().zip(&params).zip(&grad) {
                *c = p - step * g;
            }
            let trial = objective.loss(&candidate);
            if trial <= loss - ARMIJO_C * step * g2 {
                loss = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        std::mem::swap(&mut params, &mut candidate);
        grad = objective.gradient(&params);
        grad_norm = norm(&grad);
        iterations += 1;
        step = (step * 2.0).min(1e6);
    }

    let bias = params[d];
    params.truncate(d);
    Ok(LinearModel {
        d,
        weights: params,
        bias,
        lambda: options.lambda,
        training_meta: Some(TrainingMeta {
            iterations,
            final_grad_norm: grad_norm,
            final_loss: loss,
        }),
    })
}

impl LinearModel {
    pub fn from_parts(weights: Vec<f64>, bias: f64, lambda: f64) -> Self {
        Self {
            d: weights.len(),
            weights,
            bias,
            lambda,
            training_meta: None,
        }
    }

    pub fn predict_one(&self, x: &[f64]) -> f64 {
        let t: f64 = x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias;
        sigmoid(t).clamp(PROBA_CLAMP, 1.0 - PROBA_CLAMP)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let model: Self = serde_json::from_reader(std::io::BufReader::new(file))?;
        if model.weights.len() != model.d {
            return Err(Error::DimensionMismatch {
                expected: model.d,
                found: model.weights.len(),
            });
        }
        if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(model)
    }
}

/// `sigmoid(x w + bias)`, clamped to `[1e-12, 1 - 1e-12]`.
pub fn predict_proba(model: &LinearModel, x: &DenseMatrix) -> Result<Vec<f64>> {
    if x.cols() != model.d {
        return Err(Error::DimensionMismatch {
            expected: model.d,
            found: x.cols(),
        });
    }
    Ok((0..x.rows()).map(|i| model.predict_one(x.row(i))).collect())
}
