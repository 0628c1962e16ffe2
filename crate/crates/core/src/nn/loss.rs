//! Losses and the metrics they report: squared error reported as RMSE,
//! absolute error as MAE, and softmax cross-entropy reported as
//! accuracy.

use ndarray::Array2;

use super::instance::Target;
use crate::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossSpec {
    MeanSquaredError,
    MeanAbsoluteError,
    CrossEntropy,
}

impl LossSpec {
    pub fn metric_name(&self) -> &'static str {
        match self {
            LossSpec::MeanSquaredError => "rmse",
            LossSpec::MeanAbsoluteError => "mae",
            LossSpec::CrossEntropy => "accuracy",
        }
    }

    pub fn higher_is_better(&self) -> bool {
        matches!(self, LossSpec::CrossEntropy)
    }

    /// Loss value and gradient with respect to the model output.
    /// Masked rows contribute nothing to either.
    pub fn loss_and_grad(
        &self,
        output: &Array2<f64>,
        target: &Target,
        mask: Option<&[bool]>,
    ) -> Result<(f64, Array2<f64>)> {
        let (dense, count) = dense_target(output, target, mask)?;
        match self {
            LossSpec::MeanSquaredError | LossSpec::MeanAbsoluteError => {
                let mut grad = Array2::zeros(output.dim());
                let mut loss = 0.0;
                for ((i, j), &t) in dense.indexed_iter() {
                    if mask.map(|m| !m[i]).unwrap_or(false) {
                        continue;
                    }
                    let diff = output[[i, j]] - t;
                    match self {
                        LossSpec::MeanSquaredError => {
                            loss += diff * diff;
                            grad[[i, j]] = 2.0 * diff / count as f64;
                        }
                        _ => {
                            loss += diff.abs();
                            grad[[i, j]] = diff.signum() / count as f64;
                        }
                    }
                }
                Ok((loss / count as f64, grad))
            }
            LossSpec::CrossEntropy => {
                let class = match target {
                    Target::Class(c) => *c,
                    _ => {
                        return Err(CoreError::InvalidConfig(
                            "cross-entropy needs a class target".into(),
                        ))
                    }
                };
                if output.nrows() != 1 {
                    return Err(CoreError::ShapeMismatch(
                        "cross-entropy expects one logit row per graph".into(),
                    ));
                }
                let c = output.ncols();
                if class >= c {
                    return Err(CoreError::InvalidConfig(format!(
                        "class {class} out of range for {c} logits"
                    )));
                }
                let probs = softmax_row(output);
                let loss = -(probs[[0, class]].max(1e-300)).ln();
                let mut grad = probs;
                grad[[0, class]] -= 1.0;
                Ok((loss, grad))
            }
        }
    }

    /// Per-instance contribution to an epoch metric.
    pub fn metric_update(&self, acc: &mut MetricAccum, output: &Array2<f64>, target: &Target, mask: Option<&[bool]>) -> Result<()> {
        match self {
            LossSpec::CrossEntropy => {
                let class = match target {
                    Target::Class(c) => *c,
                    _ => return Err(CoreError::InvalidConfig("cross-entropy needs a class target".into())),
                };
                let pred = output
                    .row(0)
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                acc.correct += (pred == class) as usize;
                acc.count += 1;
            }
            _ => {
                let (dense, count) = dense_target(output, target, mask)?;
                for ((i, j), &t) in dense.indexed_iter() {
                    if mask.map(|m| !m[i]).unwrap_or(false) {
                        continue;
                    }
                    let diff = output[[i, j]] - t;
                    acc.sse += diff * diff;
                    acc.sae += diff.abs();
                }
                acc.count += count;
            }
        }
        Ok(())
    }

    pub fn metric_value(&self, acc: &MetricAccum) -> f64 {
        if acc.count == 0 {
            return f64::NAN;
        }
        match self {
            LossSpec::MeanSquaredError => (acc.sse / acc.count as f64).sqrt(),
            LossSpec::MeanAbsoluteError => acc.sae / acc.count as f64,
            LossSpec::CrossEntropy => acc.correct as f64 / acc.count as f64,
        }
    }
}

/// Running sums for an epoch-level metric.
#[derive(Debug, Default, Clone)]
pub struct MetricAccum {
    pub sse: f64,
    pub sae: f64,
    pub correct: usize,
    pub count: usize,
}

fn dense_target(
    output: &Array2<f64>,
    target: &Target,
    mask: Option<&[bool]>,
) -> Result<(Array2<f64>, usize)> {
    match target {
        Target::Nodes(t) => {
            if t.dim() != output.dim() {
                return Err(CoreError::ShapeMismatch(format!(
                    "target shape {:?} does not match output {:?}",
                    t.dim(),
                    output.dim()
                )));
            }
            let rows = match mask {
                Some(m) => m.iter().filter(|&&b| b).count(),
                None => t.nrows(),
            };
            Ok((t.clone(), rows * t.ncols()))
        }
        Target::Scalar(v) => {
            if output.dim() != (1, 1) {
                return Err(CoreError::ShapeMismatch(format!(
                    "scalar target needs a 1x1 output, got {:?}",
                    output.dim()
                )));
            }
            Ok((Array2::from_elem((1, 1), *v), 1))
        }
        Target::Class(_) => Err(CoreError::InvalidConfig(
            "class targets require the cross-entropy loss".into(),
        )),
    }
}

fn softmax_row(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    let max = out.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    out.mapv_inplace(|x| (x - max).exp());
    let sum: f64 = out.iter().sum();
    out.mapv_inplace(|x| x / sum);
    out
}
