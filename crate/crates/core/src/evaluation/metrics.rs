use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// tp / (tp + fp), or 0 when nothing was predicted positive.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// tp / (tp + fn), or 0 when there are no positives.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn confusion(y_true: &[usize], y_pred: &[usize], positive: usize) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Shape(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == positive, p == positive) {
            (true, true) => cm.tp += 1,
            (false, true) => cm.fp += 1,
            (true, false) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Harmonic mean of precision and recall; 0 whenever either is undefined
/// or both are zero.
pub fn f1_score(cm: &ConfusionMatrix) -> f64 {
    let p = cm.precision();
    let r = cm.recall();
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum F1Average {
    /// f1 of the success class (label 1).
    #[default]
    Binary,
    /// Support-weighted mean of the per-class f1 scores over labels {0, 1}.
    Weighted,
}

pub const POSITIVE_LABEL: usize = 1;

pub fn f1(y_true: &[usize], y_pred: &[usize], average: F1Average) -> Result<f64> {
    match average {
        F1Average::Binary => Ok(f1_score(&confusion(y_true, y_pred, POSITIVE_LABEL)?)),
        F1Average::Weighted => {
            if y_true.is_empty() {
                return Ok(0.0);
            }
            let mut total = 0.0;
            for label in [0, 1] {
                let support = y_true.iter().filter(|&&t| t == label).count();
                total += support as f64 * f1_score(&confusion(y_true, y_pred, label)?);
            }
            Ok(total / y_true.len() as f64)
        }
    }
}
