//! The five classifier families behind one fit/predict contract.

mod complement_nb;
mod gaussian_nb;
mod knn;
mod logistic;
mod tree;

use std::fmt;

use ndarray::{aview1, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

pub use complement_nb::{
    cnb_predict, complement_scores, fit_complement_nb, ComplementNbParams, ComplementNbState,
    MinShift,
};
pub use gaussian_nb::{
    fit_gaussian_nb, gaussian_density, gaussian_log_density, gnb_predict, GaussianNbParams,
    GaussianNbState,
};
pub use knn::{euclidean, fit_knn, knn_predict, KnnParams, KnnPrediction, KnnState};
pub use logistic::{
    fit_logistic, log_loss, log_loss_gradient, logistic_predict, sigmoid, sigmoid_predict,
    LogisticParams, LogisticState,
};
pub use tree::{
    best_split, entropy, fit_tree, gini, impurity, tree_predict, Criterion, DecisionTree,
    SplitChoice, TreeNode, TreeParams, MIN_GAIN,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Logistic,
    GaussianNb,
    ComplementNb,
    Knn,
    DecisionTree,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Logistic => "logistic",
            Family::GaussianNb => "gaussian_nb",
            Family::ComplementNb => "complement_nb",
            Family::Knn => "knn",
            Family::DecisionTree => "decision_tree",
        })
    }
}

/// Hyperparameters of one classifier; also one point of a search lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClassifierParams {
    Logistic(LogisticParams),
    GaussianNb(GaussianNbParams),
    ComplementNb(ComplementNbParams),
    Knn(KnnParams),
    DecisionTree(TreeParams),
}

impl ClassifierParams {
    pub fn default_for(family: Family) -> Self {
        match family {
            Family::Logistic => ClassifierParams::Logistic(LogisticParams::default()),
            Family::GaussianNb => ClassifierParams::GaussianNb(GaussianNbParams::default()),
            Family::ComplementNb => ClassifierParams::ComplementNb(ComplementNbParams::default()),
            Family::Knn => ClassifierParams::Knn(KnnParams::default()),
            Family::DecisionTree => ClassifierParams::DecisionTree(TreeParams::default()),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            ClassifierParams::Logistic(_) => Family::Logistic,
            ClassifierParams::GaussianNb(_) => Family::GaussianNb,
            ClassifierParams::ComplementNb(_) => Family::ComplementNb,
            ClassifierParams::Knn(_) => Family::Knn,
            ClassifierParams::DecisionTree(_) => Family::DecisionTree,
        }
    }

    /// Numeric tuple used to order lattice points. An unbounded depth sorts
    /// after every finite depth.
    pub fn lattice_key(&self) -> Vec<f64> {
        match self {
            ClassifierParams::Logistic(p) => {
                vec![p.learning_rate, p.max_iters as f64, p.l2, p.tol]
            }
            ClassifierParams::GaussianNb(p) => vec![p.var_smoothing],
            ClassifierParams::ComplementNb(p) => vec![p.alpha],
            ClassifierParams::Knn(p) => vec![p.k as f64],
            ClassifierParams::DecisionTree(p) => vec![
                match p.criterion {
                    Criterion::Entropy => 0.0,
                    Criterion::Gini => 1.0,
                },
                p.max_depth.map_or(f64::INFINITY, |d| d as f64),
                p.min_samples_split as f64,
                p.min_samples_leaf as f64,
            ],
        }
    }

    pub fn fit(&self, x: ArrayView2<f64>, y: &[usize]) -> Result<ClassifierModel> {
        Ok(match self {
            ClassifierParams::Logistic(p) => ClassifierModel::Logistic(fit_logistic(x, y, p)?),
            ClassifierParams::GaussianNb(p) => {
                ClassifierModel::GaussianNb(fit_gaussian_nb(x, y, p)?)
            }
            ClassifierParams::ComplementNb(p) => {
                let shift = MinShift::fit(x);
                let mut shifted = x.to_owned();
                for (mut row, orig) in shifted.rows_mut().into_iter().zip(x.rows()) {
                    for (v, s) in row.iter_mut().zip(shift.apply_row(orig)) {
                        *v = s;
                    }
                }
                let state = fit_complement_nb(shifted.view(), y, p)?;
                ClassifierModel::ComplementNb { shift, state }
            }
            ClassifierParams::Knn(p) => ClassifierModel::Knn(fit_knn(x, y, p)?),
            ClassifierParams::DecisionTree(p) => {
                two_classes_or_pure(y)?;
                ClassifierModel::DecisionTree(fit_tree(x, y, p)?)
            }
        })
    }
}

/// Fitted state of any family. Immutable after fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClassifierModel {
    Logistic(LogisticState),
    GaussianNb(GaussianNbState),
    ComplementNb {
        /// Non-negativity shift learned on the training rows.
        shift: MinShift,
        state: ComplementNbState,
    },
    Knn(KnnState),
    DecisionTree(DecisionTree),
}

impl ClassifierModel {
    pub fn family(&self) -> Family {
        match self {
            ClassifierModel::Logistic(_) => Family::Logistic,
            ClassifierModel::GaussianNb(_) => Family::GaussianNb,
            ClassifierModel::ComplementNb { .. } => Family::ComplementNb,
            ClassifierModel::Knn(_) => Family::Knn,
            ClassifierModel::DecisionTree(_) => Family::DecisionTree,
        }
    }

    pub fn predict_one(&self, x: ArrayView1<f64>) -> Result<usize> {
        match self {
            ClassifierModel::Logistic(s) => logistic_predict(s, x),
            ClassifierModel::GaussianNb(s) => gnb_predict(s, x).map(|(c, _)| c),
            ClassifierModel::ComplementNb { shift, state } => {
                check_width(shift.offsets.len(), x.len())?;
                let shifted = shift.apply_row(x);
                cnb_predict(state, aview1(&shifted))
            }
            ClassifierModel::Knn(s) => knn_predict(s, x).map(|p| p.class),
            ClassifierModel::DecisionTree(t) => tree_predict(t, x),
        }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        x.rows().into_iter().map(|r| self.predict_one(r)).collect()
    }

    /// JSON dump of the fitted state.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

pub(crate) fn check_fit_inputs(x: ArrayView2<f64>, y: &[usize]) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::Shape("no training rows".into()));
    }
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "{} rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("features must be finite".into()));
    }
    Ok(())
}

pub(crate) fn check_width(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Shape(format!(
            "expected {expected} features, got {got}"
        )));
    }
    Ok(())
}

/// Sorted distinct labels.
pub(crate) fn distinct_classes(y: &[usize]) -> Vec<usize> {
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    classes
}

pub(crate) fn two_classes(y: &[usize]) -> Result<[usize; 2]> {
    match distinct_classes(y).as_slice() {
        &[a, b] => Ok([a, b]),
        other => Err(Error::SingleClass { found: other.len() }),
    }
}

fn two_classes_or_pure(y: &[usize]) -> Result<()> {
    let n = distinct_classes(y).len();
    if n > 2 {
        return Err(Error::InvalidArgument(format!(
            "binary classifier got {n} classes"
        )));
    }
    Ok(())
}
