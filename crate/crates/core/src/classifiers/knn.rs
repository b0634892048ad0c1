use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_fit_inputs, check_width, distinct_classes};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnState {
    pub x: Array2<f64>,
    pub y: Vec<usize>,
    pub k: usize,
    pub classes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnPrediction {
    pub class: usize,
    /// Vote share per class, in `KnnState::classes` order.
    pub likelihoods: Vec<f64>,
}

pub fn euclidean(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(p, q)| (p - q).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn fit_knn(x: ArrayView2<f64>, y: &[usize], params: &KnnParams) -> Result<KnnState> {
    check_fit_inputs(x, y)?;
    if params.k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if params.k > x.nrows() {
        return Err(Error::InvalidArgument(format!(
            "k = {} exceeds the {} training rows",
            params.k,
            x.nrows()
        )));
    }
    Ok(KnnState {
        x: x.to_owned(),
        y: y.to_vec(),
        k: params.k,
        classes: distinct_classes(y),
    })
}

/// Majority vote among the `k` nearest rows (ties at the k-th distance go to
/// the lower row index). Equal vote counts are resolved by the smaller summed
/// neighbour distance, then by the lower class label.
pub fn knn_predict(state: &KnnState, x: ArrayView1<f64>) -> Result<KnnPrediction> {
    check_width(state.x.ncols(), x.len())?;
    if state.k > state.x.nrows() {
        return Err(Error::InvalidArgument(format!(
            "k = {} exceeds the {} training rows",
            state.k,
            state.x.nrows()
        )));
    }
    let mut order: Vec<(f64, usize)> = state
        .x
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| (euclidean(row, x), i))
        .collect();
    order.select_nth_unstable_by(state.k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let n_classes = state.classes.len();
    let mut votes = vec![0usize; n_classes];
    let mut dist_sum = vec![0.0; n_classes];
    let mut nearest = order[..state.k].to_vec();
    nearest.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for &(d, i) in &nearest {
        let c = state
            .classes
            .binary_search(&state.y[i])
            .expect("label seen at fit");
        votes[c] += 1;
        dist_sum[c] += d;
    }
    let mut best = 0;
    for c in 1..n_classes {
        let better =
            votes[c] > votes[best] || (votes[c] == votes[best] && dist_sum[c] < dist_sum[best]);
        if better {
            best = c;
        }
    }
    Ok(KnnPrediction {
        class: state.classes[best],
        likelihoods: votes.iter().map(|&v| v as f64 / state.k as f64).collect(),
    })
}
