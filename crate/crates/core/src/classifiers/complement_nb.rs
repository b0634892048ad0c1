//! Complement naive Bayes on non-negative features.
//!
//! For each class `c` the feature mass of every training row *outside* `c`
//! is summed per feature, smoothed by `alpha` and normalized into a
//! distribution θ̃_c. A query `x` gets the complement score
//! `Σ_j x_j · ln θ̃_cj` for every class, and the class with the smallest score
//! (the class `x` least resembles the complement of) is predicted. Exact ties
//! go to the lower class label.

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_fit_inputs, check_width, distinct_classes};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComplementNbParams {
    pub alpha: f64,
}

impl Default for ComplementNbParams {
    fn default() -> Self {
        Self { alpha: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplementNbState {
    pub classes: Vec<usize>,
    /// `complement_log_weights[c][j] = ln θ̃_cj`
    pub complement_log_weights: Vec<Vec<f64>>,
}

pub fn fit_complement_nb(
    x: ArrayView2<f64>,
    y: &[usize],
    params: &ComplementNbParams,
) -> Result<ComplementNbState> {
    check_fit_inputs(x, y)?;
    if params.alpha.is_nan() || params.alpha <= 0.0 {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    for row in x.rows() {
        if let Some((column, &value)) = row.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeFeature { column, value });
        }
    }
    let classes = distinct_classes(y);
    let complement_log_weights = classes
        .iter()
        .map(|&c| {
            let mut mass = vec![params.alpha; x.ncols()];
            for (row, &label) in x.rows().into_iter().zip(y) {
                if label != c {
                    for (m, v) in mass.iter_mut().zip(row.iter()) {
                        *m += v;
                    }
                }
            }
            let total: f64 = mass.iter().sum();
            mass.iter().map(|m| (m / total).ln()).collect()
        })
        .collect();
    Ok(ComplementNbState {
        classes,
        complement_log_weights,
    })
}

/// Complement scores per class, in `state.classes` order.
pub fn complement_scores(state: &ComplementNbState, x: ArrayView1<f64>) -> Result<Vec<f64>> {
    check_width(state.complement_log_weights[0].len(), x.len())?;
    Ok(state
        .complement_log_weights
        .iter()
        .map(|w| w.iter().zip(x.iter()).map(|(a, b)| a * b).sum())
        .collect())
}

pub fn cnb_predict(state: &ComplementNbState, x: ArrayView1<f64>) -> Result<usize> {
    let scores = complement_scores(state, x)?;
    let mut best = 0;
    for c in 1..scores.len() {
        if scores[c] < scores[best] {
            best = c;
        }
    }
    Ok(state.classes[best])
}

/// Per-column shift that makes the training features non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinShift {
    pub offsets: Vec<f64>,
}

impl MinShift {
    pub fn fit(x: ArrayView2<f64>) -> Self {
        let offsets = x
            .columns()
            .into_iter()
            .map(|col| {
                let min = col.iter().copied().fold(f64::INFINITY, f64::min);
                if min < 0.0 {
                    -min
                } else {
                    0.0
                }
            })
            .collect();
        Self { offsets }
    }

    /// Shift, then clamp at zero (unseen rows may fall below the training
    /// minimum).
    pub fn apply_row(&self, x: ArrayView1<f64>) -> Vec<f64> {
        x.iter()
            .zip(&self.offsets)
            .map(|(v, o)| (v + o).max(0.0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    #[test]
    fn mass_on_feature_points_to_its_class() {
        // class 0 rows are all zeros; class 1 rows carry mass on feature 1
        let x = array![
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [0.0, 3.0, 0.0],
            [1.0, 2.0, 0.0]
        ];
        let y = [0, 0, 1, 1];
        let s = fit_complement_nb(x.view(), &y, &ComplementNbParams::default()).unwrap();

        // brute force: class 0's complement is rows 2 and 3 -> mass (1+1, 5+1, 0+1)
        let theta0: [f64; 3] = [2.0 / 9.0, 6.0 / 9.0, 1.0 / 9.0];
        let theta1: [f64; 3] = [1.0 / 3.0; 3];
        let q = array![0.0, 4.0, 0.0];
        let score0: f64 = q.iter().zip(theta0).map(|(a, t)| a * t.ln()).sum();
        let score1: f64 = q.iter().zip(theta1).map(|(a, t)| a * t.ln()).sum();
        let scores = complement_scores(&s, q.view()).unwrap();
        assert!((scores[0] - score0).abs() < 1e-12);
        assert!((scores[1] - score1).abs() < 1e-12);
        assert!(score1 < score0);
        assert_eq!(cnb_predict(&s, q.view()).unwrap(), 1);
    }

    #[test]
    fn single_class_always_predicted() {
        let x = array![[1.0, 2.0], [0.5, 0.0]];
        let s = fit_complement_nb(x.view(), &[1, 1], &ComplementNbParams::default()).unwrap();
        assert_eq!(cnb_predict(&s, array![9.0, 0.0].view()).unwrap(), 1);
    }

    #[test]
    fn symmetric_tie_goes_to_lower_label() {
        let x = array![[1.0, 0.0], [0.0, 1.0]];
        let s = fit_complement_nb(x.view(), &[0, 1], &ComplementNbParams::default()).unwrap();
        assert_eq!(cnb_predict(&s, array![1.0, 1.0].view()).unwrap(), 0);
    }

    #[test]
    fn negative_feature_named() {
        let x = array![[1.0, -0.5], [0.0, 1.0]];
        let err = fit_complement_nb(x.view(), &[0, 1], &ComplementNbParams::default()).unwrap_err();
        assert!(matches!(err, Error::NegativeFeature { column: 1, .. }));
    }

    #[test]
    fn min_shift_clamps_unseen() {
        let x = Array2::from_shape_vec((2, 2), vec![-2.0, 1.0, 3.0, 4.0]).unwrap();
        let shift = MinShift::fit(x.view());
        assert_eq!(shift.offsets, vec![2.0, 0.0]);
        assert_eq!(shift.apply_row(array![-5.0, 2.0].view()), vec![0.0, 2.0]);
    }
}
