use std::f64::consts::PI;

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_fit_inputs, check_width, distinct_classes};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaussianNbParams {
    /// σ floor as a fraction of the largest per-feature variance.
    pub var_smoothing: f64,
}

impl Default for GaussianNbParams {
    fn default() -> Self {
        Self {
            var_smoothing: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNbState {
    pub classes: Vec<usize>,
    pub priors: Vec<f64>,
    /// `means[c][j]`
    pub means: Vec<Vec<f64>>,
    /// Floored sample standard deviations, `sigmas[c][j]`.
    pub sigmas: Vec<Vec<f64>>,
    pub sigma_floor: f64,
}

/// Normal density N(x; mean, sd).
pub fn gaussian_density(x: f64, mean: f64, sd: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * sd * sd)).exp() / ((2.0 * PI).sqrt() * sd)
}

pub fn gaussian_log_density(x: f64, mean: f64, sd: f64) -> f64 {
    -0.5 * (2.0 * PI).ln() - sd.ln() - (x - mean).powi(2) / (2.0 * sd * sd)
}

pub fn fit_gaussian_nb(
    x: ArrayView2<f64>,
    y: &[usize],
    params: &GaussianNbParams,
) -> Result<GaussianNbState> {
    check_fit_inputs(x, y)?;
    let classes = distinct_classes(y);
    let n = x.nrows() as f64;

    let max_var = x
        .columns()
        .into_iter()
        .map(|col| {
            let m = col.sum() / n;
            col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n
        })
        .fold(0.0, f64::max);
    let sigma_floor = if max_var > 0.0 {
        params.var_smoothing * max_var
    } else {
        params.var_smoothing
    };

    let mut priors = Vec::new();
    let mut means = Vec::new();
    let mut sigmas = Vec::new();
    for &c in &classes {
        let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        let count = rows.len() as f64;
        priors.push(count / n);
        let mut mu = Vec::with_capacity(x.ncols());
        let mut sd = Vec::with_capacity(x.ncols());
        for j in 0..x.ncols() {
            let m = rows.iter().map(|&i| x[[i, j]]).sum::<f64>() / count;
            let s = if rows.len() > 1 {
                let ss: f64 = rows.iter().map(|&i| (x[[i, j]] - m).powi(2)).sum();
                (ss / (count - 1.0)).sqrt()
            } else {
                0.0
            };
            mu.push(m);
            sd.push(s.max(sigma_floor));
        }
        means.push(mu);
        sigmas.push(sd);
    }
    Ok(GaussianNbState {
        classes,
        priors,
        means,
        sigmas,
        sigma_floor,
    })
}

/// Predicted class and posterior probabilities (in `state.classes` order).
pub fn gnb_predict(state: &GaussianNbState, x: ArrayView1<f64>) -> Result<(usize, Vec<f64>)> {
    check_width(state.means[0].len(), x.len())?;
    let log_joint: Vec<f64> = (0..state.classes.len())
        .map(|c| {
            state.priors[c].ln()
                + x.iter()
                    .zip(state.means[c].iter().zip(&state.sigmas[c]))
                    .map(|(&v, (&m, &s))| gaussian_log_density(v, m, s))
                    .sum::<f64>()
        })
        .collect();
    let top = log_joint.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_joint.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let posteriors: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut best = 0;
    for c in 1..posteriors.len() {
        if log_joint[c] > log_joint[best] {
            best = c;
        }
    }
    Ok((state.classes[best], posteriors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn standard_normal_at_zero() {
        assert_abs_diff_eq!(
            gaussian_density(0.0, 0.0, 1.0),
            0.398942280401,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            gaussian_log_density(0.7, 0.2, 1.3).exp(),
            gaussian_density(0.7, 0.2, 1.3),
            epsilon = 1e-15
        );
    }

    #[test]
    fn symmetric_classes_split_evenly() {
        let x = array![[-2.0], [0.0], [0.0], [2.0]];
        let y = [0, 0, 1, 1];
        // class 0 ~ N(-1, √2), class 1 ~ N(1, √2)
        let s = fit_gaussian_nb(x.view(), &y, &GaussianNbParams::default()).unwrap();
        let (class, post) = gnb_predict(&s, array![0.0].view()).unwrap();
        assert_abs_diff_eq!(post[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(post[1], 0.5, epsilon = 1e-12);
        assert_eq!(class, 0, "exact tie goes to the lower label");
    }

    #[test]
    fn bessel_moments() {
        let x = array![[2.0], [4.0], [6.0], [100.0]];
        let s = fit_gaussian_nb(x.view(), &[0, 0, 0, 1], &GaussianNbParams::default()).unwrap();
        assert_eq!(s.means[0][0], 4.0);
        assert_eq!(s.sigmas[0][0], 2.0);
        // one-sample class falls back to the floor
        assert_eq!(s.sigmas[1][0], s.sigma_floor);
        assert!(s.sigma_floor > 0.0);
        assert_abs_diff_eq!(s.priors[0], 0.75);
    }

    #[test]
    fn constant_data_still_predicts() {
        let x = array![[1.0], [1.0], [1.0]];
        let s = fit_gaussian_nb(x.view(), &[0, 1, 1], &GaussianNbParams::default()).unwrap();
        let (class, post) = gnb_predict(&s, array![1.0].view()).unwrap();
        assert_eq!(class, 1);
        assert_abs_diff_eq!(post.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}
