use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_fit_inputs, two_classes};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub max_iters: usize,
    /// L2 penalty on the coefficients (the intercept is not penalized).
    pub l2: f64,
    /// Stop once the gradient's max-norm drops below this.
    pub tol: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_iters: 5000,
            l2: 1e-4,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticState {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// `[negative, positive]` class labels.
    pub classes: [usize; 2],
    pub iterations: usize,
    pub final_loss: f64,
    pub converged: bool,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean negative log-likelihood plus `l2/2 · ‖β‖²`. `y` holds 0/1 targets.
pub fn log_loss(x: ArrayView2<f64>, y: &[f64], intercept: f64, coef: &[f64], l2: f64) -> f64 {
    let n = x.nrows() as f64;
    let mut total = 0.0;
    for (row, &t) in x.rows().into_iter().zip(y) {
        let z = intercept + dot(row, coef);
        total += softplus(z) - t * z;
    }
    total / n + 0.5 * l2 * coef.iter().map(|b| b * b).sum::<f64>()
}

/// Analytic gradient of [`log_loss`]: `(d/d intercept, d/d coef)`.
pub fn log_loss_gradient(
    x: ArrayView2<f64>,
    y: &[f64],
    intercept: f64,
    coef: &[f64],
    l2: f64,
) -> (f64, Vec<f64>) {
    let n = x.nrows() as f64;
    let mut g0 = 0.0;
    let mut g = vec![0.0; coef.len()];
    for (row, &t) in x.rows().into_iter().zip(y) {
        let r = sigmoid(intercept + dot(row, coef)) - t;
        g0 += r;
        for (gj, xj) in g.iter_mut().zip(row.iter()) {
            *gj += r * xj;
        }
    }
    g0 /= n;
    for (gj, b) in g.iter_mut().zip(coef) {
        *gj = *gj / n + l2 * b;
    }
    (g0, g)
}

fn dot(row: ArrayView1<f64>, coef: &[f64]) -> f64 {
    row.iter().zip(coef).map(|(a, b)| a * b).sum()
}

/// Full-batch gradient descent on the L2-regularized log-loss.
pub fn fit_logistic(
    x: ArrayView2<f64>,
    y: &[usize],
    params: &LogisticParams,
) -> Result<LogisticState> {
    check_fit_inputs(x, y)?;
    let classes = two_classes(y)?;
    if params.learning_rate.is_nan() || params.learning_rate <= 0.0 || params.l2 < 0.0 {
        return Err(Error::InvalidArgument(
            "learning_rate must be positive and l2 non-negative".into(),
        ));
    }
    let targets: Vec<f64> = y
        .iter()
        .map(|&c| f64::from(u8::from(c == classes[1])))
        .collect();

    let mut intercept = 0.0;
    let mut coef = vec![0.0; x.ncols()];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iters {
        let (g0, g) = log_loss_gradient(x, &targets, intercept, &coef, params.l2);
        let norm = g.iter().fold(g0.abs(), |m, v| m.max(v.abs()));
        if !norm.is_finite() {
            return Err(Error::Diverged {
                iteration: iterations,
            });
        }
        if norm < params.tol {
            converged = true;
            break;
        }
        intercept -= params.learning_rate * g0;
        for (b, gj) in coef.iter_mut().zip(&g) {
            *b -= params.learning_rate * gj;
        }
        iterations += 1;
        let loss = log_loss(x, &targets, intercept, &coef, params.l2);
        if !loss.is_finite() {
            return Err(Error::Diverged {
                iteration: iterations,
            });
        }
    }
    let final_loss = log_loss(x, &targets, intercept, &coef, params.l2);
    Ok(LogisticState {
        intercept,
        coefficients: coef,
        classes,
        iterations,
        final_loss,
        converged,
    })
}

/// P(positive class | x).
pub fn sigmoid_predict(state: &LogisticState, x: ArrayView1<f64>) -> Result<f64> {
    if x.len() != state.coefficients.len() {
        return Err(Error::Shape(format!(
            "expected {} features, got {}",
            state.coefficients.len(),
            x.len()
        )));
    }
    Ok(sigmoid(state.intercept + dot(x, &state.coefficients)))
}

pub fn logistic_predict(state: &LogisticState, x: ArrayView1<f64>) -> Result<usize> {
    let p = sigmoid_predict(state, x)?;
    Ok(if p >= 0.5 {
        state.classes[1]
    } else {
        state.classes[0]
    })
}
