//! Minority-class oversampling for training splits.
//!
//! Both methods append rows until the two class counts are equal; original
//! rows keep their order and the majority class is never touched.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifiers::euclidean;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMethod {
    RandomOver,
    Smote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResamplePlan {
    pub method: ResampleMethod,
    /// SMOTE neighbourhood size.
    pub k_neighbors: usize,
    pub seed: u64,
}

impl ResamplePlan {
    pub fn new(method: ResampleMethod, seed: u64) -> Self {
        Self {
            method,
            k_neighbors: 5,
            seed,
        }
    }

    pub fn apply(&self, x: ArrayView2<f64>, y: &[usize]) -> Result<(Array2<f64>, Vec<usize>)> {
        match self.method {
            ResampleMethod::RandomOver => random_oversample(x, y, self.seed),
            ResampleMethod::Smote => smote(x, y, self.k_neighbors, self.seed),
        }
    }
}

struct Imbalance {
    minority: Vec<usize>,
    minority_label: usize,
    deficit: usize,
}

fn imbalance(x: ArrayView2<f64>, y: &[usize]) -> Result<Imbalance> {
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "{} rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let [a, b] = classes[..] else {
        return Err(Error::SingleClass {
            found: classes.len(),
        });
    };
    let rows_a: Vec<usize> = (0..y.len()).filter(|&i| y[i] == a).collect();
    let rows_b: Vec<usize> = (0..y.len()).filter(|&i| y[i] == b).collect();
    // equal counts: nothing to add, label choice is irrelevant
    let (minority, minority_label, majority_len) = if rows_b.len() < rows_a.len() {
        (rows_b, b, rows_a.len())
    } else {
        let len_b = rows_b.len();
        (rows_a, a, len_b)
    };
    Ok(Imbalance {
        deficit: majority_len - minority.len(),
        minority,
        minority_label,
    })
}

fn append(
    x: ArrayView2<f64>,
    y: &[usize],
    extra: Vec<Vec<f64>>,
    label: usize,
) -> (Array2<f64>, Vec<usize>) {
    let mut out = x.to_owned();
    let mut labels = y.to_vec();
    for row in extra {
        out.push(Axis(0), ArrayView1::from(&row))
            .expect("row width matches");
        labels.push(label);
    }
    (out, labels)
}

/// Duplicate uniformly drawn minority rows until the classes balance.
pub fn random_oversample(
    x: ArrayView2<f64>,
    y: &[usize],
    seed: u64,
) -> Result<(Array2<f64>, Vec<usize>)> {
    let imb = imbalance(x, y)?;
    let mut rng = seed::rng(seed);
    let extra = duplicate_rows(x, &imb, &mut rng);
    Ok(append(x, y, extra, imb.minority_label))
}

fn duplicate_rows(x: ArrayView2<f64>, imb: &Imbalance, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..imb.deficit)
        .map(|_| {
            let pick = imb.minority[rng.random_range(0..imb.minority.len())];
            x.row(pick).to_vec()
        })
        .collect()
}

/// Indices (into `candidates`) of the `k` candidates nearest to
/// `candidates[from]`, excluding itself. Ties go to the lower position.
pub fn nearest_within(
    x: ArrayView2<f64>,
    candidates: &[usize],
    from: usize,
    k: usize,
) -> Vec<usize> {
    let origin = x.row(candidates[from]);
    let mut dist: Vec<(f64, usize)> = candidates
        .iter()
        .enumerate()
        .filter(|&(pos, _)| pos != from)
        .map(|(pos, &row)| (euclidean(origin, x.row(row)), pos))
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    dist.into_iter().take(k).map(|(_, pos)| pos).collect()
}

/// SMOTE: each synthetic row is `x + gap · (z − x)` for a random minority
/// row `x`, one of its `k` nearest minority neighbours `z` and
/// `gap ~ U[0, 1]`. With `m` minority rows the neighbourhood shrinks to
/// `m − 1`; a lone minority row is duplicated instead.
pub fn smote(
    x: ArrayView2<f64>,
    y: &[usize],
    k: usize,
    seed: u64,
) -> Result<(Array2<f64>, Vec<usize>)> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "k_neighbors must be at least 1".into(),
        ));
    }
    let imb = imbalance(x, y)?;
    let mut rng = seed::rng(seed);
    if imb.deficit == 0 {
        return Ok((x.to_owned(), y.to_vec()));
    }
    let m = imb.minority.len();
    if m == 1 {
        let extra = duplicate_rows(x, &imb, &mut rng);
        return Ok(append(x, y, extra, imb.minority_label));
    }
    let k_eff = k.min(m - 1);
    let neighbours: Vec<Vec<usize>> = (0..m)
        .map(|pos| nearest_within(x, &imb.minority, pos, k_eff))
        .collect();

    let extra = (0..imb.deficit)
        .map(|_| {
            let from = rng.random_range(0..m);
            let to = neighbours[from][rng.random_range(0..k_eff)];
            let gap: f64 = rng.random_range(0.0..=1.0);
            interpolate(x.row(imb.minority[from]), x.row(imb.minority[to]), gap)
        })
        .collect();
    Ok(append(x, y, extra, imb.minority_label))
}

/// Point at fraction `gap` along the segment from `a` to `b`.
pub fn interpolate(a: ArrayView1<f64>, b: ArrayView1<f64>, gap: f64) -> Vec<f64> {
    a.iter()
        .zip(b.iter())
        .map(|(p, q)| p + gap * (q - p))
        .collect()
}
