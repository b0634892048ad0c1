use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Partition of `0..n` into `k` test folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    /// Test row indices per fold, ascending.
    pub folds: Vec<Vec<usize>>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> &[usize] {
        &self.folds[fold]
    }

    /// Every row outside `fold`, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        let mut in_test = vec![false; self.n];
        for &i in &self.folds[fold] {
            in_test[i] = true;
        }
        (0..self.n).filter(|&i| !in_test[i]).collect()
    }
}

/// Shuffle rows (per class when stratified, classes taken in label order),
/// then deal them round-robin into the folds. Dealing one class after the
/// other keeps both the fold sizes and every class's per-fold counts within
/// one of each other.
pub fn kfold_plan(
    n: usize,
    k: usize,
    y: &[usize],
    stratified: bool,
    seed: u64,
) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "{k} folds requested for {n} rows"
        )));
    }
    if stratified && y.len() != n {
        return Err(Error::Shape(format!("{n} rows but {} labels", y.len())));
    }
    let mut rng = seed::rng(seed);
    let order: Vec<usize> = if stratified {
        let mut classes = y.to_vec();
        classes.sort_unstable();
        classes.dedup();
        classes
            .iter()
            .flat_map(|&c| {
                let mut rows: Vec<usize> = (0..n).filter(|&i| y[i] == c).collect();
                rows.shuffle(&mut rng);
                rows
            })
            .collect()
    } else {
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        rows
    };
    let mut folds = vec![Vec::new(); k];
    for (pos, row) in order.into_iter().enumerate() {
        folds[pos % k].push(row);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(FoldPlan {
        n,
        k,
        seed,
        stratified,
        folds,
    })
}
