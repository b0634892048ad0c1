//! Exhaustive hyperparameter search over a parameter lattice.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::folds::FoldPlan;
use super::pipeline::{cross_validate, CvResult, PipelineSpec};
use crate::classifiers::{ClassifierParams, Criterion, Family, KnnParams, TreeParams};
use crate::data::Table;
use crate::error::{Error, Result};

pub const DEFAULT_KNN_K: [usize; 6] = [1, 3, 5, 7, 9, 11];
pub const DEFAULT_TREE_DEPTHS: [Option<usize>; 5] = [Some(2), Some(3), Some(4), Some(6), None];
pub const DEFAULT_TREE_LEAVES: [usize; 3] = [1, 2, 4];

/// Default lattice for a family. Only KNN and the tree have one; other
/// families get their single default point.
pub fn default_grid(family: Family) -> Vec<ClassifierParams> {
    match family {
        Family::Knn => DEFAULT_KNN_K
            .iter()
            .map(|&k| ClassifierParams::Knn(KnnParams { k }))
            .collect(),
        Family::DecisionTree => {
            let mut grid = Vec::new();
            for criterion in [Criterion::Entropy, Criterion::Gini] {
                for max_depth in DEFAULT_TREE_DEPTHS {
                    for min_samples_leaf in DEFAULT_TREE_LEAVES {
                        grid.push(ClassifierParams::DecisionTree(TreeParams {
                            criterion,
                            max_depth,
                            min_samples_leaf,
                            ..TreeParams::default()
                        }));
                    }
                }
            }
            grid
        }
        other => vec![ClassifierParams::default_for(other)],
    }
}

fn key_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Sort points by their lattice key and drop duplicates. This is the order
/// ties are broken in.
pub fn canonical_grid(grid: &[ClassifierParams]) -> Vec<ClassifierParams> {
    let mut points = grid.to_vec();
    points.sort_by(|a, b| {
        (a.family() as u8)
            .cmp(&(b.family() as u8))
            .then_with(|| key_cmp(&a.lattice_key(), &b.lattice_key()))
    });
    points.dedup();
    points
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub params: ClassifierParams,
    /// `None` when every fold of this point failed to fit.
    pub mean_f1: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: ClassifierParams,
    pub best_cv: CvResult,
    /// Every evaluated point in canonical order.
    pub points: Vec<GridPoint>,
}

/// Evaluate every lattice point with `cross_validate` on one plan and return
/// the point with the highest mean f1. Ties go to the earliest point in
/// canonical order. The classifier in `base` is replaced by each point.
pub fn grid_search(
    base: &PipelineSpec,
    grid: &[ClassifierParams],
    table: &Table,
    plan: &FoldPlan,
    run_seed: u64,
) -> Result<GridResult> {
    let points = canonical_grid(grid);
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty parameter grid".into()));
    }
    let mut evaluated = Vec::with_capacity(points.len());
    let mut best: Option<(ClassifierParams, CvResult)> = None;
    for params in points {
        let mut pipeline = base.clone();
        pipeline.classifier = params.clone();
        match cross_validate(&pipeline, table, plan, run_seed) {
            Ok(cv) => {
                evaluated.push(GridPoint {
                    params: params.clone(),
                    mean_f1: Some(cv.mean_f1),
                    error: None,
                });
                if best.as_ref().is_none_or(|(_, b)| cv.mean_f1 > b.mean_f1) {
                    best = Some((params, cv));
                }
            }
            Err(e) => evaluated.push(GridPoint {
                params,
                mean_f1: None,
                error: Some(e.to_string()),
            }),
        }
    }
    match best {
        Some((best, best_cv)) => Ok(GridResult {
            best,
            best_cv,
            points: evaluated,
        }),
        None => Err(Error::GridExhausted(
            evaluated
                .iter()
                .filter_map(|p| p.error.clone())
                .next()
                .unwrap_or_default(),
        )),
    }
}
