//! Metrics, fold plans, cross-validation, grid search and score roll-ups.

mod aggregate;
mod folds;
mod grid;
mod metrics;
mod pipeline;

pub use aggregate::{aggregate_group_stats, mean_sd, GroupStats, ScoreMatrix, FAIL_MARKER};
pub use folds::{kfold_plan, FoldPlan};
pub use grid::{
    canonical_grid, default_grid, grid_search, GridPoint, GridResult, DEFAULT_KNN_K,
    DEFAULT_TREE_DEPTHS, DEFAULT_TREE_LEAVES,
};
pub use metrics::{confusion, f1, f1_score, ConfusionMatrix, F1Average, POSITIVE_LABEL};
pub use pipeline::{cross_validate, CvResult, FoldManifest, PipelineSpec, ResampleScope};
