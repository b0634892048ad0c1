//! Config-driven experiment runner behind the `tabclf` binary.

mod config;
mod report;
mod run;

pub use config::{cell_seed, DataSource, Experiment, ExperimentConfig, GridConfig, Variant};
pub use report::{
    emit_reports, write_group_stats, FEATURE_SCORES_FILE, GROUP_STATS_FILE, MANIFEST_FILE,
    MATRIX_FILE, TIMING_FILE,
};
pub use run::{
    fold_plans, fold_seed, replay_cell, run_cell, run_matrix, search_fold_seed, CellRecord,
    FoldSummary, GroupFeatureScores, ResultsMatrix, RunManifest,
};
