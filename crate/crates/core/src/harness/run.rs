//! The classifiers × groups matrix runner.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{cell_seed, Experiment, ExperimentConfig, Variant};
use crate::classifiers::{ClassifierParams, Family};
use crate::data::{
    apply_scaler, continuous_columns, fit_scaler, select_group, EncodingMap, GroupId, Table,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    canonical_grid, cross_validate, grid_search, kfold_plan, mean_sd, ConfusionMatrix, CvResult,
    FoldPlan, GridPoint, GroupStats, ScoreMatrix,
};
use crate::feature_selection::{fit_selector, FeatureScores, SelectorChoice};
use crate::seed;

/// One fold of a finished cell, without the fitted encoder and scaler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub fitted_rows: usize,
    pub selected_features: Vec<String>,
    pub confusion: ConfusionMatrix,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub classifier: Variant,
    pub group: GroupId,
    pub seed: u64,
    /// Classifier parameters the reported score was computed with.
    pub params: ClassifierParams,
    /// Present for grid-searched variants.
    pub grid: Option<Vec<GridPoint>>,
    pub mean_f1: Option<f64>,
    pub fold_scores: Vec<f64>,
    pub folds: Vec<FoldSummary>,
    pub error: Option<String>,
}

impl CellRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub master_seed: u64,
    pub fold_seed: u64,
    pub search_fold_seed: Option<u64>,
    /// The run's config with `workers` and `out_dir` cleared; neither
    /// affects any score.
    pub config: ExperimentConfig,
    pub n_rows: usize,
    pub n_features: usize,
    /// Search lattice per searched family, in canonical order.
    pub grids: Vec<(Family, Vec<ClassifierParams>)>,
    pub cells: Vec<CellRecord>,
    /// Groups left out of the roll-up because a cell failed.
    pub incomplete_groups: Vec<GroupId>,
}

/// Selection scores computed on a whole group table, for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFeatureScores {
    pub group: GroupId,
    pub features: Vec<String>,
    pub scores: Vec<FeatureScores>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsMatrix {
    pub scores: ScoreMatrix,
    pub group_stats: Vec<GroupStats>,
    pub manifest: RunManifest,
    pub feature_scores: Vec<GroupFeatureScores>,
    pub wall_time_secs: f64,
}

impl ResultsMatrix {
    pub fn failed_cells(&self) -> usize {
        self.manifest.cells.iter().filter(|c| c.failed()).count()
    }

    pub fn cell(&self, variant: Variant, group: GroupId) -> Option<&CellRecord> {
        self.manifest
            .cells
            .iter()
            .find(|c| c.classifier == variant && c.group == group)
    }
}

pub fn fold_seed(master: u64) -> u64 {
    seed::derive(master, &["folds".into()])
}

pub fn search_fold_seed(master: u64) -> u64 {
    seed::derive(master, &["search_folds".into()])
}

/// Fold plans shared by every cell of a run: the reporting plan and, when
/// configured, the separate grid-search plan.
pub fn fold_plans(cfg: &ExperimentConfig, table: &Table) -> Result<(FoldPlan, Option<FoldPlan>)> {
    let y = table.labels();
    let plan = kfold_plan(
        table.n_rows(),
        cfg.folds,
        &y,
        cfg.stratified,
        fold_seed(cfg.seed),
    )?;
    let search = cfg
        .search_folds
        .map(|k| {
            kfold_plan(
                table.n_rows(),
                k,
                &y,
                cfg.stratified,
                search_fold_seed(cfg.seed),
            )
        })
        .transpose()?;
    Ok((plan, search))
}

fn summarize(cv: &CvResult) -> Vec<FoldSummary> {
    cv.folds
        .iter()
        .map(|f| FoldSummary {
            fold: f.fold,
            train_rows: f.train_rows,
            test_rows: f.test_rows,
            fitted_rows: f.fitted_rows,
            selected_features: f.selected_features.clone(),
            confusion: f.confusion,
            f1: f.f1,
        })
        .collect()
}

/// Run one cell. Grid-searched variants report the score of the best point
/// on the reporting plan; `seed` alone drives the fold substreams, so the
/// recorded parameters replay to the same score.
pub fn run_cell(
    cfg: &ExperimentConfig,
    table: &Table,
    plan: &FoldPlan,
    search_plan: Option<&FoldPlan>,
    variant: Variant,
    group: GroupId,
) -> CellRecord {
    let seed = cell_seed(cfg.seed, variant, group);
    let base = cfg.pipeline(variant);
    let mut record = CellRecord {
        classifier: variant,
        group,
        seed,
        params: base.classifier.clone(),
        grid: None,
        mean_f1: None,
        fold_scores: Vec::new(),
        folds: Vec::new(),
        error: None,
    };
    let outcome = (|| -> Result<CvResult> {
        let t = select_group(table, &group.spec())?;
        if !variant.searched() {
            return cross_validate(&base, &t, plan, seed);
        }
        let lattice = cfg.grids.lattice(variant.family());
        let found = grid_search(&base, &lattice, &t, search_plan.unwrap_or(plan), seed)?;
        record.params = found.best.clone();
        record.grid = Some(found.points);
        match search_plan {
            None => Ok(found.best_cv),
            Some(_) => {
                let mut p = base.clone();
                p.classifier = found.best;
                cross_validate(&p, &t, plan, seed)
            }
        }
    })();
    match outcome {
        Ok(cv) => {
            record.mean_f1 = Some(cv.mean_f1);
            record.fold_scores = cv.fold_scores.clone();
            record.folds = summarize(&cv);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Re-run a finished cell with its recorded parameters and no search.
pub fn replay_cell(cfg: &ExperimentConfig, table: &Table, record: &CellRecord) -> Result<f64> {
    let (plan, _) = fold_plans(cfg, table)?;
    let t = select_group(table, &record.group.spec())?;
    let mut p = cfg.pipeline(record.classifier);
    p.classifier = record.params.clone();
    Ok(cross_validate(&p, &t, &plan, record.seed)?.mean_f1)
}

fn group_feature_scores(
    cfg: &ExperimentConfig,
    table: &Table,
    group: GroupId,
) -> Result<GroupFeatureScores> {
    let t = select_group(table, &group.spec())?;
    let t = EncodingMap::fit(&t).apply(&t)?;
    let t = if cfg.scale {
        apply_scaler(&t, &fit_scaler(&t, &continuous_columns(&t))?)?
    } else {
        t
    };
    let x = t.feature_matrix()?;
    let s = seed::derive(cfg.seed, &["feature_scores".into(), group.as_str().into()]);
    let selection = fit_selector(&cfg.selector_params(), x.view(), &t.labels(), s)?;
    Ok(GroupFeatureScores {
        group,
        features: t.feature_names(),
        scores: selection.scores,
    })
}

/// Evaluate every (variant, group) cell. Cells run on a pool of
/// `config.workers` threads; results do not depend on the schedule.
pub fn run_matrix(exp: &Experiment) -> Result<ResultsMatrix> {
    let start = Instant::now();
    let cfg = &exp.config;
    let (plan, search_plan) = fold_plans(cfg, &exp.table)?;
    let coords: Vec<(Variant, GroupId)> = exp
        .variants
        .iter()
        .flat_map(|&v| exp.groups.iter().map(move |&g| (v, g)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let cells: Vec<CellRecord> = pool.install(|| {
        coords
            .par_iter()
            .map(|&(v, g)| run_cell(cfg, &exp.table, &plan, search_plan.as_ref(), v, g))
            .collect()
    });

    let mut scores = ScoreMatrix::new(
        exp.variants.iter().map(|v| v.name().to_string()).collect(),
        exp.groups.iter().map(|g| g.as_str().to_string()).collect(),
    );
    for (cell, &(v, g)) in cells.iter().zip(&coords) {
        let i = exp
            .variants
            .iter()
            .position(|&x| x == v)
            .expect("known variant");
        let j = exp
            .groups
            .iter()
            .position(|&x| x == g)
            .expect("known group");
        scores.cells[i][j] = cell.mean_f1;
    }

    let mut group_stats = Vec::new();
    let mut incomplete_groups = Vec::new();
    for (j, &g) in exp.groups.iter().enumerate() {
        let column: Option<Vec<f64>> = scores.column(j).into_iter().collect();
        match column {
            Some(values) => {
                let (mean, sd) = mean_sd(&values)?;
                group_stats.push(GroupStats {
                    group: g.as_str().to_string(),
                    mean,
                    sd,
                    n: values.len(),
                });
            }
            None => incomplete_groups.push(g),
        }
    }

    let feature_scores = if cfg.selector == SelectorChoice::None {
        Vec::new()
    } else {
        pool.install(|| {
            exp.groups
                .par_iter()
                .filter_map(|&g| group_feature_scores(cfg, &exp.table, g).ok())
                .collect()
        })
    };

    let mut families: Vec<Family> = exp
        .variants
        .iter()
        .filter(|v| v.searched())
        .map(|v| v.family())
        .collect();
    families.sort_by_key(|f| *f as u8);
    families.dedup();
    let grids = families
        .into_iter()
        .map(|f| (f, canonical_grid(&cfg.grids.lattice(f))))
        .collect();

    let mut recorded = cfg.clone();
    recorded.workers = 0;
    recorded.out_dir = PathBuf::new();
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed: cfg.seed,
        fold_seed: plan.seed,
        search_fold_seed: search_plan.as_ref().map(|p| p.seed),
        config: recorded,
        n_rows: exp.table.n_rows(),
        n_features: exp.table.feature_indices().len(),
        grids,
        cells,
        incomplete_groups,
    };
    Ok(ResultsMatrix {
        scores,
        group_stats,
        manifest,
        feature_scores,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
