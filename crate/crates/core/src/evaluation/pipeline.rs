//! Leakage-safe cross-validation.
//!
//! Within every fold the encoder, scaler and feature selector are fitted on
//! the training rows only, the resampler touches the training rows only, and
//! the classifier is scored on the untouched test rows.

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{kfold_plan, FoldPlan};
use super::metrics::{confusion, f1, ConfusionMatrix, F1Average, POSITIVE_LABEL};
use crate::classifiers::ClassifierParams;
use crate::data::{apply_scaler, continuous_columns, fit_scaler, EncodingMap, ScalerParams, Table};
use crate::error::{Error, Result};
use crate::feature_selection::{fit_selector, SelectorParams};
use crate::resampling::{ResampleMethod, ResamplePlan};
use crate::seed;

/// Where oversampling happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleScope {
    /// Inside each training split (default).
    #[default]
    TrainingFolds,
    /// Once over the whole preprocessed table before folds are drawn. Leaks
    /// synthetic copies of test rows into training; kept for comparison runs.
    WholeTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    /// Standardize continuous columns.
    pub scale: bool,
    pub selector: SelectorParams,
    pub resampler: Option<ResampleMethod>,
    pub smote_k: usize,
    pub resample_scope: ResampleScope,
    pub classifier: ClassifierParams,
    pub f1_average: F1Average,
}

impl PipelineSpec {
    pub fn new(classifier: ClassifierParams) -> Self {
        Self {
            scale: true,
            selector: SelectorParams::default(),
            resampler: None,
            smote_k: 5,
            resample_scope: ResampleScope::TrainingFolds,
            classifier,
            f1_average: F1Average::Binary,
        }
    }
}

/// What each fitted stage learned in one fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldManifest {
    pub fold: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Training rows after resampling.
    pub fitted_rows: usize,
    pub encoding: EncodingMap,
    pub scaler: ScalerParams,
    pub selected_features: Vec<String>,
    pub confusion: ConfusionMatrix,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub fold_scores: Vec<f64>,
    pub mean_f1: f64,
    pub k: usize,
    pub plan_seed: u64,
    pub stratified: bool,
    pub folds: Vec<FoldManifest>,
}

/// Numeric training/test matrices after the encoder and scaler.
struct Prepared {
    x_train: Array2<f64>,
    y_train: Vec<usize>,
    x_test: Array2<f64>,
    y_test: Vec<usize>,
    encoding: EncodingMap,
    scaler: ScalerParams,
}

fn prepare(train: &Table, test: &Table, scale: bool) -> Result<Prepared> {
    let encoding = EncodingMap::fit(train);
    let train = encoding.apply(train)?;
    let test = encoding.apply(test)?;
    let scaler = if scale {
        fit_scaler(&train, &continuous_columns(&train))?
    } else {
        ScalerParams::default()
    };
    let train = apply_scaler(&train, &scaler)?;
    let test = apply_scaler(&test, &scaler)?;
    Ok(Prepared {
        x_train: train.feature_matrix()?,
        y_train: train.labels(),
        x_test: test.feature_matrix()?,
        y_test: test.labels(),
        encoding,
        scaler,
    })
}

fn fold_seed(run_seed: u64, fold: usize) -> u64 {
    seed::derive(run_seed, &["fold".into(), fold.into()])
}

fn fit_and_score(
    pipeline: &PipelineSpec,
    prepared: Prepared,
    feature_names: &[String],
    fold: usize,
    fold_seed: u64,
    resample_here: bool,
) -> Result<FoldManifest> {
    let Prepared {
        x_train,
        y_train,
        x_test,
        y_test,
        encoding,
        scaler,
    } = prepared;
    let train_rows = y_train.len();
    let mut classes = y_train.clone();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass {
            found: classes.len(),
        });
    }

    let selection = fit_selector(
        &pipeline.selector,
        x_train.view(),
        &y_train,
        seed::derive(fold_seed, &["selector".into()]),
    )?;
    let x_train = x_train.select(Axis(1), &selection.selected);
    let x_test = x_test.select(Axis(1), &selection.selected);

    let (x_fit, y_fit) = match pipeline.resampler {
        Some(method) if resample_here => ResamplePlan {
            method,
            k_neighbors: pipeline.smote_k,
            seed: seed::derive(fold_seed, &["resample".into()]),
        }
        .apply(x_train.view(), &y_train)?,
        _ => (x_train, y_train),
    };

    let model = pipeline.classifier.fit(x_fit.view(), &y_fit)?;
    let predictions = model.predict(x_test.view())?;
    Ok(FoldManifest {
        fold,
        train_rows,
        test_rows: y_test.len(),
        fitted_rows: y_fit.len(),
        encoding,
        scaler,
        selected_features: selection
            .selected
            .iter()
            .map(|&i| feature_names[i].clone())
            .collect(),
        confusion: confusion(&y_test, &predictions, POSITIVE_LABEL)?,
        f1: f1(&y_test, &predictions, pipeline.f1_average)?,
    })
}

/// Run the pipeline over every fold of `plan`. `run_seed` addresses the
/// per-fold random streams (selector and resampler), so the same
/// `(pipeline, table, plan, run_seed)` always yields the same scores.
pub fn cross_validate(
    pipeline: &PipelineSpec,
    table: &Table,
    plan: &FoldPlan,
    run_seed: u64,
) -> Result<CvResult> {
    if plan.n != table.n_rows() {
        return Err(Error::Shape(format!(
            "fold plan covers {} rows, table has {}",
            plan.n,
            table.n_rows()
        )));
    }
    if pipeline.resample_scope == ResampleScope::WholeTable && pipeline.resampler.is_some() {
        return cross_validate_presampled(pipeline, table, plan, run_seed);
    }
    let names = table.feature_names();
    let folds: Vec<Result<FoldManifest>> = (0..plan.k)
        .into_par_iter()
        .map(|fold| {
            let train = table.take_rows(&plan.train_indices(fold));
            let test = table.take_rows(plan.test_indices(fold));
            prepare(&train, &test, pipeline.scale)
                .and_then(|p| {
                    fit_and_score(pipeline, p, &names, fold, fold_seed(run_seed, fold), true)
                })
                .map_err(|e| Error::FoldFailed {
                    fold,
                    message: e.to_string(),
                })
        })
        .collect();
    collect(folds, plan)
}

/// Encode, scale and resample the whole table, then cross-validate on a
/// fresh plan (same k, seed and stratification) over the augmented rows.
fn cross_validate_presampled(
    pipeline: &PipelineSpec,
    table: &Table,
    plan: &FoldPlan,
    run_seed: u64,
) -> Result<CvResult> {
    let method = pipeline.resampler.expect("checked by caller");
    let names = table.feature_names();
    let whole = prepare(table, table, pipeline.scale)?;
    let (x, y) = ResamplePlan {
        method,
        k_neighbors: pipeline.smote_k,
        seed: seed::derive(run_seed, &["resample_whole".into()]),
    }
    .apply(whole.x_train.view(), &whole.y_train)?;
    let augmented = kfold_plan(y.len(), plan.k, &y, plan.stratified, plan.seed)?;
    let folds: Vec<Result<FoldManifest>> = (0..augmented.k)
        .into_par_iter()
        .map(|fold| {
            let train = augmented.train_indices(fold);
            let test = augmented.test_indices(fold);
            let prepared = Prepared {
                x_train: x.select(Axis(0), &train),
                y_train: train.iter().map(|&i| y[i]).collect(),
                x_test: x.select(Axis(0), test),
                y_test: test.iter().map(|&i| y[i]).collect(),
                encoding: whole.encoding.clone(),
                scaler: whole.scaler.clone(),
            };
            fit_and_score(
                pipeline,
                prepared,
                &names,
                fold,
                fold_seed(run_seed, fold),
                false,
            )
            .map_err(|e| Error::FoldFailed {
                fold,
                message: e.to_string(),
            })
        })
        .collect();
    collect(folds, &augmented)
}

fn collect(folds: Vec<Result<FoldManifest>>, plan: &FoldPlan) -> Result<CvResult> {
    let folds: Vec<FoldManifest> = folds.into_iter().collect::<Result<_>>()?;
    let fold_scores: Vec<f64> = folds.iter().map(|f| f.f1).collect();
    let mean_f1 = fold_scores.iter().sum::<f64>() / fold_scores.len() as f64;
    Ok(CvResult {
        fold_scores,
        mean_f1,
        k: plan.k,
        plan_seed: plan.seed,
        stratified: plan.stratified,
        folds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{Family, KnnParams, TreeParams};
    use crate::data::{generate_synthetic, Signal, SyntheticSpec};
    use crate::feature_selection::SelectorChoice;

    fn table() -> Table {
        generate_synthetic(&SyntheticSpec::clinical_like(21, Signal::Noisy)).unwrap()
    }

    #[test]
    fn deterministic_scores() {
        let t = table();
        let plan = kfold_plan(t.n_rows(), 8, &t.labels(), true, 3).unwrap();
        let mut p = PipelineSpec::new(ClassifierParams::Knn(KnnParams { k: 3 }));
        p.resampler = Some(ResampleMethod::Smote);
        let a = cross_validate(&p, &t, &plan, 99).unwrap();
        let b = cross_validate(&p, &t, &plan, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fold_scores.len(), 8);
    }

    #[test]
    fn majority_predictor_matches_closed_form() {
        let t = table();
        let y = t.labels();
        let plan = kfold_plan(t.n_rows(), 8, &y, true, 3).unwrap();
        // a depth-0 tree predicts the training majority, which is positive in every fold
        let p = PipelineSpec::new(ClassifierParams::DecisionTree(TreeParams {
            max_depth: Some(0),
            ..TreeParams::default()
        }));
        let r = cross_validate(&p, &t, &plan, 0).unwrap();
        let expected: f64 = plan
            .folds
            .iter()
            .map(|f| {
                let tp = f.iter().filter(|&&i| y[i] == 1).count() as f64;
                let fp = f.len() as f64 - tp;
                2.0 * tp / (2.0 * tp + fp)
            })
            .sum::<f64>()
            / 8.0;
        assert!((r.mean_f1 - expected).abs() < 1e-12);
    }

    #[test]
    fn resampling_leaves_test_folds_alone() {
        let t = table();
        let plan = kfold_plan(t.n_rows(), 8, &t.labels(), true, 3).unwrap();
        let base = PipelineSpec::new(ClassifierParams::default_for(Family::GaussianNb));
        let off = cross_validate(&base, &t, &plan, 1).unwrap();
        for method in [ResampleMethod::RandomOver, ResampleMethod::Smote] {
            let mut p = base.clone();
            p.resampler = Some(method);
            let on = cross_validate(&p, &t, &plan, 1).unwrap();
            for (a, b) in off.folds.iter().zip(&on.folds) {
                assert_eq!(a.test_rows, b.test_rows);
                assert_eq!(b.test_rows, plan.test_indices(b.fold).len());
                assert!(b.fitted_rows >= b.train_rows);
            }
        }
    }

    #[test]
    fn single_class_training_fold_fails() {
        let t = table();
        let y = t.labels();
        // fold 0 holds every negative row, leaving an all-positive training split
        let negatives: Vec<usize> = (0..y.len()).filter(|&i| y[i] == 0).collect();
        let positives: Vec<usize> = (0..y.len()).filter(|&i| y[i] == 1).collect();
        let plan = FoldPlan {
            n: y.len(),
            k: 2,
            seed: 0,
            stratified: false,
            folds: vec![negatives, positives],
        };
        let mut p = PipelineSpec::new(ClassifierParams::default_for(Family::DecisionTree));
        p.selector.choice = SelectorChoice::None;
        let err = cross_validate(&p, &t, &plan, 0).unwrap_err();
        assert!(matches!(err, Error::FoldFailed { .. }), "{err}");
    }

    #[test]
    fn whole_table_scope_runs() {
        let t = table();
        let plan = kfold_plan(t.n_rows(), 4, &t.labels(), true, 3).unwrap();
        let mut p = PipelineSpec::new(ClassifierParams::Knn(KnnParams { k: 3 }));
        p.resampler = Some(ResampleMethod::RandomOver);
        p.resample_scope = ResampleScope::WholeTable;
        let r = cross_validate(&p, &t, &plan, 5).unwrap();
        let total: usize = r.folds.iter().map(|f| f.test_rows).sum();
        assert_eq!(total, 80, "40 positives + 40 balanced negatives");
    }
}
