//! Univariate ANOVA F scoring with k-best selection, and impurity-based
//! feature importances from an ensemble of extremely randomized trees.

use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifiers::{impurity, Criterion};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreMethod {
    AnovaF,
    ExtraTrees,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureScores {
    pub method: ScoreMethod,
    /// One score per feature. An ANOVA feature that separates the classes
    /// with zero within-class variance scores `+inf`.
    pub scores: Vec<f64>,
    /// Feature indices by descending score, ties by lower index.
    pub ranking: Vec<usize>,
}

impl FeatureScores {
    pub fn new(method: ScoreMethod, scores: Vec<f64>) -> Self {
        let mut ranking: Vec<usize> = (0..scores.len()).collect();
        ranking.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        Self {
            method,
            scores,
            ranking,
        }
    }
}

/// One-way ANOVA F statistic per feature.
pub fn anova_f_scores(x: ArrayView2<f64>, y: &[usize]) -> Result<FeatureScores> {
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
    if classes.len() < 2 {
        return Err(Error::SingleClass {
            found: classes.len(),
        });
    }
    let groups: Vec<Vec<usize>> = classes
        .iter()
        .map(|&c| (0..y.len()).filter(|&i| y[i] == c).collect())
        .collect();
    if let Some(small) = groups.iter().position(|g| g.len() < 2) {
        return Err(Error::InvalidArgument(format!(
            "class {} has fewer than 2 samples",
            classes[small]
        )));
    }
    let n = x.nrows() as f64;
    let g = groups.len() as f64;
    let scores = x
        .columns()
        .into_iter()
        .map(|col| {
            let first = col[0];
            if col.iter().all(|&v| v == first) {
                return 0.0;
            }
            let grand = col.sum() / n;
            let mut between = 0.0;
            let mut within = 0.0;
            let mut all_constant = true;
            for rows in &groups {
                let m = rows.iter().map(|&i| col[i]).sum::<f64>() / rows.len() as f64;
                between += rows.len() as f64 * (m - grand).powi(2);
                within += rows.iter().map(|&i| (col[i] - m).powi(2)).sum::<f64>();
                let v0 = col[rows[0]];
                all_constant &= rows.iter().all(|&i| col[i] == v0);
            }
            if all_constant {
                // the column is not constant overall, so class means differ
                return f64::INFINITY;
            }
            (between / (g - 1.0)) / (within / (n - g))
        })
        .collect();
    Ok(FeatureScores::new(ScoreMethod::AnovaF, scores))
}

/// Indices (ascending) of the `k` best-ranked features.
pub fn select_k_best(scores: &FeatureScores, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > scores.scores.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 1..={}",
            scores.scores.len()
        )));
    }
    let mut chosen = scores.ranking[..k].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

/// Number of features scoring strictly above the median, at least 1. For an
/// even count the lower of the two middle values is the median, so a pair of
/// infinite scores cannot swallow the cut.
pub fn above_median_count(scores: &FeatureScores) -> usize {
    let mut sorted = scores.scores.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.is_empty() {
        return 0;
    }
    let median = sorted[(sorted.len() - 1) / 2];
    sorted.iter().filter(|&&s| s > median).count().max(1)
}

/// Normalized total impurity decrease per feature over `n_trees` fully grown
/// extremely randomized trees. Each node draws √d candidate features (among
/// those not constant in the node) with one uniform threshold each and keeps
/// the best.
pub fn extra_trees_importance(
    x: ArrayView2<f64>,
    y: &[usize],
    n_trees: usize,
    seed: u64,
    criterion: Criterion,
) -> Result<FeatureScores> {
    if x.nrows() != y.len() {
        return Err(Error::Shape(format!(
            "{} rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    if x.nrows() < 2 {
        return Err(Error::InvalidArgument("need at least 2 rows".into()));
    }
    if n_trees == 0 {
        return Err(Error::InvalidArgument("n_trees must be at least 1".into()));
    }
    let mut classes = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass {
            found: classes.len(),
        });
    }
    let y_idx: Vec<usize> = y
        .iter()
        .map(|c| classes.binary_search(c).expect("class present"))
        .collect();
    let d = x.ncols();
    let n_candidates = ((d as f64).sqrt().floor() as usize).max(1);

    let per_tree: Vec<Vec<f64>> = (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut builder = RandomTreeBuilder {
                x,
                y: &y_idx,
                n_classes: classes.len(),
                n_candidates,
                criterion,
                total: x.nrows() as f64,
                rng: seed::rng(seed::derive(seed, &["extra_tree".into(), t.into()])),
                importance: vec![0.0; d],
            };
            let rows: Vec<usize> = (0..x.nrows()).collect();
            builder.grow(&rows);
            builder.importance
        })
        .collect();

    let mut total = vec![0.0; d];
    for tree in &per_tree {
        for (acc, v) in total.iter_mut().zip(tree) {
            *acc += v;
        }
    }
    let sum: f64 = total.iter().sum();
    if sum > 0.0 {
        for v in &mut total {
            *v /= sum;
        }
    }
    Ok(FeatureScores::new(ScoreMethod::ExtraTrees, total))
}

struct RandomTreeBuilder<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [usize],
    n_classes: usize,
    n_candidates: usize,
    criterion: Criterion,
    total: f64,
    rng: ChaCha8Rng,
    importance: Vec<f64>,
}

impl RandomTreeBuilder<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n_classes];
        for &r in rows {
            c[self.y[r]] += 1;
        }
        c
    }

    fn grow(&mut self, rows: &[usize]) {
        let counts = self.counts(rows);
        if rows.len() < 2 || counts.iter().filter(|&&c| c > 0).count() < 2 {
            return;
        }
        let parent = impurity(self.criterion, &counts);
        let mut features: Vec<usize> = (0..self.x.ncols()).collect();
        features.shuffle(&mut self.rng);

        let mut best: Option<(usize, f64, f64)> = None;
        let mut drawn = 0;
        for f in features {
            if drawn == self.n_candidates {
                break;
            }
            let (lo, hi) = rows
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                    let v = self.x[[r, f]];
                    (lo.min(v), hi.max(v))
                });
            if lo == hi {
                continue;
            }
            drawn += 1;
            let threshold = self.rng.random_range(lo..hi);
            let mut left = vec![0; self.n_classes];
            let mut n_left = 0;
            for &r in rows {
                if self.x[[r, f]] <= threshold {
                    left[self.y[r]] += 1;
                    n_left += 1;
                }
            }
            let right: Vec<usize> = counts.iter().zip(&left).map(|(p, l)| p - l).collect();
            let n = rows.len() as f64;
            let child = (n_left as f64 * impurity(self.criterion, &left)
                + (n - n_left as f64) * impurity(self.criterion, &right))
                / n;
            let gain = (parent - child).max(0.0);
            if best.is_none_or(|(_, _, g)| gain > g) {
                best = Some((f, threshold, gain));
            }
        }
        let Some((feature, threshold, gain)) = best else {
            return;
        };
        self.importance[feature] += rows.len() as f64 / self.total * gain;
        let (left, right): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x[[r, feature]] <= threshold);
        self.grow(&left);
        self.grow(&right);
    }
}

/// Which selector runs inside each training fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorChoice {
    None,
    #[default]
    Kbest,
    ExtraTrees,
    /// k-best first, then extra-trees importances on the survivors.
    Both,
}

impl fmt::Display for SelectorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectorChoice::None => "none",
            SelectorChoice::Kbest => "kbest",
            SelectorChoice::ExtraTrees => "extra_trees",
            SelectorChoice::Both => "both",
        })
    }
}

impl FromStr for SelectorChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(SelectorChoice::None),
            "kbest" => Ok(SelectorChoice::Kbest),
            "extra_trees" => Ok(SelectorChoice::ExtraTrees),
            "both" => Ok(SelectorChoice::Both),
            other => Err(Error::Config(format!(
                "unknown selector '{other}'; expected none, kbest, extra_trees or both"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorParams {
    pub choice: SelectorChoice,
    /// Features kept by k-best; `None` keeps those above the median score.
    pub k: Option<usize>,
    pub n_trees: usize,
    pub criterion: Criterion,
}

impl Default for SelectorParams {
    fn default() -> Self {
        Self {
            choice: SelectorChoice::Kbest,
            k: None,
            n_trees: 100,
            criterion: Criterion::Gini,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// Kept feature indices (ascending, relative to the input matrix).
    pub selected: Vec<usize>,
    pub scores: Vec<FeatureScores>,
}

/// Fit the configured selector on training rows.
pub fn fit_selector(
    params: &SelectorParams,
    x: ArrayView2<f64>,
    y: &[usize],
    seed: u64,
) -> Result<Selection> {
    let all: Vec<usize> = (0..x.ncols()).collect();
    let kbest = |x: ArrayView2<f64>| -> Result<(Vec<usize>, FeatureScores)> {
        let scores = anova_f_scores(x, y)?;
        let k = params
            .k
            .unwrap_or_else(|| above_median_count(&scores))
            .min(x.ncols());
        Ok((select_k_best(&scores, k)?, scores))
    };
    let trees = |x: ArrayView2<f64>| -> Result<(Vec<usize>, FeatureScores)> {
        let scores = extra_trees_importance(x, y, params.n_trees, seed, params.criterion)?;
        let k = above_median_count(&scores);
        Ok((select_k_best(&scores, k)?, scores))
    };
    match params.choice {
        SelectorChoice::None => Ok(Selection {
            selected: all,
            scores: Vec::new(),
        }),
        SelectorChoice::Kbest => {
            let (selected, scores) = kbest(x)?;
            Ok(Selection {
                selected,
                scores: vec![scores],
            })
        }
        SelectorChoice::ExtraTrees => {
            let scores = extra_trees_importance(x, y, params.n_trees, seed, params.criterion)?;
            let k = params
                .k
                .unwrap_or_else(|| above_median_count(&scores))
                .min(x.ncols());
            Ok(Selection {
                selected: select_k_best(&scores, k)?,
                scores: vec![scores],
            })
        }
        SelectorChoice::Both => {
            let (first, f_scores) = kbest(x)?;
            let sub = x.select(ndarray::Axis(1), &first);
            let (second, t_scores) = trees(sub.view())?;
            Ok(Selection {
                selected: second.into_iter().map(|i| first[i]).collect(),
                scores: vec![f_scores, t_scores],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};

    #[test]
    fn label_copy_scores_highest() {
        // six rows: feature 0 equals the label, feature 1 is partly informative
        let x = array![
            [0.0, 1.0],
            [0.0, 2.0],
            [0.0, 3.0],
            [1.0, 3.0],
            [1.0, 4.0],
            [1.0, 5.0]
        ];
        let y = [0, 0, 0, 1, 1, 1];
        let s = anova_f_scores(x.view(), &y).unwrap();
        assert_eq!(s.scores[0], f64::INFINITY);
        // by hand: means 2 and 4, grand 3; SSB = 3·1 + 3·1 = 6, SSW = 2 + 2 = 4
        // F = (6 / 1) / (4 / 4) = 6
        assert_relative_eq!(s.scores[1], 6.0, max_relative = 1e-12);
        assert_eq!(s.ranking, vec![0, 1]);
    }

    #[test]
    fn constant_feature_scores_zero() {
        let x = array![[0.1, 1.0], [0.1, 2.0], [0.1, 3.0], [0.1, 4.0]];
        let s = anova_f_scores(x.view(), &[0, 0, 1, 1]).unwrap();
        assert_eq!(s.scores[0], 0.0);
    }

    #[test]
    fn too_few_per_class() {
        let x = array![[0.0], [1.0], [2.0]];
        assert!(anova_f_scores(x.view(), &[0, 0, 1]).is_err());
        assert!(anova_f_scores(x.view(), &[1, 1, 1]).is_err());
    }

    #[test]
    fn k_best_rules() {
        let s = FeatureScores::new(ScoreMethod::AnovaF, vec![0.1, 9.0, 3.0]);
        assert_eq!(select_k_best(&s, 2).unwrap(), vec![1, 2]);
        assert_eq!(select_k_best(&s, 3).unwrap(), vec![0, 1, 2]);
        let tied = FeatureScores::new(ScoreMethod::AnovaF, vec![5.0, 5.0, 1.0]);
        assert_eq!(select_k_best(&tied, 1).unwrap(), vec![0]);
        assert!(select_k_best(&s, 0).is_err());
        assert!(select_k_best(&s, 4).is_err());
    }

    #[test]
    fn above_median_default() {
        let s = FeatureScores::new(
            ScoreMethod::AnovaF,
            vec![1.0, f64::INFINITY, 2.0, f64::INFINITY],
        );
        assert_eq!(above_median_count(&s), 2);
        let s = FeatureScores::new(ScoreMethod::AnovaF, vec![1.0, 2.0, 3.0]);
        assert_eq!(above_median_count(&s), 1);
        let flat = FeatureScores::new(ScoreMethod::AnovaF, vec![4.0; 5]);
        assert_eq!(above_median_count(&flat), 1);
    }

    fn planted(n: usize, d: usize, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = crate::seed::rng(seed);
        let x = Array2::from_shape_fn((n, d), |_| rng.random::<f64>());
        let y = x.column(0).iter().map(|&v| usize::from(v > 0.5)).collect();
        (x, y)
    }

    #[test]
    fn extra_trees_finds_planted_feature() {
        let (x, y) = planted(80, 5, 1);
        let s = extra_trees_importance(x.view(), &y, 50, 7, Criterion::Gini).unwrap();
        assert_eq!(s.ranking[0], 0);
        assert_relative_eq!(s.scores.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn extra_trees_deterministic_and_rejects_single_class() {
        let (x, y) = planted(40, 4, 2);
        let a = extra_trees_importance(x.view(), &y, 20, 3, Criterion::Entropy).unwrap();
        let b = extra_trees_importance(x.view(), &y, 20, 3, Criterion::Entropy).unwrap();
        assert_eq!(a, b);
        assert!(extra_trees_importance(x.view(), &vec![1; 40], 5, 0, Criterion::Gini).is_err());
    }

    #[test]
    fn selector_choices() {
        let (x, y) = planted(60, 6, 4);
        let none = fit_selector(
            &SelectorParams {
                choice: SelectorChoice::None,
                ..SelectorParams::default()
            },
            x.view(),
            &y,
            0,
        )
        .unwrap();
        assert_eq!(none.selected, vec![0, 1, 2, 3, 4, 5]);
        assert!(none.scores.is_empty());
        let kb = fit_selector(&SelectorParams::default(), x.view(), &y, 0).unwrap();
        assert_eq!(kb.selected.len(), 3);
        assert!(kb.selected.contains(&0));
        let both = fit_selector(
            &SelectorParams {
                choice: SelectorChoice::Both,
                ..SelectorParams::default()
            },
            x.view(),
            &y,
            0,
        )
        .unwrap();
        assert!(both.selected.contains(&0));
        assert!(both.selected.iter().all(|i| kb.selected.contains(i)));
        assert_eq!(both.scores.len(), 2);
    }
}
