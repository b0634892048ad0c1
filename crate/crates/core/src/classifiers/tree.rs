//! Greedy binary decision trees (entropy or Gini impurity).

use std::fmt;
use std::str::FromStr;

use ndarray::{ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::{check_fit_inputs, check_width, distinct_classes};
use crate::error::{Error, Result};

/// Splits whose impurity decrease does not exceed this are rejected.
pub const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Entropy,
    Gini,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Entropy => "entropy",
            Criterion::Gini => "gini",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Criterion::Entropy),
            "gini" => Ok(Criterion::Gini),
            other => Err(Error::InvalidArgument(format!(
                "unknown criterion '{other}'"
            ))),
        }
    }
}

fn check_proportions(p: &[f64]) -> Result<()> {
    if p.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "proportions must be non-negative".into(),
        ));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "proportions sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Shannon entropy in bits, with 0 · log 0 = 0.
pub fn entropy(p: &[f64]) -> Result<f64> {
    check_proportions(p)?;
    Ok(entropy_unchecked(p))
}

pub fn gini(p: &[f64]) -> Result<f64> {
    check_proportions(p)?;
    Ok(gini_unchecked(p))
}

fn entropy_unchecked(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

fn gini_unchecked(p: &[f64]) -> f64 {
    1.0 - p.iter().map(|v| v * v).sum::<f64>()
}

/// Impurity of a node given its per-class counts.
pub fn impurity(criterion: Criterion, counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    match criterion {
        Criterion::Entropy => entropy_unchecked(&p),
        Criterion::Gini => gini_unchecked(&p),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub criterion: Criterion,
    /// `None` grows until the other stopping rules apply.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            criterion: Criterion::Gini,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        n_samples: usize,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        class: usize,
        /// Class proportions, in `DecisionTree::classes` order.
        proportions: Vec<f64>,
        n_samples: usize,
    },
}

impl TreeNode {
    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    pub fn n_samples(&self) -> usize {
        match self {
            TreeNode::Leaf { n_samples, .. } | TreeNode::Split { n_samples, .. } => *n_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub classes: Vec<usize>,
    pub n_features: usize,
    pub root: TreeNode,
}

/// Best split of a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Exhaustive search over every feature and every midpoint between
/// consecutive distinct values. Returns the split with the largest impurity
/// decrease; equal gains keep the lower feature index, then the lower
/// threshold.
pub fn best_split(
    x: ArrayView2<f64>,
    y_idx: &[usize],
    rows: &[usize],
    n_classes: usize,
    criterion: Criterion,
    min_samples_leaf: usize,
) -> Option<SplitChoice> {
    let n = rows.len();
    let mut parent = vec![0usize; n_classes];
    for &r in rows {
        parent[y_idx[r]] += 1;
    }
    let parent_impurity = impurity(criterion, &parent);
    let mut best: Option<SplitChoice> = None;
    let mut sorted = rows.to_vec();
    for feature in 0..x.ncols() {
        sorted.sort_by(|&a, &b| x[[a, feature]].total_cmp(&x[[b, feature]]).then(a.cmp(&b)));
        let mut left = vec![0usize; n_classes];
        for i in 0..n - 1 {
            left[y_idx[sorted[i]]] += 1;
            let here = x[[sorted[i], feature]];
            let next = x[[sorted[i + 1], feature]];
            if here == next {
                continue;
            }
            let n_left = i + 1;
            let n_right = n - n_left;
            if n_left < min_samples_leaf || n_right < min_samples_leaf {
                continue;
            }
            let right: Vec<usize> = parent.iter().zip(&left).map(|(p, l)| p - l).collect();
            let child = (n_left as f64 * impurity(criterion, &left)
                + n_right as f64 * impurity(criterion, &right))
                / n as f64;
            let gain = parent_impurity - child;
            if gain > MIN_GAIN && best.is_none_or(|b| gain > b.gain) {
                let mut threshold = 0.5 * (here + next);
                if threshold >= next {
                    threshold = here;
                }
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

pub fn fit_tree(x: ArrayView2<f64>, y: &[usize], params: &TreeParams) -> Result<DecisionTree> {
    check_fit_inputs(x, y)?;
    if params.min_samples_leaf == 0 {
        return Err(Error::InvalidArgument(
            "min_samples_leaf must be at least 1".into(),
        ));
    }
    let classes = distinct_classes(y);
    let y_idx: Vec<usize> = y
        .iter()
        .map(|c| classes.binary_search(c).expect("class present"))
        .collect();
    let rows: Vec<usize> = (0..x.nrows()).collect();
    let root = grow(x, &y_idx, &rows, classes.len(), params, 0);
    Ok(DecisionTree {
        classes,
        n_features: x.ncols(),
        root,
    })
}

fn leaf(y_idx: &[usize], rows: &[usize], n_classes: usize) -> TreeNode {
    let mut counts = vec![0usize; n_classes];
    for &r in rows {
        counts[y_idx[r]] += 1;
    }
    let mut majority = 0;
    for c in 1..n_classes {
        if counts[c] > counts[majority] {
            majority = c;
        }
    }
    TreeNode::Leaf {
        class: majority,
        proportions: counts
            .iter()
            .map(|&c| c as f64 / rows.len() as f64)
            .collect(),
        n_samples: rows.len(),
    }
}

fn grow(
    x: ArrayView2<f64>,
    y_idx: &[usize],
    rows: &[usize],
    n_classes: usize,
    params: &TreeParams,
    depth: usize,
) -> TreeNode {
    let first = y_idx[rows[0]];
    let pure = rows.iter().all(|&r| y_idx[r] == first);
    let depth_reached = params.max_depth.is_some_and(|d| depth >= d);
    if pure || depth_reached || rows.len() < params.min_samples_split.max(2) {
        return leaf(y_idx, rows, n_classes);
    }
    let Some(split) = best_split(
        x,
        y_idx,
        rows,
        n_classes,
        params.criterion,
        params.min_samples_leaf,
    ) else {
        return leaf(y_idx, rows, n_classes);
    };
    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .iter()
        .partition(|&&r| x[[r, split.feature]] <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        gain: split.gain,
        n_samples: rows.len(),
        left: Box::new(grow(x, y_idx, &left_rows, n_classes, params, depth + 1)),
        right: Box::new(grow(x, y_idx, &right_rows, n_classes, params, depth + 1)),
    }
}

/// Route `x` to a leaf (left iff `x[feature] <= threshold`) and return its
/// class label.
pub fn tree_predict(tree: &DecisionTree, x: ArrayView1<f64>) -> Result<usize> {
    check_width(tree.n_features, x.len())?;
    let mut node = &tree.root;
    loop {
        match node {
            TreeNode::Leaf { class, .. } => return Ok(tree.classes[*class]),
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                node = if x[*feature] <= *threshold {
                    left
                } else {
                    right
                };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn impurity_values() {
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(gini(&[1.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(entropy(&[0.5, 0.5]).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gini(&[0.5, 0.5]).unwrap(), 0.5, epsilon = 1e-12);
        let expected = -0.25 * 0.25f64.log2() - 0.75 * 0.75f64.log2();
        assert_abs_diff_eq!(entropy(&[0.25, 0.75]).unwrap(), expected, epsilon = 1e-15);
        assert_abs_diff_eq!(expected, 0.8113, epsilon = 1e-4);
    }

    #[test]
    fn proportions_must_sum_to_one() {
        assert!(entropy(&[0.5, 0.4]).is_err());
        assert!(gini(&[1.2, -0.2]).is_err());
    }

    #[test]
    fn four_point_split() {
        let x = array![[1.0], [2.0], [8.0], [9.0]];
        let y = [0, 0, 1, 1];
        for criterion in [Criterion::Entropy, Criterion::Gini] {
            let t = fit_tree(
                x.view(),
                &y,
                &TreeParams {
                    criterion,
                    ..TreeParams::default()
                },
            )
            .unwrap();
            assert_eq!(t.root.depth(), 1);
            match &t.root {
                TreeNode::Split { threshold, .. } => assert!(*threshold > 2.0 && *threshold < 8.0),
                leaf => panic!("expected a split, got {leaf:?}"),
            }
            for (row, &label) in x.rows().into_iter().zip(&y) {
                assert_eq!(tree_predict(&t, row).unwrap(), label);
            }
        }
    }

    #[test]
    fn pure_and_unsplittable_become_leaves() {
        let t = fit_tree(array![[1.0], [5.0]].view(), &[1, 1], &TreeParams::default()).unwrap();
        assert_eq!(t.root.n_leaves(), 1);
        assert_eq!(tree_predict(&t, array![100.0].view()).unwrap(), 1);

        let same = array![[3.0, 3.0], [3.0, 3.0], [3.0, 3.0]];
        let t = fit_tree(same.view(), &[0, 1, 1], &TreeParams::default()).unwrap();
        assert_eq!(t.root.n_leaves(), 1);
        assert_eq!(tree_predict(&t, array![0.0, 0.0].view()).unwrap(), 1);
    }

    #[test]
    fn routing_rule() {
        let tree = DecisionTree {
            classes: vec![0, 1],
            n_features: 1,
            root: TreeNode::Split {
                feature: 0,
                threshold: 5.0,
                gain: 1.0,
                n_samples: 2,
                left: Box::new(TreeNode::Leaf {
                    class: 0,
                    proportions: vec![1.0, 0.0],
                    n_samples: 1,
                }),
                right: Box::new(TreeNode::Leaf {
                    class: 1,
                    proportions: vec![0.0, 1.0],
                    n_samples: 1,
                }),
            },
        };
        assert_eq!(tree_predict(&tree, array![4.0].view()).unwrap(), 0);
        assert_eq!(tree_predict(&tree, array![5.0].view()).unwrap(), 0);
        assert_eq!(tree_predict(&tree, array![5.5].view()).unwrap(), 1);
    }

    #[test]
    fn depth_and_leaf_limits() {
        let x = array![[1.0], [2.0], [3.0], [4.0], [5.0], [6.0]];
        let y = [0, 1, 0, 1, 0, 1];
        let stump = fit_tree(
            x.view(),
            &y,
            &TreeParams {
                max_depth: Some(1),
                ..TreeParams::default()
            },
        )
        .unwrap();
        assert!(stump.root.depth() <= 1);
        let wide = fit_tree(
            x.view(),
            &y,
            &TreeParams {
                min_samples_leaf: 3,
                ..TreeParams::default()
            },
        )
        .unwrap();
        fn min_leaf(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { n_samples, .. } => *n_samples,
                TreeNode::Split { left, right, .. } => min_leaf(left).min(min_leaf(right)),
            }
        }
        assert!(min_leaf(&wide.root) >= 3);
    }
}
