use std::collections::BTreeSet;

use ndarray::{Array1, Array2};
use proptest::prelude::*;

use tabclf::classifiers::{
    fit_gaussian_nb, fit_tree, gnb_predict, tree_predict, Criterion, GaussianNbParams, TreeNode,
    TreeParams,
};
use tabclf::data::{
    apply_scaler, continuous_columns, encode_categoricals, fit_scaler, generate_synthetic,
    label_success, select_group, Category, Column, ColumnKind, ColumnSpec, GroupId, Signal,
    SyntheticSpec, Table,
};
use tabclf::evaluation::{
    aggregate_group_stats, confusion, f1, kfold_plan, F1Average, ScoreMatrix,
};
use tabclf::feature_selection::{
    anova_f_scores, extra_trees_importance, select_k_best, FeatureScores, ScoreMethod,
};
use tabclf::resampling::{random_oversample, smote};

fn matrix(n: usize, d: usize) -> impl Strategy<Value = Array2<f64>> {
    prop::collection::vec(-50.0f64..50.0, n * d)
        .prop_map(move |v| Array2::from_shape_vec((n, d), v).unwrap())
}

fn labelled(max_n: usize, max_d: usize) -> impl Strategy<Value = (Array2<f64>, Vec<usize>)> {
    (4..=max_n, 1..=max_d).prop_flat_map(|(n, d)| {
        (
            matrix(n, d),
            prop::collection::vec(0usize..2, n).prop_map(|mut y| {
                y[0] = 0;
                y[1] = 1;
                y
            }),
        )
    })
}

fn categories() -> impl Strategy<Value = Category> {
    prop::sample::select(Category::FEATURE_CATEGORIES.to_vec())
}

/// A table with random feature categories and kinds.
fn random_table() -> impl Strategy<Value = Table> {
    (
        3usize..12,
        prop::collection::vec((categories(), 0u8..3), 1..10),
    )
        .prop_flat_map(|(n, cols)| {
            let cells = prop::collection::vec(prop::collection::vec(0u8..4, n), cols.len());
            (Just(n), Just(cols), cells, prop::collection::vec(0u8..2, n))
        })
        .prop_map(|(_, cols, cells, y)| {
            let mut schema = Vec::new();
            let mut columns = Vec::new();
            for (i, ((cat, kind), values)) in cols.iter().zip(cells).enumerate() {
                let name = format!("f{i}");
                match kind {
                    0 => {
                        schema.push(ColumnSpec::new(name, ColumnKind::Categorical, *cat));
                        columns.push(Column::Text(
                            values
                                .iter()
                                .map(|v| ["zeta", "alpha", "Beta", "é"][*v as usize].to_string())
                                .collect(),
                        ));
                    }
                    1 => {
                        schema.push(ColumnSpec::new(name, ColumnKind::Binary, *cat));
                        columns.push(Column::Numeric(
                            values.iter().map(|v| (v % 2) as f64).collect(),
                        ));
                    }
                    _ => {
                        schema.push(ColumnSpec::new(name, ColumnKind::Continuous, *cat));
                        columns.push(Column::Numeric(
                            values.iter().map(|v| *v as f64 * 1.7 - 3.0).collect(),
                        ));
                    }
                }
            }
            schema.push(ColumnSpec::new(
                "success",
                ColumnKind::Binary,
                Category::Outcome,
            ));
            columns.push(Column::Numeric(y.iter().map(|&v| v as f64).collect()));
            Table::new(schema, columns).unwrap()
        })
}

fn feature_set(t: &Table, g: GroupId) -> BTreeSet<String> {
    select_group(t, &g.spec())
        .map(|s| s.feature_names().into_iter().collect())
        .unwrap_or_default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // data model

    #[test]
    fn encode_round_trip(t in random_table()) {
        let (encoded, map) = encode_categoricals(&t);
        for (i, spec) in t.schema().iter().enumerate() {
            if let Column::Text(raw) = t.column(i) {
                let codes = encoded.column(i).as_numeric().unwrap();
                for (r, c) in raw.iter().zip(codes) {
                    prop_assert_eq!(map.decode(&spec.name, *c as usize), Some(r.as_str()));
                }
            }
        }
    }

    #[test]
    fn group_vii_is_union(t in random_table()) {
        let union: BTreeSet<String> = [GroupId::I, GroupId::II, GroupId::III]
            .iter()
            .flat_map(|&g| feature_set(&t, g))
            .collect();
        prop_assert_eq!(feature_set(&t, GroupId::VII), union);
    }

    #[test]
    fn scaled_columns_are_standard(t in random_table()) {
        let (t, _) = encode_categoricals(&t);
        let cols = continuous_columns(&t);
        let params = fit_scaler(&t, &cols).unwrap();
        let scaled = apply_scaler(&t, &params).unwrap();
        for s in params.columns.iter().filter(|s| s.spread > 0.0) {
            let v = scaled.column(scaled.column_index(&s.name).unwrap()).as_numeric().unwrap();
            let n = v.len() as f64;
            let m = v.iter().sum::<f64>() / n;
            let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            prop_assert!(m.abs() < 1e-9);
            prop_assert!((sd - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn label_monotone(h in 1.4f64..2.1, extra in 1.0f64..80.0, a in 0.0f64..1.2, b in 0.0f64..1.2) {
        let ideal = 25.0 * h * h;
        let initial = ideal + extra;
        let (hi, lo) = (initial - extra * a.min(b), initial - extra * a.max(b));
        if lo > 0.0 {
            prop_assert!(label_success(h, initial, lo).unwrap() >= label_success(h, initial, hi).unwrap());
        }
    }

    #[test]
    fn synthetic_is_deterministic(seed in any::<u64>(), n in 6usize..40) {
        let spec = SyntheticSpec { n_rows: n, ..SyntheticSpec::clinical_like(seed, Signal::Noisy) };
        let (mut a, mut b) = (Vec::new(), Vec::new());
        generate_synthetic(&spec).unwrap().write_csv(&mut a).unwrap();
        generate_synthetic(&spec).unwrap().write_csv(&mut b).unwrap();
        prop_assert_eq!(a, b);
    }

    // resampling

    #[test]
    fn smote_stays_between_neighbours((x, y) in labelled(30, 4), seed in any::<u64>(), k in 1usize..6) {
        let (xo, yo) = smote(x.view(), &y, k, seed).unwrap();
        let ones = yo.iter().filter(|&&c| c == 1).count();
        prop_assert_eq!(ones * 2, yo.len());
        let minority_label = yo[yo.len() - 1];
        let minority: Vec<usize> = (0..y.len()).filter(|&i| y[i] == minority_label).collect();
        for i in y.len()..yo.len() {
            let s = xo.row(i);
            // some pair of minority rows brackets every coordinate
            let ok = minority.iter().any(|&a| minority.iter().any(|&b| {
                (0..s.len()).all(|j| {
                    let (lo, hi) = (x[[a, j]].min(x[[b, j]]), x[[a, j]].max(x[[b, j]]));
                    s[j] >= lo - 1e-9 && s[j] <= hi + 1e-9
                })
            }));
            prop_assert!(ok);
        }
    }

    #[test]
    fn random_over_keeps_originals((x, y) in labelled(30, 3), seed in any::<u64>()) {
        let (xo, yo) = random_oversample(x.view(), &y, seed).unwrap();
        prop_assert_eq!(xo.slice(ndarray::s![..x.nrows(), ..]), x.view());
        prop_assert_eq!(&yo[..y.len()], &y[..]);
        let majority = if y.iter().filter(|&&c| c == 1).count() * 2 >= y.len() { 1 } else { 0 };
        let before = y.iter().filter(|&&c| c == majority).count();
        let after = yo.iter().filter(|&&c| c == majority).count();
        prop_assert_eq!(before, after);
    }

    // classifiers

    #[test]
    fn gnb_posteriors_sum_to_one((x, y) in labelled(30, 5), q in prop::collection::vec(-60.0f64..60.0, 5)) {
        let s = fit_gaussian_nb(x.view(), &y, &GaussianNbParams::default()).unwrap();
        let q = Array1::from(q[..x.ncols()].to_vec());
        let (_, post) = gnb_predict(&s, q.view()).unwrap();
        prop_assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tree_splits_have_positive_gain((x, y) in labelled(40, 4), entropy in any::<bool>()) {
        let criterion = if entropy { Criterion::Entropy } else { Criterion::Gini };
        let t = fit_tree(x.view(), &y, &TreeParams { criterion, ..TreeParams::default() }).unwrap();
        fn walk(n: &TreeNode) -> Result<(), TestCaseError> {
            if let TreeNode::Split { gain, n_samples, left, right, .. } = n {
                prop_assert!(*gain > 0.0);
                prop_assert_eq!(left.n_samples() + right.n_samples(), *n_samples);
                walk(left)?;
                walk(right)?;
            }
            Ok(())
        }
        walk(&t.root)?;
    }

    #[test]
    fn tree_is_monotone_invariant((x, y) in labelled(30, 3)) {
        // strictly increasing per-feature maps
        let map = |v: f64, j: usize| match j % 3 {
            0 => v.powi(3) + 2.0 * v,
            1 => (v / 10.0).exp(),
            _ => 3.0 * v - 7.0,
        };
        let mapped = Array2::from_shape_fn(x.dim(), |(i, j)| map(x[[i, j]], j));
        let a = fit_tree(x.view(), &y, &TreeParams::default()).unwrap();
        let b = fit_tree(mapped.view(), &y, &TreeParams::default()).unwrap();
        fn features(n: &TreeNode, out: &mut Vec<usize>) {
            if let TreeNode::Split { feature, left, right, .. } = n {
                out.push(*feature);
                features(left, out);
                features(right, out);
            }
        }
        let (mut fa, mut fb) = (Vec::new(), Vec::new());
        features(&a.root, &mut fa);
        features(&b.root, &mut fb);
        prop_assert_eq!(fa, fb);
        for (row, m) in x.rows().into_iter().zip(mapped.rows()) {
            prop_assert_eq!(tree_predict(&a, row).unwrap(), tree_predict(&b, m).unwrap());
        }
    }

    // feature selection

    #[test]
    fn k_best_nests(scores in prop::collection::vec(prop::sample::select(vec![0.0, 1.0, 2.5, 2.5, 7.0, f64::INFINITY]), 1..12)) {
        let s = FeatureScores::new(ScoreMethod::AnovaF, scores.clone());
        for k in 1..scores.len() {
            let a: BTreeSet<usize> = select_k_best(&s, k).unwrap().into_iter().collect();
            let b: BTreeSet<usize> = select_k_best(&s, k + 1).unwrap().into_iter().collect();
            prop_assert!(a.is_subset(&b));
        }
    }

    #[test]
    fn anova_is_affine_invariant((x, y) in labelled(30, 3), scale in 0.1f64..20.0, shift in -100.0f64..100.0, neg in any::<bool>()) {
        let a = if neg { -scale } else { scale };
        let z = x.mapv(|v| a * v + shift);
        let (s1, s2) = (anova_f_scores(x.view(), &y), anova_f_scores(z.view(), &y));
        if let (Ok(s1), Ok(s2)) = (s1, s2) {
            for (p, q) in s1.scores.iter().zip(&s2.scores) {
                if p.is_finite() && *p > 1e-6 {
                    prop_assert!((p - q).abs() <= 1e-6 * p.abs().max(1.0), "{} vs {}", p, q);
                }
            }
        }
    }

    #[test]
    fn extra_trees_deterministic((x, y) in labelled(25, 4), seed in any::<u64>()) {
        let a = extra_trees_importance(x.view(), &y, 10, seed, Criterion::Gini).unwrap();
        let b = extra_trees_importance(x.view(), &y, 10, seed, Criterion::Gini).unwrap();
        prop_assert_eq!(a, b);
    }

    // evaluation

    #[test]
    fn f1_bounds_and_permutation(pairs in prop::collection::vec((0usize..2, 0usize..2), 1..60), rot in 0usize..60) {
        let (t, p): (Vec<usize>, Vec<usize>) = pairs.iter().copied().unzip();
        let v = f1(&t, &p, F1Average::Binary).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        let cm = confusion(&t, &p, 1).unwrap();
        prop_assert_eq!(cm.total(), t.len());
        prop_assert_eq!(v == 1.0, cm.fp == 0 && cm.fn_ == 0 && cm.tp > 0);
        let mut shuffled = pairs.clone();
        shuffled.rotate_left(rot % pairs.len());
        shuffled.reverse();
        let (t2, p2): (Vec<usize>, Vec<usize>) = shuffled.into_iter().unzip();
        prop_assert_eq!(f1(&t2, &p2, F1Average::Binary).unwrap(), v);
    }

    #[test]
    fn folds_partition(n in 2usize..200, k in 2usize..20, seed in any::<u64>(), strat in any::<bool>(), ybits in prop::collection::vec(0usize..2, 200)) {
        prop_assume!(k <= n);
        let y = &ybits[..n];
        let plan = kfold_plan(n, k, y, strat, seed).unwrap();
        let mut all: Vec<usize> = plan.folds.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = plan.folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        prop_assert_eq!(plan.clone(), kfold_plan(n, k, y, strat, seed).unwrap());
    }

    #[test]
    fn aggregation_matches_two_pass(col in prop::collection::vec(0.0f64..1.0, 1..20)) {
        let mut m = ScoreMatrix::new((0..col.len()).map(|i| i.to_string()).collect(), vec!["I".into()]);
        m.cells = col.iter().map(|&v| vec![Some(v)]).collect();
        let s = &aggregate_group_stats(&m).unwrap()[0];
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
        prop_assert!((s.mean - mean).abs() <= 1e-12);
        prop_assert!((s.sd - sd).abs() <= 1e-12);
    }
}
