use proptest::prelude::*;

use transboost::boost::{train, update_weights, TransBoostConfig, WeightParams};
use transboost::data::{
    build_bins, load_csv, simulate_sparsity, write_csv, CsvOptions, Dataset, Domain, DomainSource,
};
use transboost::eval::{approval_ratio, auc};
use transboost::tree::{sigmoid, Direction, DualTree, Node};

fn cell() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![
        1 => Just(None),
        4 => (-50i32..50).prop_map(|v| Some(f64::from(v) / 4.0)),
    ]
}

fn dataset(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Dataset> {
    (4..max_rows, 1..max_cols).prop_flat_map(|(n, c)| {
        (
            prop::collection::vec(prop::collection::vec(cell(), c), n),
            prop::collection::vec(0..=1u8, n),
            prop::collection::vec(prop::bool::ANY, n),
        )
            .prop_map(|(rows, labels, is_source)| {
                let domains = is_source
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| match (i, s) {
                        (0, _) => Domain::Source,
                        (1, _) => Domain::Target,
                        (_, true) => Domain::Source,
                        (_, false) => Domain::Target,
                    })
                    .collect();
                Dataset::from_rows(&rows, labels, domains).unwrap()
            })
    })
}

fn has_both_labels(labels: &[u8]) -> bool {
    labels.contains(&0) && labels.contains(&1)
}

/// Walks the node list by hand, independent of the library router.
fn walk(tree: &DualTree, row: &[Option<f64>]) -> usize {
    let mut id = 0;
    loop {
        match &tree.nodes()[id] {
            Node::Leaf { leaf } => return *leaf,
            Node::Split {
                feature,
                cut,
                default,
                left,
                right,
                ..
            } => {
                let go_left = match row[*feature] {
                    Some(v) => v < *cut,
                    None => *default == Direction::Left,
                };
                id = if go_left { *left } else { *right };
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn auc_is_invariant_under_increasing_maps(
        pairs in prop::collection::vec((0..=1u8, -20i32..20), 2..80),
    ) {
        let labels: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        prop_assume!(has_both_labels(&labels));
        let scores: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        let mapped: Vec<f64> = scores.iter().map(|s| (s / 7.0).exp() * 3.0 + 1.0).collect();
        let a = auc(&labels, &scores).unwrap();
        let b = auc(&labels, &mapped).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn flipped_scores_give_complementary_auc(
        pairs in prop::collection::vec((0..=1u8, -20i32..20), 2..80),
    ) {
        let labels: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        prop_assume!(has_both_labels(&labels));
        let scores: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
        let sum = auc(&labels, &scores).unwrap() + auc(&labels, &negated).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn approval_ratio_is_invariant_under_increasing_maps(
        pairs in prop::collection::vec((0..=1u8, -20i32..20), 1..80),
        rate in 0.0f64..1.0,
    ) {
        let labels: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        let scores: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        let mapped: Vec<f64> = scores.iter().map(|s| s * 2.5 + 100.0).collect();
        let a = approval_ratio(&labels, &scores, rate);
        prop_assert_eq!(a, approval_ratio(&labels, &mapped, rate));
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn approval_ratio_matches_prefix_scan(
        pairs in prop::collection::vec((0..=1u8, -5i32..5), 1..60),
        rate in 0.0f64..1.0,
    ) {
        let labels: Vec<u8> = pairs.iter().map(|p| p.0).collect();
        let scores: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by_key(|&i| (pairs[i].1, i));
        let mut best = 0;
        for k in 1..=order.len() {
            let defaults = order[..k].iter().filter(|&&i| labels[i] == 1).count();
            if defaults as f64 / k as f64 <= rate {
                best = k;
            }
        }
        prop_assert_eq!(approval_ratio(&labels, &scores, rate), best as f64 / labels.len() as f64);
    }

    #[test]
    fn csv_round_trip_preserves_everything(ds in dataset(30, 5)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        write_csv(&ds, &path).unwrap();
        let back = load_csv(&path, &CsvOptions::new("label", DomainSource::column("domain"))).unwrap();
        prop_assert_eq!(back, ds);
    }

    #[test]
    fn sparsity_never_restores_missing_cells(ds in dataset(30, 5), keep in 0.0f64..=1.0, seed in any::<u64>()) {
        let sparse = simulate_sparsity(&ds, keep, seed);
        prop_assert_eq!(sparse.labels(), ds.labels());
        prop_assert_eq!(sparse.domains(), ds.domains());
        for r in 0..ds.n_rows() {
            for c in 0..ds.n_cols() {
                match (ds.value(r, c), sparse.value(r, c)) {
                    (None, Some(_)) => prop_assert!(false, "cell ({r}, {c}) came back"),
                    (Some(a), Some(b)) => prop_assert_eq!(a, b),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn bins_respect_their_cuts(ds in dataset(40, 4), max_bins in 2usize..16) {
        let bins = build_bins(&ds, max_bins);
        for f in 0..ds.n_cols() {
            let cuts = bins.cuts(f);
            prop_assert!(cuts.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(bins.n_value_bins(f) <= max_bins.max(1));
            for &v in ds.column(f) {
                let b = bins.bin_of(f, v);
                match v {
                    None => prop_assert_eq!(b, bins.missing_bin(f)),
                    Some(x) => {
                        let below = cuts.iter().filter(|&&c| c <= x).count();
                        prop_assert_eq!(usize::from(b), below);
                    }
                }
            }
        }
    }

    #[test]
    fn weights_follow_leaf_counts(ds in dataset(60, 3), depth in 1usize..4) {
        prop_assume!(has_both_labels(ds.labels()));
        let config = TransBoostConfig { n_rounds: 1, max_depth: depth, ..Default::default() };
        let model = train(&ds, &config).unwrap();
        let tree = &model.trees[0];
        let main = vec![0.5; ds.n_rows()];
        let w = update_weights(&ds, tree, &main, &main, &WeightParams::raw(), 1);

        let mut n_t = vec![0.0; tree.n_leaves()];
        let mut n_s = vec![0.0; tree.n_leaves()];
        for r in 0..ds.n_rows() {
            let l = walk(tree, &ds.row_values(r));
            match ds.domains()[r] {
                Domain::Target => n_t[l] += 1.0,
                Domain::Source => n_s[l] += 1.0,
            }
        }
        let (tot_t, tot_s): (f64, f64) = (n_t.iter().sum(), n_s.iter().sum());
        let sources = ds.indices_of(Domain::Source);
        prop_assert_eq!(w.marginal.len(), sources.len());
        let mut total = 0.0;
        for (k, &r) in sources.iter().enumerate() {
            let l = walk(tree, &ds.row_values(r));
            let expected = n_t[l] * tot_s / (n_s[l] * tot_t);
            prop_assert!((w.marginal[k] - expected).abs() <= 1e-12 * expected.max(1.0));
            prop_assert!((w.conditional[k] - 1.0).abs() < 1e-15);
            total += w.marginal[k];
        }
        // Leaves without source rows drop their target mass.
        let covered: f64 = (0..tree.n_leaves()).filter(|&l| n_s[l] > 0.0).map(|l| n_t[l]).sum();
        let expected_total = tot_s * covered / tot_t;
        prop_assert!((total - expected_total).abs() <= 1e-9 * tot_s);
    }

    #[test]
    fn predictions_recompute_from_trees(ds in dataset(50, 3), rounds in 1usize..6) {
        prop_assume!(has_both_labels(ds.labels()));
        let config = TransBoostConfig { n_rounds: rounds, max_depth: 3, ..Default::default() };
        let model = train(&ds, &config).unwrap();
        let probs = model.predict(&ds).unwrap();
        for (r, &p) in probs.iter().enumerate() {
            let row = ds.row_values(r);
            let raw = model.base_score_main
                + model.trees.iter().map(|t| model.eta * t.main_weight(walk(t, &row))).sum::<f64>();
            prop_assert!((p - sigmoid(raw)).abs() < 1e-12);
        }
    }

    #[test]
    fn training_is_deterministic(ds in dataset(40, 3), seed in any::<u64>()) {
        prop_assume!(has_both_labels(ds.labels()));
        let config = TransBoostConfig { n_rounds: 4, max_depth: 2, seed, ..Default::default() };
        let a = train(&ds, &config).unwrap();
        let b = train(&ds, &config).unwrap();
        prop_assert_eq!(a.to_text().unwrap(), b.to_text().unwrap());
    }
}
