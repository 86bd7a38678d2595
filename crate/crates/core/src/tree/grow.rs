use super::{Direction, DualTree, GradStats, Leaf, Node};
use crate::data::{BinMap, BinnedMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct GrowParams {
    pub max_depth: usize,
    /// Minimum rows (both domains counted) in each child of a split.
    pub min_leaf_size: usize,
    /// A split is kept only if its gain is strictly larger.
    pub min_gain: f64,
    pub lambda_reg: f64,
    pub gamma: f64,
}

impl Default for GrowParams {
    fn default() -> Self {
        GrowParams {
            max_depth: 4,
            min_leaf_size: 1,
            min_gain: 0.0,
            lambda_reg: 1.0,
            gamma: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    /// Index into the feature's cut points; bins `0..=cut_index` go left.
    pub cut_index: usize,
    pub gain: f64,
    pub default: Direction,
}

#[derive(Debug, Clone, Copy, Default)]
struct Bucket {
    grad: f64,
    hess: f64,
    count: usize,
}

impl Bucket {
    fn add(&mut self, other: &Bucket) {
        self.grad += other.grad;
        self.hess += other.hess;
        self.count += other.count;
    }

    fn sub(&self, other: &Bucket) -> Bucket {
        Bucket {
            grad: self.grad - other.grad,
            hess: self.hess - other.hess,
            count: self.count - other.count,
        }
    }

    fn score(&self, lambda_reg: f64) -> f64 {
        let denom = self.hess + lambda_reg;
        if denom > 0.0 {
            self.grad * self.grad / denom
        } else {
            0.0
        }
    }
}

/// Grows a tree structure level by level from weighted gradient statistics.
/// Leaf weights are left at zero; see [`super::assign_leaf_weights`].
pub fn grow_structure(
    bins: &BinMap,
    binned: &BinnedMatrix,
    stats: &GradStats,
    weights: &[f64],
    params: &GrowParams,
) -> DualTree {
    grow_structure_with_rows(bins, binned, stats, weights, params).0
}

/// As [`grow_structure`], also returning the leaf of every training row.
pub fn grow_structure_with_rows(
    bins: &BinMap,
    binned: &BinnedMatrix,
    stats: &GradStats,
    weights: &[f64],
    params: &GrowParams,
) -> (DualTree, Vec<usize>) {
    let n_rows = stats.len();
    assert_eq!(weights.len(), n_rows, "one weight per row");
    let mut nodes = vec![Node::Leaf { leaf: usize::MAX }];
    let mut leaves: Vec<Leaf> = Vec::new();
    let mut row_leaf = vec![0usize; n_rows];

    let mut frontier: Vec<(usize, Vec<usize>)> = vec![(0, (0..n_rows).collect())];
    for depth in 0..=params.max_depth {
        let mut next = Vec::new();
        for (node_id, rows) in frontier {
            let split = if depth < params.max_depth {
                best_split(bins, binned, stats, weights, params, &rows)
            } else {
                None
            };
            match split {
                Some(s) => {
                    let column = binned.column(s.feature);
                    let missing = bins.missing_bin(s.feature);
                    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
                        rows.iter().partition(|&&r| {
                            let b = column[r];
                            if b == missing {
                                s.default == Direction::Left
                            } else {
                                usize::from(b) <= s.cut_index
                            }
                        });
                    let left = nodes.len();
                    nodes.push(Node::Leaf { leaf: usize::MAX });
                    nodes.push(Node::Leaf { leaf: usize::MAX });
                    nodes[node_id] = Node::Split {
                        feature: s.feature,
                        cut: bins.cuts(s.feature)[s.cut_index],
                        default: s.default,
                        left,
                        right: left + 1,
                        gain: s.gain,
                    };
                    next.push((left, left_rows));
                    next.push((left + 1, right_rows));
                }
                None => {
                    let leaf = leaves.len();
                    for &r in &rows {
                        row_leaf[r] = leaf;
                    }
                    leaves.push(Leaf {
                        main: 0.0,
                        ancillary: 0.0,
                        count: rows.len(),
                    });
                    nodes[node_id] = Node::Leaf { leaf };
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let tree = DualTree::from_parts(nodes, leaves).expect("grown tree is well formed");
    (tree, row_leaf)
}

/// Best split of one node over all features.
///
/// Ties go to the lowest feature, then the lowest cut, then `Left` as the
/// default direction, so the result does not depend on scan order.
fn best_split(
    bins: &BinMap,
    binned: &BinnedMatrix,
    stats: &GradStats,
    weights: &[f64],
    params: &GrowParams,
    rows: &[usize],
) -> Option<SplitCandidate> {
    if rows.len() < 2 * params.min_leaf_size.max(1) {
        return None;
    }
    let mut total = Bucket::default();
    for &r in rows {
        total.grad += weights[r] * stats.grad[r];
        total.hess += weights[r] * stats.hess[r];
        total.count += 1;
    }
    let parent = total.score(params.lambda_reg);
    let mut best: Option<SplitCandidate> = None;
    let mut hist = Vec::new();
    for feature in 0..bins.n_features() {
        let n_cuts = bins.cuts(feature).len();
        if n_cuts == 0 {
            continue;
        }
        hist.clear();
        hist.resize(n_cuts + 2, Bucket::default());
        let column = binned.column(feature);
        for &r in rows {
            let b = &mut hist[usize::from(column[r])];
            b.grad += weights[r] * stats.grad[r];
            b.hess += weights[r] * stats.hess[r];
            b.count += 1;
        }
        let missing = hist[n_cuts + 1];
        let present = total.sub(&missing);
        let mut left = Bucket::default();
        for cut_index in 0..n_cuts {
            left.add(&hist[cut_index]);
            let right = present.sub(&left);
            for default in [Direction::Left, Direction::Right] {
                let (mut l, mut r) = (left, right);
                match default {
                    Direction::Left => l.add(&missing),
                    Direction::Right => r.add(&missing),
                }
                if l.count < params.min_leaf_size
                    || r.count < params.min_leaf_size
                    || l.count == 0
                    || r.count == 0
                {
                    continue;
                }
                let gain = 0.5
                    * (l.score(params.lambda_reg) + r.score(params.lambda_reg) - parent)
                    - params.gamma;
                if !gain.is_finite() || gain <= params.min_gain {
                    continue;
                }
                if best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(SplitCandidate {
                        feature,
                        cut_index,
                        gain,
                        default,
                    });
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{build_bins, Dataset, Domain};

    fn one_feature(values: &[Option<f64>]) -> Dataset {
        let rows: Vec<Vec<Option<f64>>> = values.iter().map(|&v| vec![v]).collect();
        Dataset::from_rows(&rows, vec![0; values.len()], vec![Domain::Target; values.len()])
            .unwrap()
    }

    fn unit(n: usize) -> Vec<f64> {
        vec![1.0; n]
    }

    #[test]
    fn zero_gradients_give_single_leaf() {
        let ds = one_feature(&[Some(1.0), Some(2.0), Some(3.0)]);
        let bins = build_bins(&ds, 256);
        let stats = GradStats {
            grad: vec![0.0; 3],
            hess: vec![1.0; 3],
        };
        let tree = grow_structure(&bins, &bins.bin_dataset(&ds), &stats, &unit(3), &GrowParams::default());
        assert_eq!(tree.n_leaves(), 1);
    }

    #[test]
    fn four_point_split_matches_enumeration() {
        let ds = one_feature(&[Some(1.0), Some(2.0), Some(3.0), Some(4.0)]);
        let bins = build_bins(&ds, 256);
        let stats = GradStats {
            grad: vec![-1.0, -1.0, 1.0, 1.0],
            hess: vec![1.0; 4],
        };
        let params = GrowParams {
            max_depth: 1,
            lambda_reg: 0.0,
            ..Default::default()
        };
        // Oracle: every cut position scored by brute force.
        let score = |g: f64, h: f64| g * g / h;
        let mut best = (0, f64::MIN);
        for k in 1..4 {
            let (gl, hl) = (stats.grad[..k].iter().sum::<f64>(), k as f64);
            let (gr, hr) = (stats.grad[k..].iter().sum::<f64>(), (4 - k) as f64);
            let gain = 0.5 * (score(gl, hl) + score(gr, hr) - 0.0);
            if gain > best.1 {
                best = (k, gain);
            }
        }
        assert_eq!(best, (2, 2.0));
        let (tree, row_leaf) =
            grow_structure_with_rows(&bins, &bins.bin_dataset(&ds), &stats, &unit(4), &params);
        match tree.nodes()[0] {
            Node::Split { cut, gain, .. } => {
                assert!(cut > 2.0 && cut < 3.0);
                assert_eq!(gain, 2.0);
            }
            _ => panic!("expected a split"),
        }
        assert_eq!(row_leaf[0], row_leaf[1]);
        assert_ne!(row_leaf[1], row_leaf[2]);
    }

    #[test]
    fn depth_one_limits_to_one_split() {
        let values: Vec<Option<f64>> = (0..20).map(|i| Some(i as f64)).collect();
        let ds = one_feature(&values);
        let bins = build_bins(&ds, 256);
        let stats = GradStats {
            grad: (0..20).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect(),
            hess: vec![0.25; 20],
        };
        let params = GrowParams {
            max_depth: 1,
            ..Default::default()
        };
        let tree = grow_structure(&bins, &bins.bin_dataset(&ds), &stats, &unit(20), &params);
        assert!(tree.n_leaves() <= 2);
        assert!(tree.depth() <= 1);
    }

    #[test]
    fn missing_values_pick_the_better_default() {
        // Missing rows carry negative gradients like the low values, so they
        // belong on the left.
        let ds = one_feature(&[Some(1.0), Some(2.0), Some(3.0), Some(4.0), None, None]);
        let bins = build_bins(&ds, 256);
        let stats = GradStats {
            grad: vec![-1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
            hess: vec![1.0; 6],
        };
        let params = GrowParams {
            max_depth: 1,
            lambda_reg: 0.0,
            ..Default::default()
        };
        let tree = grow_structure(&bins, &bins.bin_dataset(&ds), &stats, &unit(6), &params);
        match tree.nodes()[0] {
            Node::Split { default, .. } => assert_eq!(default, Direction::Left),
            _ => panic!("expected a split"),
        }
        let all_missing: Vec<Option<f64>> = vec![None];
        let leaf = tree.leaf_of(all_missing.as_slice());
        assert_eq!(leaf, tree.leaf_of([Some(1.0)].as_slice()));
    }

    #[test]
    fn min_leaf_size_is_respected() {
        let values: Vec<Option<f64>> = (0..10).map(|i| Some(i as f64)).collect();
        let ds = one_feature(&values);
        let bins = build_bins(&ds, 256);
        let mut grad = vec![0.1; 10];
        grad[0] = -5.0;
        let stats = GradStats {
            grad,
            hess: vec![1.0; 10],
        };
        let params = GrowParams {
            max_depth: 3,
            min_leaf_size: 3,
            ..Default::default()
        };
        let tree = grow_structure(&bins, &bins.bin_dataset(&ds), &stats, &unit(10), &params);
        assert!(tree.leaves().iter().all(|l| l.count >= 3));
    }
}
