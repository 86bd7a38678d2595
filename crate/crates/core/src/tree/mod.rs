//! One tree structure, two sets of leaf weights.

mod grow;

pub use self::grow::{grow_structure, grow_structure_with_rows, GrowParams, SplitCandidate};

use crate::data::{Dataset, Domain, FeatureRow};
use crate::error::{Error, Result};

/// Which child a missing value follows at a split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Present values `< cut` go left, `>= cut` go right.
    Split {
        feature: usize,
        cut: f64,
        default: Direction,
        left: usize,
        right: usize,
        gain: f64,
    },
    Leaf { leaf: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    /// Target-model weight.
    pub main: f64,
    /// Source-model weight.
    pub ancillary: f64,
    /// Training rows (both domains) routed here when the tree was grown.
    pub count: usize,
}

/// A binary tree whose leaves carry a main and an ancillary weight.
///
/// `nodes[0]` is the root. Leaves are numbered densely in `leaves`; the
/// structure function `leaf_of` maps a row to that number.
#[derive(Debug, Clone, PartialEq)]
pub struct DualTree {
    nodes: Vec<Node>,
    leaves: Vec<Leaf>,
}

impl DualTree {
    pub fn single_leaf(main: f64, ancillary: f64, count: usize) -> Self {
        DualTree {
            nodes: vec![Node::Leaf { leaf: 0 }],
            leaves: vec![Leaf {
                main,
                ancillary,
                count,
            }],
        }
    }

    /// Assembles a tree from raw parts, checking that every child id is in
    /// range, every leaf id appears exactly once, and the graph is a tree
    /// rooted at node 0.
    pub fn from_parts(nodes: Vec<Node>, leaves: Vec<Leaf>) -> Result<Self> {
        let bad = |message: String| Error::ModelFormat { line: 0, message };
        if nodes.is_empty() {
            return Err(bad("tree has no nodes".into()));
        }
        let mut seen_node = vec![false; nodes.len()];
        let mut seen_leaf = vec![false; leaves.len()];
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            if id >= nodes.len() || std::mem::replace(&mut seen_node[id], true) {
                return Err(bad(format!("node {id} missing or reached twice")));
            }
            match nodes[id] {
                Node::Split { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
                Node::Leaf { leaf } => {
                    if leaf >= leaves.len() || std::mem::replace(&mut seen_leaf[leaf], true) {
                        return Err(bad(format!("leaf index {leaf} invalid or repeated")));
                    }
                }
            }
        }
        if seen_node.iter().any(|s| !s) || seen_leaf.iter().any(|s| !s) {
            return Err(bad("unreachable nodes or leaves".into()));
        }
        Ok(DualTree { nodes, leaves })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// `(feature, gain)` of every split, in node order.
    pub fn split_gains(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match *n {
            Node::Split { feature, gain, .. } => Some((feature, gain)),
            Node::Leaf { .. } => None,
        })
    }

    /// The leaf a row lands in.
    pub fn leaf_of<R: FeatureRow + ?Sized>(&self, row: &R) -> usize {
        let mut id = 0;
        loop {
            match self.nodes[id] {
                Node::Leaf { leaf } => return leaf,
                Node::Split {
                    feature,
                    cut,
                    default,
                    left,
                    right,
                    ..
                } => {
                    id = match row.get(feature) {
                        Some(v) if v < cut => left,
                        Some(_) => right,
                        None => match default {
                            Direction::Left => left,
                            Direction::Right => right,
                        },
                    };
                }
            }
        }
    }

    /// Leaf of every row of `ds`.
    pub fn assign(&self, ds: &Dataset) -> Vec<usize> {
        (0..ds.n_rows()).map(|r| self.leaf_of(&ds.row(r))).collect()
    }

    pub fn main_weight(&self, leaf: usize) -> f64 {
        self.leaves[leaf].main
    }

    pub fn ancillary_weight(&self, leaf: usize) -> f64 {
        self.leaves[leaf].ancillary
    }

    pub(crate) fn leaves_mut(&mut self) -> &mut [Leaf] {
        &mut self.leaves
    }
}

/// Routes a row to its leaf id.
pub fn route<R: FeatureRow + ?Sized>(tree: &DualTree, row: &R) -> usize {
    tree.leaf_of(row)
}

/// First and second derivatives of the logistic loss with respect to the raw
/// score, one pair per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GradStats {
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl GradStats {
    pub fn len(&self) -> usize {
        self.grad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grad.is_empty()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn clamp_prob(p: f64, p_min: f64) -> f64 {
    p.clamp(p_min, 1.0 - p_min)
}

/// Cross-entropy of one label at probability `p`.
pub fn logistic_loss(y: u8, p: f64) -> f64 {
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// `g = p − y`, `h = p(1 − p)` with `p` clamped to `[p_min, 1 − p_min]`.
pub fn grad_hess(labels: &[u8], probs: &[f64], p_min: f64) -> Result<GradStats> {
    if labels.len() != probs.len() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: probs.len(),
        });
    }
    let (grad, hess) = labels
        .iter()
        .zip(probs)
        .map(|(&y, &p)| {
            let p = clamp_prob(p, p_min);
            (p - f64::from(y), p * (1.0 - p))
        })
        .unzip();
    Ok(GradStats { grad, hess })
}

/// `−G / (H + λ)`, or zero when the denominator vanishes.
pub fn newton_weight(grad_sum: f64, hess_sum: f64, lambda_reg: f64) -> f64 {
    let denom = hess_sum + lambda_reg;
    if denom > 0.0 {
        -grad_sum / denom
    } else {
        0.0
    }
}

/// Fills both leaf-weight vectors of a grown structure.
///
/// Main weights use every row with its effective weight; ancillary weights
/// use source rows only, unweighted. A leaf without source rows gets an
/// ancillary weight of zero.
pub fn assign_leaf_weights(
    tree: &mut DualTree,
    row_leaf: &[usize],
    domains: &[Domain],
    main: &GradStats,
    weights: &[f64],
    ancillary: &GradStats,
    lambda_reg: f64,
) {
    let n_leaves = tree.n_leaves();
    let mut g_main = vec![0.0; n_leaves];
    let mut h_main = vec![0.0; n_leaves];
    let mut g_anc = vec![0.0; n_leaves];
    let mut h_anc = vec![0.0; n_leaves];
    let mut n_src = vec![0usize; n_leaves];
    for (r, &leaf) in row_leaf.iter().enumerate() {
        g_main[leaf] += weights[r] * main.grad[r];
        h_main[leaf] += weights[r] * main.hess[r];
        if domains[r] == Domain::Source {
            g_anc[leaf] += ancillary.grad[r];
            h_anc[leaf] += ancillary.hess[r];
            n_src[leaf] += 1;
        }
    }
    for (j, leaf) in tree.leaves_mut().iter_mut().enumerate() {
        leaf.main = newton_weight(g_main[j], h_main[j], lambda_reg);
        leaf.ancillary = if n_src[j] == 0 {
            0.0
        } else {
            newton_weight(g_anc[j], h_anc[j], lambda_reg)
        };
    }
}
