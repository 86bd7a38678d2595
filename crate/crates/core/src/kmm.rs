//! Kernel mean matching with tree kernels, solved numerically.
//!
//! Two rows are connected when a tree sends them to the same leaf (and, for
//! the joint kernel, they share a label). The resulting quadratic program
//!
//! ```text
//! minimise ½ βᵀKβ − kᵀβ   subject to β ≥ 0
//! ```
//!
//! is solved by accelerated projected gradient and compared with the
//! per-leaf closed form. Everything here is dense and meant for small
//! verification instances.

use rand::Rng;

use crate::data::{Dataset, Domain};
use crate::seed;
use crate::tree::{DualTree, Leaf, Node, Direction};

/// Largest source set accepted by [`build_tree_kernel`].
pub const MAX_ORACLE_SOURCE_ROWS: usize = 1000;

/// Dense kernel matrix over source rows plus the linear term.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSystem {
    /// Row-major `n_source × n_source` 0/1 matrix.
    pub kernel: Vec<f64>,
    pub n_source: usize,
    /// `k_i = (N_S / N_T) · Σ_j K(x_i, x'_j)` over target rows.
    pub linear: Vec<f64>,
    /// Leaf of each source row.
    pub leaf: Vec<usize>,
    /// Label of each source row when the kernel is joint.
    pub label: Option<Vec<u8>>,
}

impl KernelSystem {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.n_source + j]
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.kernel[i * self.n_source..(i + 1) * self.n_source];
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Block id of each source row: leaf, or (leaf, label) for the joint kernel.
    pub fn block_key(&self, i: usize) -> (usize, Option<u8>) {
        (self.leaf[i], self.label.as_ref().map(|l| l[i]))
    }

    /// Sum of |K_ij| over pairs in different blocks.
    pub fn off_block_mass(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n_source {
            for j in 0..self.n_source {
                if self.block_key(i) != self.block_key(j) {
                    total += self.entry(i, j).abs();
                }
            }
        }
        total
    }

    /// `½ βᵀKβ − kᵀβ`.
    pub fn objective(&self, beta: &[f64]) -> f64 {
        let mut kb = vec![0.0; self.n_source];
        self.matvec(beta, &mut kb);
        let quad: f64 = beta.iter().zip(&kb).map(|(b, v)| b * v).sum();
        let lin: f64 = beta.iter().zip(&self.linear).map(|(b, k)| b * k).sum();
        0.5 * quad - lin
    }
}

/// Builds the tree kernel (or the joint tree-and-label kernel) between the
/// rows of `source` and `target`. Domain tags of the two datasets are ignored.
///
/// # Panics
/// If `source` has more than [`MAX_ORACLE_SOURCE_ROWS`] rows or `target` is empty.
pub fn build_tree_kernel(tree: &DualTree, source: &Dataset, target: &Dataset, joint: bool) -> KernelSystem {
    let n_s = source.n_rows();
    let n_t = target.n_rows();
    assert!(n_s <= MAX_ORACLE_SOURCE_ROWS, "oracle limited to {MAX_ORACLE_SOURCE_ROWS} source rows");
    assert!(n_t > 0, "target rows required");
    let src_leaf = tree.assign(source);
    let tgt_leaf = tree.assign(target);
    let connected = |li: usize, yi: u8, lj: usize, yj: u8| li == lj && (!joint || yi == yj);

    let mut kernel = vec![0.0; n_s * n_s];
    for i in 0..n_s {
        for j in 0..n_s {
            if connected(src_leaf[i], source.labels()[i], src_leaf[j], source.labels()[j]) {
                kernel[i * n_s + j] = 1.0;
            }
        }
    }
    let scale = n_s as f64 / n_t as f64;
    let linear = (0..n_s)
        .map(|i| {
            let hits = (0..n_t)
                .filter(|&j| connected(src_leaf[i], source.labels()[i], tgt_leaf[j], target.labels()[j]))
                .count();
            scale * hits as f64
        })
        .collect();
    KernelSystem {
        kernel,
        n_source: n_s,
        linear,
        leaf: src_leaf,
        label: joint.then(|| source.labels().to_vec()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpOptions {
    pub max_iters: usize,
    /// Step size; `None` uses `1 / L` with `L` the largest absolute row sum of K.
    pub step: Option<f64>,
    /// Stop once the projected gradient norm drops below this.
    pub tol: f64,
}

impl Default for QpOptions {
    fn default() -> Self {
        QpOptions {
            max_iters: 200_000,
            step: None,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub beta: Vec<f64>,
    pub iterations: usize,
    /// Projected gradient norm at `beta`.
    pub grad_norm: f64,
    /// False when `max_iters` ran out; `beta` is then the best iterate seen.
    pub converged: bool,
}

/// Gradient norm restricted to coordinates that are free to move.
fn projected_grad_norm(beta: &[f64], grad: &[f64]) -> f64 {
    beta.iter()
        .zip(grad)
        .map(|(&b, &g)| if b <= 0.0 { g.min(0.0) } else { g })
        .map(|g| g * g)
        .sum::<f64>()
        .sqrt()
}

/// Accelerated projected gradient from the uniform start `β = 1`, with
/// momentum restarts.
///
/// Within a block of the kernel the objective only sees the block sum, so
/// the minimiser is not unique; starting uniform keeps every member of a
/// block equal and selects the evenly spread solution.
pub fn solve_kmm_qp(sys: &KernelSystem, opts: &QpOptions) -> QpSolution {
    let n = sys.n_source;
    let step = opts.step.unwrap_or_else(|| {
        let lipschitz = (0..n)
            .map(|i| (0..n).map(|j| sys.entry(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        if lipschitz > 0.0 {
            1.0 / lipschitz
        } else {
            1.0
        }
    });
    let mut x = vec![1.0; n];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut grad = vec![0.0; n];
    let mut x_next = vec![0.0; n];
    let mut best = (f64::INFINITY, x.clone());

    let check = |x: &[f64], grad: &mut [f64]| {
        sys.matvec(x, grad);
        for (g, k) in grad.iter_mut().zip(&sys.linear) {
            *g -= k;
        }
        projected_grad_norm(x, grad)
    };

    for iter in 0..opts.max_iters {
        let norm = check(&x, &mut grad);
        if norm < best.0 {
            best = (norm, x.clone());
        }
        if norm < opts.tol {
            return QpSolution {
                beta: x,
                iterations: iter,
                grad_norm: norm,
                converged: true,
            };
        }
        sys.matvec(&y, &mut grad);
        for i in 0..n {
            x_next[i] = (y[i] - step * (grad[i] - sys.linear[i])).max(0.0);
        }
        let restart: f64 = (0..n).map(|i| (y[i] - x_next[i]) * (x_next[i] - x[i])).sum();
        if restart > 0.0 {
            t = 1.0;
            y.copy_from_slice(&x_next);
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let momentum = (t - 1.0) / t_next;
            for i in 0..n {
                y[i] = (x_next[i] + momentum * (x_next[i] - x[i])).max(0.0);
            }
            t = t_next;
        }
        std::mem::swap(&mut x, &mut x_next);
    }
    let norm = check(&x, &mut grad);
    if norm < best.0 {
        best = (norm, x);
    }
    QpSolution {
        beta: best.1,
        iterations: opts.max_iters,
        grad_norm: best.0,
        converged: false,
    }
}

/// How a closed-form weight came out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightFlag {
    Finite,
    /// The row's leaf holds no target rows; the weight is 0.
    EmptyTargetLeaf,
    /// The ancillary likelihood of the row's label is 0; the weight is +∞.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormWeights {
    pub beta: Vec<f64>,
    pub flags: Vec<WeightFlag>,
}

/// Per-leaf analytic weights with no smoothing and no clipping.
///
/// Marginal: `n_leaf · N_S / (m_leaf · N_T)`. When `probs` holds main and
/// ancillary probabilities for each source row the marginal weight is
/// multiplied by the ratio of their label likelihoods.
pub fn closed_form_weights(
    tree: &DualTree,
    source: &Dataset,
    target: &Dataset,
    probs: Option<(&[f64], &[f64])>,
) -> ClosedFormWeights {
    let n_leaves = tree.n_leaves();
    let mut n_tgt = vec![0.0f64; n_leaves];
    let mut m_src = vec![0.0f64; n_leaves];
    let src_leaf: Vec<usize> = (0..source.n_rows()).map(|r| tree.leaf_of(&source.row(r))).collect();
    for &l in &src_leaf {
        m_src[l] += 1.0;
    }
    for r in 0..target.n_rows() {
        n_tgt[tree.leaf_of(&target.row(r))] += 1.0;
    }
    let ratio = source.n_rows() as f64 / target.n_rows() as f64;
    let mut out = ClosedFormWeights {
        beta: Vec::with_capacity(src_leaf.len()),
        flags: Vec::with_capacity(src_leaf.len()),
    };
    for (i, &l) in src_leaf.iter().enumerate() {
        let marginal = n_tgt[l] / m_src[l] * ratio;
        let (beta, flag) = match probs {
            None => (marginal, WeightFlag::Finite),
            Some((main, anc)) => {
                let y = source.labels()[i];
                let like = |p: f64| if y == 1 { p } else { 1.0 - p };
                let (num, den) = (like(main[i]), like(anc[i]));
                if den == 0.0 {
                    (f64::INFINITY, WeightFlag::Unbounded)
                } else {
                    (marginal * (num / den), WeightFlag::Finite)
                }
            }
        };
        let flag = if n_tgt[l] == 0.0 && flag == WeightFlag::Finite {
            WeightFlag::EmptyTargetLeaf
        } else {
            flag
        };
        out.beta.push(beta);
        out.flags.push(flag);
    }
    out
}

/// Empirical positive rate of the target rows and of the source rows in
/// each source row's leaf, usable as model-free stand-ins for the main and
/// ancillary probabilities.
pub fn leaf_label_frequencies(tree: &DualTree, source: &Dataset, target: &Dataset) -> (Vec<f64>, Vec<f64>) {
    let n_leaves = tree.n_leaves();
    let tally = |ds: &Dataset| {
        let mut pos = vec![0.0f64; n_leaves];
        let mut all = vec![0.0f64; n_leaves];
        for r in 0..ds.n_rows() {
            let l = tree.leaf_of(&ds.row(r));
            pos[l] += f64::from(ds.labels()[r]);
            all[l] += 1.0;
        }
        (0..n_leaves)
            .map(|l| if all[l] > 0.0 { pos[l] / all[l] } else { 0.5 })
            .collect::<Vec<_>>()
    };
    let tgt = tally(target);
    let src = tally(source);
    let leaves = tree.assign(source);
    (
        leaves.iter().map(|&l| tgt[l]).collect(),
        leaves.iter().map(|&l| src[l]).collect(),
    )
}

/// A random verification instance.
#[derive(Debug, Clone)]
pub struct OracleInstance {
    pub tree: DualTree,
    pub source: Dataset,
    pub target: Dataset,
}

/// Draws source and target rows with shifted features and labels, then a
/// random tree of depth at most `max_depth` whose cuts fall between target
/// values, so every leaf holds at least one target row.
pub fn random_instance(seed: u64, max_source: usize, max_target: usize, max_depth: usize) -> OracleInstance {
    let mut rng = seed::child_rng(seed, "oracle", 0);
    let n_features = rng.gen_range(1..=4);
    let n_s = rng.gen_range(2..=max_source.max(2));
    let n_t = rng.gen_range(2..=max_target.max(2));
    let shift: f64 = rng.gen_range(-1.0..1.0);
    let draw = |n: usize, offset: f64, rng: &mut rand_chacha::ChaCha8Rng| {
        let rows: Vec<Vec<Option<f64>>> = (0..n)
            .map(|_| {
                (0..n_features)
                    .map(|_| Some((rng.gen_range(0.0..4.0f64) + offset).floor() / 2.0))
                    .collect()
            })
            .collect();
        let labels: Vec<u8> = rows
            .iter()
            .map(|r| u8::from(rng.gen_bool(if r[0].unwrap() > 1.0 { 0.7 } else { 0.3 })))
            .collect();
        (rows, labels)
    };
    let (src_rows, src_labels) = draw(n_s, shift, &mut rng);
    let (tgt_rows, tgt_labels) = draw(n_t, 0.0, &mut rng);
    let source = Dataset::from_rows(&src_rows, src_labels, vec![Domain::Source; n_s]).expect("valid rows");
    let target = Dataset::from_rows(&tgt_rows, tgt_labels, vec![Domain::Target; n_t]).expect("valid rows");

    let depth = rng.gen_range(1..=max_depth.max(1));
    let mut nodes = vec![Node::Leaf { leaf: usize::MAX }];
    let mut leaves = Vec::new();
    let mut stack = vec![(0usize, 0usize, (0..n_t).collect::<Vec<usize>>())];
    while let Some((id, level, rows)) = stack.pop() {
        let split = (level < depth && rng.gen_bool(0.85))
            .then(|| {
                let feature = rng.gen_range(0..n_features);
                let mut values: Vec<f64> = rows.iter().filter_map(|&r| target.value(r, feature)).collect();
                values.sort_by(f64::total_cmp);
                values.dedup();
                (values.len() >= 2).then(|| {
                    let k = rng.gen_range(1..values.len());
                    (feature, 0.5 * (values[k - 1] + values[k]))
                })
            })
            .flatten();
        match split {
            Some((feature, cut)) => {
                let left = nodes.len();
                nodes.push(Node::Leaf { leaf: usize::MAX });
                nodes.push(Node::Leaf { leaf: usize::MAX });
                nodes[id] = Node::Split {
                    feature,
                    cut,
                    default: Direction::Left,
                    left,
                    right: left + 1,
                    gain: 0.0,
                };
                let (l, r): (Vec<usize>, Vec<usize>) =
                    rows.iter().partition(|&&row| target.value(row, feature).unwrap() < cut);
                stack.push((left + 1, level + 1, r));
                stack.push((left, level + 1, l));
            }
            None => {
                nodes[id] = Node::Leaf { leaf: leaves.len() };
                leaves.push(Leaf {
                    main: 0.0,
                    ancillary: 0.0,
                    count: rows.len(),
                });
            }
        }
    }
    let tree = DualTree::from_parts(nodes, leaves).expect("well-formed random tree");
    OracleInstance { tree, source, target }
}

/// Outcome of one oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTrial {
    pub trial: usize,
    pub n_source: usize,
    pub n_target: usize,
    pub n_leaves: usize,
    /// ∞-norm gap between the QP solution and the marginal closed form.
    pub marginal_deviation: f64,
    /// Same for the joint kernel against the product form.
    pub joint_deviation: f64,
    pub converged: bool,
}

impl OracleTrial {
    pub fn passes(&self, tol: f64) -> bool {
        self.converged && self.marginal_deviation <= tol && self.joint_deviation <= tol
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Solves both kernels on one instance and compares with the closed forms.
pub fn compare_with_closed_form(inst: &OracleInstance, opts: &QpOptions) -> (f64, f64, bool) {
    let marginal = build_tree_kernel(&inst.tree, &inst.source, &inst.target, false);
    let qp_m = solve_kmm_qp(&marginal, opts);
    let cf_m = closed_form_weights(&inst.tree, &inst.source, &inst.target, None);

    let joint = build_tree_kernel(&inst.tree, &inst.source, &inst.target, true);
    let qp_j = solve_kmm_qp(&joint, opts);
    let (p_t, p_s) = leaf_label_frequencies(&inst.tree, &inst.source, &inst.target);
    let cf_j = closed_form_weights(&inst.tree, &inst.source, &inst.target, Some((&p_t, &p_s)));

    (
        max_abs_diff(&qp_m.beta, &cf_m.beta),
        max_abs_diff(&qp_j.beta, &cf_j.beta),
        qp_m.converged && qp_j.converged,
    )
}

/// Runs `trials` random instances with at most 200 source rows, 100
/// target rows and depth 3.
pub fn run_oracle_trials(trials: usize, seed: u64) -> Vec<OracleTrial> {
    let opts = QpOptions::default();
    (0..trials)
        .map(|t| {
            let inst = random_instance(seed::child_seed(seed, "oracle", t as u64), 200, 100, 3);
            let (marginal_deviation, joint_deviation, converged) = compare_with_closed_form(&inst, &opts);
            OracleTrial {
                trial: t,
                n_source: inst.source.n_rows(),
                n_target: inst.target.n_rows(),
                n_leaves: inst.tree.n_leaves(),
                marginal_deviation,
                joint_deviation,
                converged,
            }
        })
        .collect()
}
