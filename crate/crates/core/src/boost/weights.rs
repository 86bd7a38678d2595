use super::config::WeightParams;
use crate::data::{Dataset, Domain};
use crate::tree::{clamp_prob, DualTree};

/// Source-instance weights after a boosting round, in source-row order.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceWeights {
    /// Round that produced these weights; `0` is the uniform start.
    pub round: usize,
    /// Clipped product of the two factors below.
    pub beta: Vec<f64>,
    pub marginal: Vec<f64>,
    pub conditional: Vec<f64>,
}

impl SourceWeights {
    pub fn uniform(n_source: usize) -> Self {
        SourceWeights {
            round: 0,
            beta: vec![1.0; n_source],
            marginal: vec![1.0; n_source],
            conditional: vec![1.0; n_source],
        }
    }

    pub fn min(&self) -> f64 {
        self.beta.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.beta.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.beta.iter().sum::<f64>() / self.beta.len().max(1) as f64
    }
}

/// Likelihood the model assigns to the observed label.
fn label_likelihood(y: u8, p: f64) -> f64 {
    let y = f64::from(y);
    y * p + (1.0 - y) * (1.0 - p)
}

/// Closed-form source reweighting from one tree's leaf partition.
///
/// For a source row in leaf `l` holding `n_l` target and `m_l` source rows,
///
/// ```text
/// marginal    = (n_l + eps) · N_S / ((m_l + eps) · N_T)
/// conditional = lik(y, h_main(x)) / lik(y, h_anc(x))
/// beta        = clip(marginal · conditional, beta_min, beta_max)
/// ```
///
/// with `lik(y, p) = y·p + (1 − y)(1 − p)` and both probabilities clamped to
/// `[p_min, 1 − p_min]`. `main_probs` and `ancillary_probs` are indexed by
/// dataset row; only source rows are read from `ancillary_probs`.
pub fn update_weights(
    ds: &Dataset,
    tree: &DualTree,
    main_probs: &[f64],
    ancillary_probs: &[f64],
    params: &WeightParams,
    round: usize,
) -> SourceWeights {
    let row_leaf = tree.assign(ds);
    update_weights_with_rows(
        ds.labels(),
        ds.domains(),
        &row_leaf,
        tree.n_leaves(),
        main_probs,
        ancillary_probs,
        params,
        round,
    )
}

/// As [`update_weights`] with the leaf of every row already known. Two passes
/// over the rows, nothing else.
#[allow(clippy::too_many_arguments)]
pub fn update_weights_with_rows(
    labels: &[u8],
    domains: &[Domain],
    row_leaf: &[usize],
    n_leaves: usize,
    main_probs: &[f64],
    ancillary_probs: &[f64],
    params: &WeightParams,
    round: usize,
) -> SourceWeights {
    let mut n_target = vec![0usize; n_leaves];
    let mut n_source = vec![0usize; n_leaves];
    for (&leaf, &d) in row_leaf.iter().zip(domains) {
        match d {
            Domain::Target => n_target[leaf] += 1,
            Domain::Source => n_source[leaf] += 1,
        }
    }
    let total_target = n_target.iter().sum::<usize>() as f64;
    let total_source = n_source.iter().sum::<usize>() as f64;
    let eps = params.eps_smooth;
    let leaf_marginal: Vec<f64> = (0..n_leaves)
        .map(|l| {
            ((n_target[l] as f64 + eps) * total_source)
                / ((n_source[l] as f64 + eps) * total_target)
        })
        .collect();

    let capacity = total_source as usize;
    let mut out = SourceWeights {
        round,
        beta: Vec::with_capacity(capacity),
        marginal: Vec::with_capacity(capacity),
        conditional: Vec::with_capacity(capacity),
    };
    for r in 0..labels.len() {
        if domains[r] != Domain::Source {
            continue;
        }
        let marginal = leaf_marginal[row_leaf[r]];
        let main = clamp_prob(main_probs[r], params.p_min);
        let anc = clamp_prob(ancillary_probs[r], params.p_min);
        let conditional = label_likelihood(labels[r], main) / label_likelihood(labels[r], anc);
        out.marginal.push(marginal);
        out.conditional.push(conditional);
        out.beta
            .push((marginal * conditional).clamp(params.beta_min, params.beta_max));
    }
    out
}
