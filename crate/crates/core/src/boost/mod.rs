//! The boosting loop: same-structure trees plus closed-form source reweighting.

mod config;
mod model_io;
mod weights;

pub use self::config::{TransBoostConfig, WeightParams};
pub use self::model_io::{read_model, write_model, MODEL_FORMAT_VERSION};
pub use self::weights::{update_weights, update_weights_with_rows, SourceWeights};

use crate::data::{build_bins, Dataset, Domain, FeatureRow};
use crate::error::{Error, Result};
use crate::tree::{
    assign_leaf_weights, clamp_prob, grad_hess, grow_structure_with_rows, logistic_loss, sigmoid,
    DualTree,
};

/// An ordered list of dual trees and the two base scores.
#[derive(Debug, Clone, PartialEq)]
pub struct TransBoostModel {
    pub trees: Vec<DualTree>,
    /// Log-odds of the target-domain training prevalence.
    pub base_score_main: f64,
    /// Log-odds of the source-domain training prevalence.
    pub base_score_anc: f64,
    pub eta: f64,
    pub n_features: usize,
    pub feature_names: Vec<String>,
    pub config: TransBoostConfig,
}

impl TransBoostModel {
    fn check_features(&self, found: usize) -> Result<()> {
        if found != self.n_features {
            return Err(Error::FeatureCountMismatch {
                expected: self.n_features,
                found,
            });
        }
        Ok(())
    }

    pub fn raw_main<R: FeatureRow + ?Sized>(&self, row: &R) -> f64 {
        self.trees
            .iter()
            .fold(self.base_score_main, |acc, t| acc + self.eta * t.main_weight(t.leaf_of(row)))
    }

    pub fn raw_ancillary<R: FeatureRow + ?Sized>(&self, row: &R) -> f64 {
        self.trees.iter().fold(self.base_score_anc, |acc, t| {
            acc + self.eta * t.ancillary_weight(t.leaf_of(row))
        })
    }

    /// Main-model probability for every row.
    pub fn predict(&self, ds: &Dataset) -> Result<Vec<f64>> {
        self.check_features(ds.n_cols())?;
        Ok((0..ds.n_rows())
            .map(|r| sigmoid(self.raw_main(&ds.row(r))))
            .collect())
    }

    /// Ancillary (source) model probability for every row.
    pub fn predict_ancillary(&self, ds: &Dataset) -> Result<Vec<f64>> {
        self.check_features(ds.n_cols())?;
        Ok((0..ds.n_rows())
            .map(|r| sigmoid(self.raw_ancillary(&ds.row(r))))
            .collect())
    }

    pub fn predict_rows(&self, rows: &[Vec<Option<f64>>]) -> Result<Vec<f64>> {
        rows.iter()
            .map(|row| {
                self.check_features(row.len())?;
                Ok(sigmoid(self.raw_main(row)))
            })
            .collect()
    }

    /// Total realised split gain per feature, largest first; ties by feature id.
    pub fn feature_importance(&self) -> Vec<(usize, f64)> {
        let mut totals: Vec<Option<f64>> = vec![None; self.n_features];
        for (feature, gain) in self.trees.iter().flat_map(DualTree::split_gains) {
            *totals[feature].get_or_insert(0.0) += gain;
        }
        let mut ranked: Vec<(usize, f64)> = totals
            .into_iter()
            .enumerate()
            .filter_map(|(f, g)| g.map(|g| (f, g)))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked
    }
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    /// Mean main-model loss on target rows.
    pub target_loss: f64,
    /// Mean main-model loss on source rows.
    pub source_loss: f64,
    /// Mean ancillary-model loss on source rows.
    pub ancillary_loss: f64,
    pub n_leaves: usize,
    pub beta_min: f64,
    pub beta_mean: f64,
    pub beta_max: f64,
}

impl RoundRecord {
    pub fn to_log_line(&self) -> String {
        format!(
            "round={} target_loss={:.16e} source_loss={:.16e} ancillary_loss={:.16e} leaves={} beta_min={:.16e} beta_mean={:.16e} beta_max={:.16e}",
            self.round,
            self.target_loss,
            self.source_loss,
            self.ancillary_loss,
            self.n_leaves,
            self.beta_min,
            self.beta_mean,
            self.beta_max
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingLog {
    pub rounds: Vec<RoundRecord>,
    /// Source weights after the final round.
    pub final_weights: Option<SourceWeights>,
}

fn log_odds(p: f64, p_min: f64) -> f64 {
    let p = clamp_prob(p, p_min);
    (p / (1.0 - p)).ln()
}

fn weighted_prevalence(labels: &[u8], weights: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
    let (mut pos, mut total) = (0.0, 0.0);
    for (i, (&y, &w)) in labels.iter().zip(weights).enumerate() {
        if keep(i) {
            pos += w * f64::from(y);
            total += w;
        }
    }
    if total > 0.0 {
        pos / total
    } else {
        0.5
    }
}

fn mean_loss(labels: &[u8], raw: &[f64], rows: impl Iterator<Item = usize>, p_min: f64) -> f64 {
    let (mut total, mut n) = (0.0, 0usize);
    for r in rows {
        total += logistic_loss(labels[r], clamp_prob(sigmoid(raw[r]), p_min));
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        total / n as f64
    }
}

/// Trains the main and ancillary models on a dataset holding both domains.
pub fn train(ds: &Dataset, config: &TransBoostConfig) -> Result<TransBoostModel> {
    train_with_log(ds, config).map(|(model, _)| model)
}

/// As [`train`], also returning per-round losses and weight summaries.
pub fn train_with_log(ds: &Dataset, config: &TransBoostConfig) -> Result<(TransBoostModel, TrainingLog)> {
    config.validate()?;
    ds.require_both_domains()?;
    let n = ds.n_rows();
    let labels = ds.labels();
    let domains = ds.domains();
    let is_source: Vec<bool> = domains.iter().map(|&d| d == Domain::Source).collect();
    let n_source = ds.count(Domain::Source) as f64;
    let n_target = ds.count(Domain::Target) as f64;

    let ones = vec![1.0; n];
    let base_main = log_odds(weighted_prevalence(labels, &ones, |i| !is_source[i]), config.p_min);
    let base_anc = log_odds(weighted_prevalence(labels, &ones, |i| is_source[i]), config.p_min);

    let bins = build_bins(ds, config.max_bins);
    let binned = bins.bin_dataset(ds);
    let grow = config.grow_params();
    let weight_params = config.weight_params();
    let decay_rate = (n_source / n_target).ln() / config.n_rounds as f64;

    let mut raw_main = vec![base_main; n];
    let mut raw_anc = vec![base_anc; n];
    let mut weights = SourceWeights::uniform(n_source as usize);
    let mut trees = Vec::with_capacity(config.n_rounds);
    let mut log = TrainingLog::default();
    let mut effective = vec![1.0; n];

    for round in 0..config.n_rounds {
        let balance = if config.decay {
            config.lambda_balance * (-decay_rate * round as f64).exp()
        } else {
            config.lambda_balance
        };
        let mut s = 0;
        for r in 0..n {
            if is_source[r] {
                effective[r] = balance * weights.beta[s];
                s += 1;
            }
        }

        let p_main: Vec<f64> = raw_main.iter().map(|&z| sigmoid(z)).collect();
        let p_anc: Vec<f64> = raw_anc.iter().map(|&z| sigmoid(z)).collect();
        let main_stats = grad_hess(labels, &p_main, config.p_min)?;
        let anc_stats = grad_hess(labels, &p_anc, config.p_min)?;

        let (mut tree, row_leaf) =
            grow_structure_with_rows(&bins, &binned, &main_stats, &effective, &grow);
        assign_leaf_weights(
            &mut tree,
            &row_leaf,
            domains,
            &main_stats,
            &effective,
            &anc_stats,
            config.lambda_reg,
        );
        for r in 0..n {
            let leaf = row_leaf[r];
            raw_main[r] += config.eta * tree.main_weight(leaf);
            raw_anc[r] += config.eta * tree.ancillary_weight(leaf);
        }

        let p_main: Vec<f64> = raw_main.iter().map(|&z| sigmoid(z)).collect();
        let p_anc: Vec<f64> = raw_anc.iter().map(|&z| sigmoid(z)).collect();
        weights = update_weights_with_rows(
            labels,
            domains,
            &row_leaf,
            tree.n_leaves(),
            &p_main,
            &p_anc,
            &weight_params,
            round + 1,
        );

        log.rounds.push(RoundRecord {
            round: round + 1,
            target_loss: mean_loss(labels, &raw_main, (0..n).filter(|&r| !is_source[r]), config.p_min),
            source_loss: mean_loss(labels, &raw_main, (0..n).filter(|&r| is_source[r]), config.p_min),
            ancillary_loss: mean_loss(labels, &raw_anc, (0..n).filter(|&r| is_source[r]), config.p_min),
            n_leaves: tree.n_leaves(),
            beta_min: weights.min(),
            beta_mean: weights.mean(),
            beta_max: weights.max(),
        });
        trees.push(tree);
    }
    log.final_weights = Some(weights);

    let model = TransBoostModel {
        trees,
        base_score_main: base_main,
        base_score_anc: base_anc,
        eta: config.eta,
        n_features: ds.n_cols(),
        feature_names: ds.feature_names().to_vec(),
        config: config.clone(),
    };
    Ok((model, log))
}

/// Plain weighted GBDT over every row, ignoring domain tags.
///
/// The result is a [`TransBoostModel`] whose ancillary weights mirror the
/// main ones. `row_weights` multiplies each row's gradient and hessian.
pub fn train_plain(ds: &Dataset, row_weights: &[f64], config: &TransBoostConfig) -> Result<TransBoostModel> {
    config.validate()?;
    if row_weights.len() != ds.n_rows() {
        return Err(Error::LengthMismatch {
            left: ds.n_rows(),
            right: row_weights.len(),
        });
    }
    if ds.n_rows() == 0 {
        return Err(Error::EmptyTarget);
    }
    let n = ds.n_rows();
    let labels = ds.labels();
    let base = log_odds(weighted_prevalence(labels, row_weights, |_| true), config.p_min);
    let bins = build_bins(ds, config.max_bins);
    let binned = bins.bin_dataset(ds);
    let grow = config.grow_params();
    let as_target = vec![Domain::Target; n];

    let mut raw = vec![base; n];
    let mut trees = Vec::with_capacity(config.n_rounds);
    for _ in 0..config.n_rounds {
        let probs: Vec<f64> = raw.iter().map(|&z| sigmoid(z)).collect();
        let stats = grad_hess(labels, &probs, config.p_min)?;
        let (mut tree, row_leaf) = grow_structure_with_rows(&bins, &binned, &stats, row_weights, &grow);
        assign_leaf_weights(&mut tree, &row_leaf, &as_target, &stats, row_weights, &stats, config.lambda_reg);
        for leaf in tree.leaves_mut() {
            leaf.ancillary = leaf.main;
        }
        for r in 0..n {
            raw[r] += config.eta * tree.main_weight(row_leaf[r]);
        }
        trees.push(tree);
    }
    Ok(TransBoostModel {
        trees,
        base_score_main: base,
        base_score_anc: base,
        eta: config.eta,
        n_features: ds.n_cols(),
        feature_names: ds.feature_names().to_vec(),
        config: config.clone(),
    })
}

/// Plain GBDT on the target rows only.
pub fn train_target_only(ds: &Dataset, config: &TransBoostConfig) -> Result<TransBoostModel> {
    let target = ds.filter_domain(Domain::Target);
    if target.n_rows() == 0 {
        return Err(Error::EmptyTarget);
    }
    train_plain(&target, &vec![1.0; target.n_rows()], config)
}

/// Plain GBDT on both domains with every weight 1.
pub fn train_pooled(ds: &Dataset, config: &TransBoostConfig) -> Result<TransBoostModel> {
    ds.require_both_domains()?;
    train_plain(ds, &vec![1.0; ds.n_rows()], config)
}
