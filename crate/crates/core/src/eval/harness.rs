use std::time::Instant;

use rand::seq::index::sample;
use rayon::prelude::*;

use super::report::{
    Algorithm, RuntimeCell, RuntimeReport, SparsityCell, SparsityReport, SweepCell, SweepReport,
};
use super::auc;
use crate::boost::{train, train_plain, train_pooled, train_target_only, TransBoostConfig, TransBoostModel};
use crate::data::{build_bins, simulate_sparsity, subsample_target, Dataset, Domain};
use crate::error::Result;
use crate::kmm::closed_form_weights;
use crate::seed;
use crate::tree::{grad_hess, grow_structure};

/// Per-row weights from one domain-classifier tree: source rows get the
/// unsmoothed marginal ratio of their leaf, target rows get 1.
pub fn pilot_weights(ds: &Dataset, config: &TransBoostConfig) -> Result<Vec<f64>> {
    ds.require_both_domains()?;
    let is_target: Vec<u8> = ds.domains().iter().map(|&d| u8::from(d == Domain::Target)).collect();
    let prior = ds.count(Domain::Target) as f64 / ds.n_rows() as f64;
    let stats = grad_hess(&is_target, &vec![prior; ds.n_rows()], config.p_min)?;
    let bins = build_bins(ds, config.max_bins);
    let tree = grow_structure(
        &bins,
        &bins.bin_dataset(ds),
        &stats,
        &vec![1.0; ds.n_rows()],
        &config.grow_params(),
    );
    let source = ds.filter_domain(Domain::Source);
    let target = ds.filter_domain(Domain::Target);
    let beta = closed_form_weights(&tree, &source, &target, None).beta;
    let mut next = beta.into_iter();
    Ok(ds
        .domains()
        .iter()
        .map(|&d| match d {
            Domain::Source => next.next().expect("one weight per source row"),
            Domain::Target => 1.0,
        })
        .collect())
}

/// Trains one learner on a dataset holding both domains.
pub fn train_algorithm(ds: &Dataset, algorithm: Algorithm, config: &TransBoostConfig) -> Result<TransBoostModel> {
    match algorithm {
        Algorithm::TransBoost => train(ds, config),
        Algorithm::TargetOnly => train_target_only(ds, config),
        Algorithm::Pooled => train_pooled(ds, config),
        Algorithm::KmmWeighted => train_plain(ds, &pilot_weights(ds, config)?, config),
    }
}

fn score(model: &TransBoostModel, test: &Dataset) -> Result<f64> {
    auc(test.labels(), &model.predict(test)?)
}

/// Trains every (fraction, seed, algorithm) cell on all source rows plus a
/// seeded sample of the training target rows, and scores it on `test`.
///
/// The target sample depends on the fraction and seed only, so all
/// algorithms in a cell see the same rows. Cells run in parallel; failures
/// are recorded in the cell.
pub fn run_fraction_sweep(
    train_pool: &Dataset,
    test: &Dataset,
    fractions: &[f64],
    seeds: &[u64],
    algorithms: &[Algorithm],
    config: &TransBoostConfig,
) -> SweepReport {
    let mut jobs = Vec::new();
    for &fraction in fractions {
        for &s in seeds {
            for &algorithm in algorithms {
                jobs.push((fraction, s, algorithm));
            }
        }
    }
    let cells = jobs
        .into_par_iter()
        .map(|(fraction, s, algorithm)| {
            let result = subsample_target(train_pool, fraction, seed::child_seed(s, "subsample", 0))
                .and_then(|ds| {
                    let cfg = TransBoostConfig {
                        seed: s,
                        ..config.clone()
                    };
                    train_algorithm(&ds, algorithm, &cfg)
                })
                .and_then(|m| score(&m, test));
            SweepCell {
                fraction,
                seed: s,
                algorithm,
                auc: result.as_ref().ok().copied(),
                error: result.err().map(|e| e.to_string()),
            }
        })
        .collect();
    let mut report = SweepReport { cells };
    report.sort();
    report
}

/// TransBoost trained on sparsified copies of `train_set`; `test` is left
/// untouched.
pub fn run_sparsity_bench(
    train_set: &Dataset,
    test: &Dataset,
    keep_rates: &[f64],
    seeds: &[u64],
    config: &TransBoostConfig,
) -> SparsityReport {
    let mut jobs = Vec::new();
    for (i, &keep_rate) in keep_rates.iter().enumerate() {
        for &s in seeds {
            jobs.push((i, keep_rate, s));
        }
    }
    let cells = jobs
        .into_par_iter()
        .map(|(i, keep_rate, s)| {
            let sparse = simulate_sparsity(train_set, keep_rate, seed::child_seed(s, "sparsity", i as u64));
            let cfg = TransBoostConfig {
                seed: s,
                ..config.clone()
            };
            let result = train(&sparse, &cfg).and_then(|m| score(&m, test));
            SparsityCell {
                keep_rate,
                seed: s,
                auc: result.as_ref().ok().copied(),
                error: result.err().map(|e| e.to_string()),
            }
        })
        .collect();
    SparsityReport { cells }
}

/// Resizes each domain to `round(multiplier · count)` rows: whole copies
/// first, then a seeded sample for the remainder.
pub fn resize(ds: &Dataset, multiplier: f64, seed: u64) -> Dataset {
    let mut rows = Vec::new();
    let mut rng = seed::child_rng(seed, "runtime", multiplier.to_bits());
    for domain in [Domain::Source, Domain::Target] {
        let idx = ds.indices_of(domain);
        let want = (multiplier * idx.len() as f64).round() as usize;
        let whole = want / idx.len().max(1);
        for _ in 0..whole {
            rows.extend_from_slice(&idx);
        }
        let rest = want - whole * idx.len();
        let mut extra: Vec<usize> = sample(&mut rng, idx.len(), rest).into_iter().map(|i| idx[i]).collect();
        extra.sort_unstable();
        rows.extend(extra);
    }
    ds.select_rows(&rows)
}

/// Wall-clock TransBoost training time at each size multiplier, `repeats`
/// runs each. Runs are sequential so timings do not interfere.
pub fn run_runtime_bench(
    ds: &Dataset,
    multipliers: &[f64],
    repeats: usize,
    config: &TransBoostConfig,
) -> Result<RuntimeReport> {
    let mut cells = Vec::new();
    for &m in multipliers {
        let sized = resize(ds, m, config.seed);
        for run in 0..repeats {
            let start = Instant::now();
            train(&sized, config)?;
            cells.push(RuntimeCell {
                size: sized.n_rows(),
                run,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    Ok(RuntimeReport { cells })
}
