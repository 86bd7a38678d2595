use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{Dataset, Domain};
use crate::error::{Error, Result};
use crate::seed;

/// Keeps every source row and a seeded sample (without replacement) of
/// `round(fraction · N_T)` target rows. Row order is preserved.
pub fn subsample_target(ds: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!("fraction {fraction} not in (0, 1]")));
    }
    let targets = ds.indices_of(Domain::Target);
    let keep = (fraction * targets.len() as f64).round() as usize;
    if keep == 0 {
        return Err(Error::EmptyTarget);
    }
    if keep == targets.len() {
        return Ok(ds.clone());
    }
    let mut rng = seed::rng(seed);
    let mut chosen = vec![false; ds.n_rows()];
    for i in sample(&mut rng, targets.len(), keep) {
        chosen[targets[i]] = true;
    }
    let rows: Vec<usize> = (0..ds.n_rows())
        .filter(|&r| ds.domains()[r] == Domain::Source || chosen[r])
        .collect();
    Ok(ds.select_rows(&rows))
}

/// Independently keeps each present cell with probability `keep_rate`; the
/// rest become missing. Missing cells stay missing.
pub fn simulate_sparsity(ds: &Dataset, keep_rate: f64, seed: u64) -> Dataset {
    let keep_rate = keep_rate.clamp(0.0, 1.0);
    let mut rng = seed::rng(seed);
    ds.map_present(|_, _, v| rng.gen_bool(keep_rate).then_some(v))
}

/// Carves `n_test` target rows out as a held-out test set.
///
/// Returns `(train, test)`; `train` keeps all source rows and the remaining
/// target rows, `test` is target-only. Both preserve row order.
pub fn split_target(ds: &Dataset, n_test: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    let targets = ds.indices_of(Domain::Target);
    if n_test == 0 || n_test >= targets.len() {
        return Err(Error::Config(format!(
            "cannot hold out {n_test} of {} target rows",
            targets.len()
        )));
    }
    let mut rng = seed::rng(seed);
    let mut held = vec![false; ds.n_rows()];
    for i in sample(&mut rng, targets.len(), n_test) {
        held[targets[i]] = true;
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..ds.n_rows()).partition(|&r| held[r]);
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}

/// Permutes the labels among source rows, destroying any relation between
/// source features and labels while keeping the source prevalence.
pub fn shuffle_source_labels(ds: &Dataset, seed: u64) -> Dataset {
    let sources = ds.indices_of(Domain::Source);
    let mut source_labels: Vec<u8> = sources.iter().map(|&r| ds.labels()[r]).collect();
    source_labels.shuffle(&mut seed::rng(seed));
    let mut labels = ds.labels().to_vec();
    for (&r, y) in sources.iter().zip(source_labels) {
        labels[r] = y;
    }
    ds.clone().with_labels(labels).expect("same length")
}
