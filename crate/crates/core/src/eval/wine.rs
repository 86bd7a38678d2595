//! Wine-quality transfer setup: red wines as the source domain, white wines
//! as the target, label `quality > 5`.

use std::path::{Path, PathBuf};

use rand::seq::index::sample;

use crate::data::{Dataset, Domain};
use crate::error::{Error, Result};
use crate::seed;

pub const WINE_TEST_ROWS: usize = 960;
pub const WINE_TRAIN_TARGET_ROWS: usize = 500;
pub const WINE_LABEL_COLUMN: &str = "quality";

/// Expected file locations inside a data directory.
pub fn wine_paths(dir: impl AsRef<Path>) -> (PathBuf, PathBuf) {
    let dir = dir.as_ref();
    (dir.join("winequality-red.csv"), dir.join("winequality-white.csv"))
}

/// Loads one wine-quality file. The delimiter (`;` or `,`) is detected
/// from the header line.
pub fn load_wine_file(path: impl AsRef<Path>, domain: Domain) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header = text.lines().next().unwrap_or("");
    let delimiter = if header.matches(';').count() > header.matches(',').count() {
        b';'
    } else {
        b','
    };
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .from_reader(text.as_bytes());
    let names: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let label_idx = names
        .iter()
        .position(|n| n == WINE_LABEL_COLUMN)
        .ok_or_else(|| Error::MissingColumn(WINE_LABEL_COLUMN.into()))?;
    let feature_names: Vec<String> = names
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, n)| n.clone())
        .collect();
    let mut columns = vec![Vec::new(); feature_names.len()];
    let mut labels = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != names.len() {
            return Err(Error::MalformedRow {
                row,
                expected: names.len(),
                found: record.len(),
            });
        }
        let mut c = 0;
        for (i, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::BadValue {
                row,
                column: names[i].clone(),
                value: cell.to_string(),
            })?;
            if i == label_idx {
                labels.push(u8::from(value > 5.0));
            } else {
                columns[c].push(Some(value));
                c += 1;
            }
        }
    }
    let n = labels.len();
    Dataset::new(columns, labels, vec![domain; n], feature_names)
}

/// Red as source rows followed by white as target rows.
pub fn load_wine(red: impl AsRef<Path>, white: impl AsRef<Path>) -> Result<Dataset> {
    let source = load_wine_file(red, Domain::Source)?;
    let target = load_wine_file(white, Domain::Target)?;
    source.concat(&target)
}

/// Carves the held-out test set and the labelled target training set.
///
/// Returns `(train, test)`: `train` holds every source row plus
/// [`WINE_TRAIN_TARGET_ROWS`] target rows, `test` holds
/// [`WINE_TEST_ROWS`] other target rows. Remaining target rows are unused.
pub fn wine_split(ds: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    let targets = ds.indices_of(Domain::Target);
    let needed = WINE_TEST_ROWS + WINE_TRAIN_TARGET_ROWS;
    if targets.len() < needed {
        return Err(Error::Config(format!(
            "need {needed} target rows, found {}",
            targets.len()
        )));
    }
    let mut rng = seed::child_rng(seed, "split", 0);
    let picked: Vec<usize> = sample(&mut rng, targets.len(), needed)
        .into_iter()
        .map(|i| targets[i])
        .collect();
    let mut test: Vec<usize> = picked[..WINE_TEST_ROWS].to_vec();
    let mut train_target: Vec<usize> = picked[WINE_TEST_ROWS..].to_vec();
    test.sort_unstable();
    train_target.sort_unstable();
    let mut train = ds.indices_of(Domain::Source);
    train.extend(train_target);
    Ok((ds.select_rows(&train), ds.select_rows(&test)))
}
