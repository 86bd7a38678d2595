//! Datasets with explicit missing cells, binary labels and domain tags.

mod bins;
mod csv;
mod perturb;
pub mod synth;

pub use self::bins::{build_bins, BinMap, BinnedMatrix, DEFAULT_MAX_BINS};
pub use self::csv::{load_csv, load_feature_rows, write_csv, CsvOptions, DomainSource};
pub use self::perturb::{shuffle_source_labels, simulate_sparsity, split_target, subsample_target};

use crate::error::{Error, Result};

/// Which domain a row was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Source,
    Target,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Source => "source",
            Domain::Target => "target",
        }
    }
}

/// Read access to one row of features. `None` is a missing cell.
pub trait FeatureRow {
    fn n_features(&self) -> usize;
    fn get(&self, feature: usize) -> Option<f64>;
}

impl FeatureRow for [Option<f64>] {
    fn n_features(&self) -> usize {
        self.len()
    }

    fn get(&self, feature: usize) -> Option<f64> {
        self[feature]
    }
}

impl FeatureRow for Vec<Option<f64>> {
    fn n_features(&self) -> usize {
        self.len()
    }

    fn get(&self, feature: usize) -> Option<f64> {
        self[feature]
    }
}

/// A borrowed row of a [`Dataset`].
#[derive(Debug, Clone, Copy)]
pub struct RowView<'a> {
    ds: &'a Dataset,
    row: usize,
}

impl FeatureRow for RowView<'_> {
    fn n_features(&self) -> usize {
        self.ds.n_cols()
    }

    fn get(&self, feature: usize) -> Option<f64> {
        self.ds.columns[feature][self.row]
    }
}

/// Column-major feature matrix plus labels and domain tags.
///
/// Every present cell is finite; `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Vec<Option<f64>>>,
    labels: Vec<u8>,
    domains: Vec<Domain>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        columns: Vec<Vec<Option<f64>>>,
        labels: Vec<u8>,
        domains: Vec<Domain>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n_rows = labels.len();
        if domains.len() != n_rows {
            return Err(Error::LengthMismatch {
                left: n_rows,
                right: domains.len(),
            });
        }
        if feature_names.len() != columns.len() {
            return Err(Error::LengthMismatch {
                left: columns.len(),
                right: feature_names.len(),
            });
        }
        for column in &columns {
            if column.len() != n_rows {
                return Err(Error::LengthMismatch {
                    left: n_rows,
                    right: column.len(),
                });
            }
        }
        for (row, &y) in labels.iter().enumerate() {
            if y > 1 {
                return Err(Error::BadLabel {
                    row,
                    value: y.to_string(),
                });
            }
        }
        for (name, column) in feature_names.iter().zip(&columns) {
            if let Some(row) = column.iter().position(|v| matches!(v, Some(x) if !x.is_finite())) {
                return Err(Error::BadValue {
                    row,
                    column: name.clone(),
                    value: format!("{:?}", column[row]),
                });
            }
        }
        Ok(Dataset {
            columns,
            labels,
            domains,
            feature_names,
        })
    }

    /// Builds a dataset from row-major data.
    pub fn from_rows(
        rows: &[Vec<Option<f64>>],
        labels: Vec<u8>,
        domains: Vec<Domain>,
    ) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); n_cols];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::MalformedRow {
                    row: r,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            for (c, v) in row.iter().enumerate() {
                columns[c].push(*v);
            }
        }
        let names = (0..n_cols).map(|c| format!("f{c}")).collect();
        Dataset::new(columns, labels, domains, names)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn column(&self, feature: usize) -> &[Option<f64>] {
        &self.columns[feature]
    }

    pub fn value(&self, row: usize, feature: usize) -> Option<f64> {
        self.columns[feature][row]
    }

    pub fn row(&self, row: usize) -> RowView<'_> {
        RowView { ds: self, row }
    }

    pub fn row_values(&self, row: usize) -> Vec<Option<f64>> {
        self.columns.iter().map(|c| c[row]).collect()
    }

    pub fn indices_of(&self, domain: Domain) -> Vec<usize> {
        (0..self.n_rows())
            .filter(|&i| self.domains[i] == domain)
            .collect()
    }

    pub fn count(&self, domain: Domain) -> usize {
        self.domains.iter().filter(|&&d| d == domain).count()
    }

    pub fn n_missing(&self) -> usize {
        self.columns
            .iter()
            .map(|c| c.iter().filter(|v| v.is_none()).count())
            .sum()
    }

    pub fn n_present(&self) -> usize {
        self.n_rows() * self.n_cols() - self.n_missing()
    }

    /// Rows in the given order; indices may repeat.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            domains: rows.iter().map(|&r| self.domains[r]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    pub fn filter_domain(&self, domain: Domain) -> Dataset {
        self.select_rows(&self.indices_of(domain))
    }

    /// Same rows, every row retagged.
    pub fn with_domain(mut self, domain: Domain) -> Dataset {
        self.domains.iter_mut().for_each(|d| *d = domain);
        self
    }

    pub fn with_labels(mut self, labels: Vec<u8>) -> Result<Dataset> {
        if labels.len() != self.n_rows() {
            return Err(Error::LengthMismatch {
                left: self.n_rows(),
                right: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    /// Stacks `other` below `self`. Feature names come from `self`.
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if self.n_cols() != other.n_cols() {
            return Err(Error::FeatureCountMismatch {
                expected: self.n_cols(),
                found: other.n_cols(),
            });
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        let labels = self.labels.iter().chain(&other.labels).copied().collect();
        let domains = self.domains.iter().chain(&other.domains).copied().collect();
        Ok(Dataset {
            columns,
            labels,
            domains,
            feature_names: self.feature_names.clone(),
        })
    }

    /// Checks the preconditions of transfer training.
    pub fn require_both_domains(&self) -> Result<()> {
        if self.count(Domain::Target) == 0 {
            return Err(Error::EmptyTarget);
        }
        if self.count(Domain::Source) == 0 {
            return Err(Error::EmptySource);
        }
        Ok(())
    }

    pub(crate) fn map_present(&self, mut f: impl FnMut(usize, usize, f64) -> Option<f64>) -> Dataset {
        let columns = self
            .columns
            .iter()
            .enumerate()
            .map(|(c, col)| {
                col.iter()
                    .enumerate()
                    .map(|(r, v)| v.and_then(|x| f(r, c, x)))
                    .collect()
            })
            .collect();
        Dataset {
            columns,
            labels: self.labels.clone(),
            domains: self.domains.clone(),
            feature_names: self.feature_names.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset {
        Dataset::from_rows(
            &[vec![Some(1.0), None], vec![Some(2.0), Some(3.0)]],
            vec![0, 1],
            vec![Domain::Source, Domain::Target],
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_binary_labels() {
        let err = Dataset::from_rows(&[vec![Some(1.0)]], vec![2], vec![Domain::Target]);
        assert!(matches!(err, Err(Error::BadLabel { .. })));
    }

    #[test]
    fn rejects_non_finite_cells() {
        let err = Dataset::from_rows(&[vec![Some(f64::NAN)]], vec![0], vec![Domain::Target]);
        assert!(matches!(err, Err(Error::BadValue { .. })));
    }

    #[test]
    fn domain_helpers() {
        let ds = tiny();
        assert_eq!(ds.count(Domain::Source), 1);
        assert_eq!(ds.indices_of(Domain::Target), vec![1]);
        assert_eq!(ds.n_missing(), 1);
        assert!(ds.require_both_domains().is_ok());
        assert!(matches!(
            ds.filter_domain(Domain::Source).require_both_domains(),
            Err(Error::EmptyTarget)
        ));
        assert!(matches!(
            ds.filter_domain(Domain::Target).require_both_domains(),
            Err(Error::EmptySource)
        ));
    }

    #[test]
    fn concat_and_select() {
        let ds = tiny();
        let both = ds.concat(&ds).unwrap();
        assert_eq!(both.n_rows(), 4);
        assert_eq!(both.select_rows(&[3, 0]).row_values(0), vec![Some(2.0), Some(3.0)]);
    }
}
