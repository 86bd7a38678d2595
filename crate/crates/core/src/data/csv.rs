use std::path::Path;

use super::{Dataset, Domain};
use crate::error::{Error, Result};

/// Where a row's domain tag comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSource {
    /// A column whose values name the domain. Matching is case-insensitive.
    Column {
        name: String,
        source_tag: String,
        target_tag: String,
    },
    /// Every row of the file gets this tag.
    Fixed(Domain),
}

impl DomainSource {
    pub fn column(name: impl Into<String>) -> Self {
        DomainSource::Column {
            name: name.into(),
            source_tag: "source".into(),
            target_tag: "target".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub label_column: String,
    pub domain: DomainSource,
    /// Cell contents (after trimming) that parse as a missing value.
    pub missing_tokens: Vec<String>,
    pub delimiter: u8,
}

impl CsvOptions {
    pub fn new(label_column: impl Into<String>, domain: DomainSource) -> Self {
        CsvOptions {
            label_column: label_column.into(),
            domain,
            missing_tokens: vec![String::new(), "NA".into()],
            delimiter: b',',
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, opts)
}

pub(crate) fn read_csv(reader: impl std::io::Read, opts: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let label_idx = find(&opts.label_column)?;
    let domain_idx = match &opts.domain {
        DomainSource::Column { name, .. } => Some(find(name)?),
        DomainSource::Fixed(_) => None,
    };
    let feature_idx: Vec<usize> = (0..header.len())
        .filter(|&i| i != label_idx && Some(i) != domain_idx)
        .collect();
    let names = feature_idx.iter().map(|&i| header[i].clone()).collect();

    let mut columns = vec![Vec::new(); feature_idx.len()];
    let mut labels = Vec::new();
    let mut domains = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::MalformedRow {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        let raw_label = record[label_idx].trim();
        let label = match raw_label.parse::<i64>() {
            Ok(v @ 0..=1) => v as u8,
            _ => {
                return Err(Error::BadLabel {
                    row,
                    value: raw_label.to_string(),
                })
            }
        };
        labels.push(label);
        domains.push(match (&opts.domain, domain_idx) {
            (DomainSource::Fixed(d), _) => *d,
            (
                DomainSource::Column {
                    source_tag,
                    target_tag,
                    ..
                },
                Some(i),
            ) => {
                let tag = record[i].trim();
                if tag.eq_ignore_ascii_case(source_tag) {
                    Domain::Source
                } else if tag.eq_ignore_ascii_case(target_tag) {
                    Domain::Target
                } else {
                    return Err(Error::BadDomain {
                        row,
                        value: tag.to_string(),
                    });
                }
            }
            (DomainSource::Column { .. }, None) => unreachable!(),
        });
        for (slot, &i) in columns.iter_mut().zip(&feature_idx) {
            slot.push(parse_cell(record[i].trim(), &opts.missing_tokens, row, &header[i])?);
        }
    }
    Dataset::new(columns, labels, domains, names)
}

fn parse_cell(cell: &str, missing_tokens: &[String], row: usize, column: &str) -> Result<Option<f64>> {
    if missing_tokens.iter().any(|t| t == cell) {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::BadValue {
            row,
            column: column.to_string(),
            value: cell.to_string(),
        }),
    }
}

/// Feature rows of a file that may lack labels and domain tags.
///
/// Every column not named in `skip` is a feature, in file order. Returns
/// the feature names and the row-major values.
pub fn load_feature_rows(
    path: impl AsRef<Path>,
    skip: &[&str],
    opts: &CsvOptions,
) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .flexible(true)
        .from_reader(file);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let keep: Vec<usize> = (0..header.len())
        .filter(|&i| !skip.contains(&header[i].as_str()))
        .collect();
    let mut rows = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::MalformedRow {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        rows.push(
            keep.iter()
                .map(|&i| parse_cell(record[i].trim(), &opts.missing_tokens, row, &header[i]))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok((keep.iter().map(|&i| header[i].clone()).collect(), rows))
}

/// Writes features, then `label`, then `domain`. Missing cells are empty and
/// values use the shortest representation that parses back exactly.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(ds, file)
}

pub(crate) fn write_csv_to(ds: &Dataset, writer: impl std::io::Write) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = ds.feature_names().iter().map(String::as_str).collect();
    header.push("label");
    header.push("domain");
    wtr.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for r in 0..ds.n_rows() {
        record.clear();
        for c in 0..ds.n_cols() {
            record.push(ds.value(r, c).map(|v| v.to_string()).unwrap_or_default());
        }
        record.push(ds.labels()[r].to_string());
        record.push(ds.domains()[r].as_str().to_string());
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}
