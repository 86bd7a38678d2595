use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Learners compared in the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    TransBoost,
    /// Plain GBDT on target rows.
    TargetOnly,
    /// Plain GBDT on both domains, every row weighted 1.
    Pooled,
    /// Plain GBDT with one-shot marginal weights from a domain-classifier tree.
    KmmWeighted,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::TransBoost,
        Algorithm::TargetOnly,
        Algorithm::Pooled,
        Algorithm::KmmWeighted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::TransBoost => "transboost",
            Algorithm::TargetOnly => "target_only",
            Algorithm::Pooled => "pooled",
            Algorithm::KmmWeighted => "kmm_weighted",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

/// Writes a report string to `path`.
pub fn write_report(csv: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, csv).map_err(|e| Error::io(path, e))
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub fraction: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
    /// `None` when training or scoring failed; see `error`.
    pub auc: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub fraction: f64,
    pub algorithm: Algorithm,
    pub mean: f64,
    pub std: f64,
    /// Cells that produced an AUC.
    pub n: usize,
}

/// One row per (fraction, seed, algorithm), sorted by that key.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn sort(&mut self) {
        self.cells.sort_by(|a, b| {
            a.fraction
                .total_cmp(&b.fraction)
                .then(a.seed.cmp(&b.seed))
                .then(a.algorithm.cmp(&b.algorithm))
        });
    }

    /// `fraction,seed,algorithm,auc`; failed cells leave `auc` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("fraction,seed,algorithm,auc\n");
        for c in &self.cells {
            let _ = writeln!(out, "{},{},{},{}", c.fraction, c.seed, c.algorithm, opt_real(c.auc));
        }
        out
    }

    pub fn summary(&self) -> Vec<SweepSummary> {
        let mut keys: Vec<(f64, Algorithm)> = self.cells.iter().map(|c| (c.fraction, c.algorithm)).collect();
        keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        keys.dedup();
        keys.into_iter()
            .map(|(fraction, algorithm)| {
                let aucs: Vec<f64> = self
                    .cells
                    .iter()
                    .filter(|c| c.fraction == fraction && c.algorithm == algorithm)
                    .filter_map(|c| c.auc)
                    .collect();
                let (mean, std) = mean_std(&aucs);
                SweepSummary {
                    fraction,
                    algorithm,
                    mean,
                    std,
                    n: aucs.len(),
                }
            })
            .collect()
    }

    pub fn mean_auc(&self, fraction: f64, algorithm: Algorithm) -> Option<f64> {
        self.summary()
            .into_iter()
            .find(|s| s.fraction == fraction && s.algorithm == algorithm && s.n > 0)
            .map(|s| s.mean)
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("fraction,algorithm,mean_auc,std_auc,n\n");
        for s in self.summary() {
            let _ = writeln!(out, "{},{},{},{},{}", s.fraction, s.algorithm, real(s.mean), real(s.std), s.n);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityCell {
    pub keep_rate: f64,
    pub seed: u64,
    pub auc: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparsityReport {
    pub cells: Vec<SparsityCell>,
}

impl SparsityReport {
    /// `keep_rate,seed,auc`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("keep_rate,seed,auc\n");
        for c in &self.cells {
            let _ = writeln!(out, "{},{},{}", c.keep_rate, c.seed, opt_real(c.auc));
        }
        out
    }

    pub fn mean_auc(&self, keep_rate: f64) -> Option<f64> {
        let aucs: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.keep_rate == keep_rate)
            .filter_map(|c| c.auc)
            .collect();
        (!aucs.is_empty()).then(|| mean_std(&aucs).0)
    }

    /// Mean AUC per keep rate, in first-seen order.
    pub fn means(&self) -> Vec<(f64, Option<f64>)> {
        let mut rates: Vec<f64> = Vec::new();
        for c in &self.cells {
            if !rates.contains(&c.keep_rate) {
                rates.push(c.keep_rate);
            }
        }
        rates.into_iter().map(|r| (r, self.mean_auc(r))).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeCell {
    /// Training rows used.
    pub size: usize,
    pub run: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuntimeReport {
    pub cells: Vec<RuntimeCell>,
}

impl RuntimeReport {
    /// `size,run,seconds`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,run,seconds\n");
        for c in &self.cells {
            let _ = writeln!(out, "{},{},{}", c.size, c.run, real(c.seconds));
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.cells.iter().map(|c| c.size).collect();
        sizes.sort_unstable();
        sizes.dedup();
        sizes
    }

    fn times(&self, size: usize) -> Vec<f64> {
        self.cells.iter().filter(|c| c.size == size).map(|c| c.seconds).collect()
    }

    pub fn mean_seconds(&self, size: usize) -> f64 {
        mean_std(&self.times(size)).0
    }

    pub fn median_seconds(&self, size: usize) -> f64 {
        median(&self.times(size))
    }

    /// True when mean time never decreases with size.
    pub fn is_monotone(&self) -> bool {
        self.sizes()
            .windows(2)
            .all(|w| self.mean_seconds(w[0]) <= self.mean_seconds(w[1]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InclusionRow {
    pub rate: f64,
    pub algorithm: String,
    pub approval_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InclusionReport {
    pub rows: Vec<InclusionRow>,
}

impl InclusionReport {
    /// Approval ratio of every scored model at every default-rate threshold.
    pub fn build(labels: &[u8], scored: &[(String, Vec<f64>)], rates: &[f64]) -> Self {
        let mut rows = Vec::with_capacity(rates.len() * scored.len());
        for &rate in rates {
            for (name, scores) in scored {
                rows.push(InclusionRow {
                    rate,
                    algorithm: name.clone(),
                    approval_ratio: super::approval_ratio(labels, scores, rate),
                });
            }
        }
        InclusionReport { rows }
    }

    /// `rate,algorithm,approval_ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rate,algorithm,approval_ratio\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{}", r.rate, r.algorithm, real(r.approval_ratio));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert!("xgboost".parse::<Algorithm>().is_err());
    }

    #[test]
    fn sweep_csv_header_and_failed_cells() {
        let report = SweepReport {
            cells: vec![
                SweepCell {
                    fraction: 0.5,
                    seed: 1,
                    algorithm: Algorithm::Pooled,
                    auc: Some(0.75),
                    error: None,
                },
                SweepCell {
                    fraction: 0.5,
                    seed: 2,
                    algorithm: Algorithm::Pooled,
                    auc: None,
                    error: Some("boom".into()),
                },
            ],
        };
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "fraction,seed,algorithm,auc");
        assert_eq!(lines[1], "0.5,1,pooled,7.5000000000000000e-1");
        assert_eq!(lines[2], "0.5,2,pooled,");
        assert_eq!(report.mean_auc(0.5, Algorithm::Pooled), Some(0.75));
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn inclusion_is_monotone_in_rate() {
        let labels = [0, 1, 0, 0, 1, 0, 1, 0];
        let scores = vec![0.1, 0.5, 0.2, 0.3, 0.9, 0.15, 0.4, 0.05];
        let rates = [0.0, 0.1, 0.2, 0.3, 0.5, 1.0];
        let r = InclusionReport::build(&labels, &[("m".into(), scores)], &rates);
        assert!(r.rows.windows(2).all(|w| w[0].approval_ratio <= w[1].approval_ratio));
        assert!(r.to_csv().starts_with("rate,algorithm,approval_ratio\n"));
    }
}
