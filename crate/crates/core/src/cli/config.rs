use std::path::{Path, PathBuf};

use crate::boost::TransBoostConfig;
use crate::data::synth::ShiftSpec;
use crate::error::{Error, Result};
use crate::eval::Algorithm;

/// Everything a command needs: where the data lives, hyperparameters and
/// outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub train: TransBoostConfig,
    /// One CSV holding both domains, tagged by `domain_col`.
    pub data: Option<PathBuf>,
    /// Source-only and target-only CSV files.
    pub source_data: Option<PathBuf>,
    pub target_data: Option<PathBuf>,
    /// Directory holding the red and white wine-quality files.
    pub wine_dir: Option<PathBuf>,
    /// Generate shifted synthetic domains instead of reading files.
    pub synthetic: Option<ShiftSpec>,
    pub label_col: String,
    pub domain_col: String,
    pub source_tag: String,
    pub target_tag: String,
    /// Model read by `predict`, `eval` and `importance`.
    pub model: Option<PathBuf>,
    pub model_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
    pub fractions: Vec<f64>,
    pub keep_rates: Vec<f64>,
    /// Oracle trials, sweep seeds or runtime repeats, depending on the command.
    pub trials: Option<usize>,
    pub algorithms: Vec<Algorithm>,
    /// Held-out target rows for CSV and synthetic data; defaults to 30%.
    pub test_rows: Option<usize>,
    pub multipliers: Vec<f64>,
    /// Default-rate thresholds for approval ratios.
    pub rates: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            train: TransBoostConfig::default(),
            data: None,
            source_data: None,
            target_data: None,
            wine_dir: None,
            synthetic: None,
            label_col: "label".into(),
            domain_col: "domain".into(),
            source_tag: "source".into(),
            target_tag: "target".into(),
            model: None,
            model_out: None,
            report_out: None,
            fractions: (1..=10).map(|i| i as f64 / 10.0).collect(),
            keep_rates: vec![0.01, 0.05, 0.1, 0.25, 0.5, 1.0],
            trials: None,
            algorithms: Algorithm::ALL.to_vec(),
            test_rows: None,
            multipliers: vec![1.0, 2.0],
            rates: vec![0.02, 0.05, 0.1, 0.15, 0.2, 0.3],
        }
    }
}

/// Parses `0.1, 0.2,0.5` into reals.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = value
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {p:?} in {key}")))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(Error::Config(format!("{key} is empty")));
    }
    Ok(values)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

impl RunConfig {
    /// Sets one key. Relative paths are resolved against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = || base.join(value.trim());
        let value = value.trim();
        match key {
            "data" => self.data = Some(path()),
            "source_data" => self.source_data = Some(path()),
            "target_data" => self.target_data = Some(path()),
            "wine_dir" => self.wine_dir = Some(path()),
            "model" => self.model = Some(path()),
            "model_out" => self.model_out = Some(path()),
            "report_out" => self.report_out = Some(path()),
            "label_col" => self.label_col = value.into(),
            "domain_col" => self.domain_col = value.into(),
            "source_tag" => self.source_tag = value.into(),
            "target_tag" => self.target_tag = value.into(),
            "fractions" => self.fractions = parse_list(key, value)?,
            "keep_rates" => self.keep_rates = parse_list(key, value)?,
            "multipliers" => self.multipliers = parse_list(key, value)?,
            "rates" => self.rates = parse_list(key, value)?,
            "trials" => self.trials = Some(parse(key, value)?),
            "test_rows" => self.test_rows = Some(parse(key, value)?),
            "algorithms" => {
                self.algorithms = value
                    .split(',')
                    .map(str::parse)
                    .collect::<Result<_>>()?;
            }
            "synthetic_source" | "synthetic_target" | "synthetic_features" | "synthetic_missing"
            | "covariate_shift" | "concept_shift" => {
                let spec = self.synthetic.get_or_insert_with(ShiftSpec::default);
                match key {
                    "synthetic_source" => spec.n_source = parse(key, value)?,
                    "synthetic_target" => spec.n_target = parse(key, value)?,
                    "synthetic_features" => spec.n_features = parse(key, value)?,
                    "synthetic_missing" => spec.missing_rate = parse(key, value)?,
                    "covariate_shift" => spec.covariate_shift = parse(key, value)?,
                    _ => spec.concept_shift = parse(key, value)?,
                }
            }
            _ => self.train.set(key, value)?,
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, base: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v, base)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut rc = RunConfig::default();
        rc.apply_text(&text, path.parent().unwrap_or(Path::new("")))?;
        Ok(rc)
    }

    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if self.fractions.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return Err(Error::Config("fractions must be in (0, 1]".into()));
        }
        if self.keep_rates.iter().any(|&k| !(0.0..=1.0).contains(&k)) {
            return Err(Error::Config("keep rates must be in [0, 1]".into()));
        }
        if self.multipliers.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::Config("multipliers must be positive".into()));
        }
        if self.trials == Some(0) {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if let Some(spec) = &self.synthetic {
            if spec.n_source == 0 || spec.n_target < 2 || spec.n_features == 0 {
                return Err(Error::Config("synthetic sizes too small".into()));
            }
            if !(0.0..1.0).contains(&spec.missing_rate) {
                return Err(Error::Config("synthetic_missing must be in [0, 1)".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_keys_and_comments() {
        let mut rc = RunConfig::default();
        rc.apply_text(
            "# profile\nn_rounds = 12  # trees\nfractions = 0.5, 1.0\nwine_dir = data\ndecay = true\n\n",
            Path::new("/base"),
        )
        .unwrap();
        assert_eq!(rc.train.n_rounds, 12);
        assert!(rc.train.decay);
        assert_eq!(rc.fractions, vec![0.5, 1.0]);
        assert_eq!(rc.wine_dir, Some(PathBuf::from("/base/data")));
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut rc = RunConfig::default();
        assert!(matches!(
            rc.apply_text("depth_of_field = 3\n", Path::new("")),
            Err(Error::Config(_))
        ));
        assert!(rc.apply_text("just words\n", Path::new("")).is_err());
    }

    #[test]
    fn synthetic_keys_build_a_spec() {
        let mut rc = RunConfig::default();
        rc.apply_text("synthetic_source = 100\nsynthetic_target = 40\n", Path::new("")).unwrap();
        let spec = rc.synthetic.unwrap();
        assert_eq!((spec.n_source, spec.n_target), (100, 40));
    }

    #[test]
    fn bad_fraction_fails_validation() {
        let rc = RunConfig {
            fractions: vec![0.0],
            ..Default::default()
        };
        assert!(rc.validate().is_err());
    }
}
