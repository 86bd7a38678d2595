use crate::data::DEFAULT_MAX_BINS;
use crate::error::{Error, Result};
use crate::tree::GrowParams;

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TransBoostConfig {
    pub n_rounds: usize,
    pub max_depth: usize,
    /// Shrinkage applied to every leaf weight.
    pub eta: f64,
    /// Multiplier on the reweighted source loss.
    pub lambda_balance: f64,
    /// L2 penalty on leaf weights.
    pub lambda_reg: f64,
    /// Per-leaf complexity penalty, subtracted from split gains.
    pub gamma: f64,
    pub min_leaf_size: usize,
    pub min_gain: f64,
    pub max_bins: usize,
    /// Added to both leaf counts in the marginal weight ratio.
    pub eps_smooth: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    /// Probabilities are clamped to `[p_min, 1 − p_min]`.
    pub p_min: f64,
    /// Multiply the source weights by `(N_T / N_S)^(k / n_rounds)` in round `k`.
    pub decay: bool,
    pub seed: u64,
}

impl Default for TransBoostConfig {
    fn default() -> Self {
        TransBoostConfig {
            n_rounds: 40,
            max_depth: 4,
            eta: 0.3,
            lambda_balance: 1.0,
            lambda_reg: 1.0,
            gamma: 0.0,
            min_leaf_size: 1,
            min_gain: 0.0,
            max_bins: DEFAULT_MAX_BINS,
            eps_smooth: 1.0,
            beta_min: 0.01,
            beta_max: 100.0,
            p_min: 1e-6,
            decay: false,
            seed: 0,
        }
    }
}

impl TransBoostConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.n_rounds == 0 {
            return fail("n_rounds must be at least 1");
        }
        if self.max_depth == 0 {
            return fail("max_depth must be at least 1");
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return fail("eta must be in (0, 1]");
        }
        for (name, v) in [
            ("lambda_balance", self.lambda_balance),
            ("lambda_reg", self.lambda_reg),
            ("gamma", self.gamma),
            ("min_gain", self.min_gain),
            ("eps_smooth", self.eps_smooth),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and >= 0")));
            }
        }
        if self.min_leaf_size == 0 {
            return fail("min_leaf_size must be at least 1");
        }
        if !(2..u16::MAX as usize).contains(&self.max_bins) {
            return fail("max_bins must be in 2..65535");
        }
        if !(self.beta_min >= 0.0 && self.beta_min <= self.beta_max) || self.beta_min.is_infinite() {
            return fail("need 0 <= beta_min <= beta_max");
        }
        if !(self.p_min > 0.0 && self.p_min < 0.5) {
            return fail("p_min must be in (0, 0.5)");
        }
        Ok(())
    }

    pub fn grow_params(&self) -> GrowParams {
        GrowParams {
            max_depth: self.max_depth,
            min_leaf_size: self.min_leaf_size,
            min_gain: self.min_gain,
            lambda_reg: self.lambda_reg,
            gamma: self.gamma,
        }
    }

    pub fn weight_params(&self) -> WeightParams {
        WeightParams {
            eps_smooth: self.eps_smooth,
            p_min: self.p_min,
            beta_min: self.beta_min,
            beta_max: self.beta_max,
        }
    }

    /// `(key, value)` pairs in a fixed order, as written to model files.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let real = |v: f64| format!("{v:.16e}");
        vec![
            ("n_rounds", self.n_rounds.to_string()),
            ("max_depth", self.max_depth.to_string()),
            ("eta", real(self.eta)),
            ("lambda_balance", real(self.lambda_balance)),
            ("lambda_reg", real(self.lambda_reg)),
            ("gamma", real(self.gamma)),
            ("min_leaf_size", self.min_leaf_size.to_string()),
            ("min_gain", real(self.min_gain)),
            ("max_bins", self.max_bins.to_string()),
            ("eps_smooth", real(self.eps_smooth)),
            ("beta_min", real(self.beta_min)),
            ("beta_max", real(self.beta_max)),
            ("p_min", real(self.p_min)),
            ("decay", self.decay.to_string()),
            ("seed", self.seed.to_string()),
        ]
    }

    /// Sets one hyperparameter from its textual form. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
        }
        match key {
            "n_rounds" => self.n_rounds = parse(key, value)?,
            "max_depth" => self.max_depth = parse(key, value)?,
            "eta" => self.eta = parse(key, value)?,
            "lambda_balance" => self.lambda_balance = parse(key, value)?,
            "lambda_reg" => self.lambda_reg = parse(key, value)?,
            "gamma" => self.gamma = parse(key, value)?,
            "min_leaf_size" => self.min_leaf_size = parse(key, value)?,
            "min_gain" => self.min_gain = parse(key, value)?,
            "max_bins" => self.max_bins = parse(key, value)?,
            "eps_smooth" => self.eps_smooth = parse(key, value)?,
            "beta_min" => self.beta_min = parse(key, value)?,
            "beta_max" => self.beta_max = parse(key, value)?,
            "p_min" => self.p_min = parse(key, value)?,
            "decay" => self.decay = parse_bool(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}

pub(crate) fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("bad boolean {value:?} for {key}"))),
    }
}

/// Smoothing, clamping and clipping used by the closed-form weight update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    pub eps_smooth: f64,
    pub p_min: f64,
    pub beta_min: f64,
    pub beta_max: f64,
}

impl WeightParams {
    /// No smoothing and no clipping; the clamp only guards against exact 0/1.
    pub fn raw() -> Self {
        WeightParams {
            eps_smooth: 0.0,
            p_min: 1e-15,
            beta_min: 0.0,
            beta_max: f64::INFINITY,
        }
    }
}
