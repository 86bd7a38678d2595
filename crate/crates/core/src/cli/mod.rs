//! Command-line front end.
//!
//! Exit codes: 0 success, 1 config error, 2 data error, 3 check failure.

mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use self::commands::{
    cmd_eval, cmd_importance, cmd_oracle_check, cmd_predict, cmd_runtime, cmd_sparsity, cmd_sweep, cmd_train,
    load_dataset, train_test_split,
};
pub use self::config::{parse_list, RunConfig};
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "transboost", version, about = "Transfer-learning gradient boosted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model and write it with a training log.
    Train,
    /// Write per-row probabilities of a saved model.
    Predict,
    /// Compare learners on the held-out target rows.
    Eval,
    /// AUC over target fractions, seeds and learners.
    Sweep,
    /// AUC under increasing feature sparsity.
    Sparsity,
    /// Training time against row count.
    Runtime,
    /// Compare closed-form weights with numerically solved kernel mean matching.
    OracleCheck,
    /// Split-gain feature importance of a saved model.
    Importance,
}

#[derive(Debug, Args)]
struct Flags {
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    #[arg(long, global = true)]
    label_col: Option<String>,
    #[arg(long, global = true)]
    domain_col: Option<String>,
    #[arg(long, global = true)]
    source_tag: Option<String>,
    #[arg(long, global = true)]
    target_tag: Option<String>,
    #[arg(long, global = true)]
    rounds: Option<usize>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    eta: Option<f64>,
    #[arg(long, global = true)]
    lambda_balance: Option<f64>,
    #[arg(long, global = true)]
    lambda_reg: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    min_leaf: Option<usize>,
    #[arg(long, global = true)]
    max_bins: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    #[arg(long, global = true)]
    model_out: Option<PathBuf>,
    #[arg(long, global = true)]
    report_out: Option<PathBuf>,
    /// Comma-separated target fractions.
    #[arg(long, global = true)]
    fractions: Option<String>,
    /// Comma-separated keep rates.
    #[arg(long, global = true)]
    keep_rates: Option<String>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Decay the source weight over rounds.
    #[arg(long, global = true)]
    decay: bool,
}

impl Flags {
    fn into_config(self) -> Result<RunConfig, Error> {
        let mut rc = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let here = Path::new("");
        let mut set = |key: &str, value: Option<String>| match value {
            Some(v) => rc.set(key, &v, here),
            None => Ok(()),
        };
        let path = |p: Option<PathBuf>| p.map(|p| p.to_string_lossy().into_owned());
        let num = |v: Option<f64>| v.map(|v| v.to_string());
        let int = |v: Option<usize>| v.map(|v| v.to_string());
        set("data", path(self.data))?;
        set("label_col", self.label_col)?;
        set("domain_col", self.domain_col)?;
        set("source_tag", self.source_tag)?;
        set("target_tag", self.target_tag)?;
        set("n_rounds", int(self.rounds))?;
        set("max_depth", int(self.depth))?;
        set("eta", num(self.eta))?;
        set("lambda_balance", num(self.lambda_balance))?;
        set("lambda_reg", num(self.lambda_reg))?;
        set("gamma", num(self.gamma))?;
        set("min_leaf_size", int(self.min_leaf))?;
        set("max_bins", int(self.max_bins))?;
        set("seed", self.seed.map(|s| s.to_string()))?;
        set("model", path(self.model))?;
        set("model_out", path(self.model_out))?;
        set("report_out", path(self.report_out))?;
        set("fractions", self.fractions)?;
        set("keep_rates", self.keep_rates)?;
        set("trials", int(self.trials))?;
        if self.decay {
            set("decay", Some("true".into()))?;
        }
        rc.validate()?;
        Ok(rc)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_DATA,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// its exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let rc = match cli.flags.into_config() {
        Ok(rc) => rc,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let result = match cli.command {
        Command::Train => cmd_train(&rc, out),
        Command::Predict => cmd_predict(&rc, out),
        Command::Eval => cmd_eval(&rc, out),
        Command::Sweep => cmd_sweep(&rc, out, err),
        Command::Sparsity => cmd_sparsity(&rc, out, err),
        Command::Runtime => cmd_runtime(&rc, out),
        Command::OracleCheck => cmd_oracle_check(&rc, out),
        Command::Importance => cmd_importance(&rc, out),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
