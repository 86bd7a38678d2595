use std::io::Write;
use std::path::{Path, PathBuf};

use super::RunConfig;
use crate::boost::{read_model, train_with_log, write_model};
use crate::data::synth::shifted_domains;
use crate::data::{load_csv, load_feature_rows, split_target, CsvOptions, Dataset, Domain, DomainSource};
use crate::error::{Error, Result};
use crate::eval::wine::{load_wine, wine_paths, wine_split};
use crate::eval::{
    auc, run_fraction_sweep, run_runtime_bench, run_sparsity_bench, train_algorithm, write_report, InclusionReport,
};
use crate::kmm::run_oracle_trials;
use crate::seed;

/// Largest oracle deviation that still passes.
const ORACLE_TOLERANCE: f64 = 1e-6;

fn csv_options(rc: &RunConfig, domain: DomainSource) -> CsvOptions {
    CsvOptions::new(rc.label_col.clone(), domain)
}

/// Loads the configured data: a tagged CSV, a source/target file pair, the
/// wine-quality files, or synthetic domains, in that order of preference.
pub fn load_dataset(rc: &RunConfig) -> Result<Dataset> {
    if let Some(path) = &rc.data {
        let domain = DomainSource::Column {
            name: rc.domain_col.clone(),
            source_tag: rc.source_tag.clone(),
            target_tag: rc.target_tag.clone(),
        };
        return load_csv(path, &csv_options(rc, domain));
    }
    match (&rc.source_data, &rc.target_data) {
        (Some(s), Some(t)) => {
            let source = load_csv(s, &csv_options(rc, DomainSource::Fixed(Domain::Source)))?;
            let target = load_csv(t, &csv_options(rc, DomainSource::Fixed(Domain::Target)))?;
            return source.concat(&target);
        }
        (None, None) => {}
        _ => return Err(Error::Config("source_data and target_data go together".into())),
    }
    if let Some(dir) = &rc.wine_dir {
        let (red, white) = wine_paths(dir);
        return load_wine(red, white);
    }
    if let Some(spec) = &rc.synthetic {
        return Ok(shifted_domains(spec, rc.train.seed));
    }
    Err(Error::Config("no data configured; set --data or a profile".into()))
}

/// `(train, test)` with `test` a held-out slice of the target rows.
pub fn train_test_split(rc: &RunConfig) -> Result<(Dataset, Dataset)> {
    let ds = load_dataset(rc)?;
    if rc.data.is_none() && rc.source_data.is_none() && rc.wine_dir.is_some() {
        return wine_split(&ds, rc.train.seed);
    }
    let n_target = ds.count(Domain::Target);
    let n_test = rc.test_rows.unwrap_or((n_target as f64 * 0.3).round() as usize);
    split_target(&ds, n_test, seed::child_seed(rc.train.seed, "split", 0))
}

/// Training rows for `train` and `runtime`: the wine training split, or the
/// whole dataset otherwise.
fn training_rows(rc: &RunConfig) -> Result<Dataset> {
    if rc.data.is_none() && rc.source_data.is_none() && rc.wine_dir.is_some() {
        return train_test_split(rc).map(|(train, _)| train);
    }
    load_dataset(rc)
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("{flag} is required")))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(rc: &RunConfig, out: &mut dyn Write, text: &str) -> Result<()> {
    match &rc.report_out {
        Some(path) => write_report(text, path),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn say(out: &mut dyn Write, line: String) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

fn seeds(rc: &RunConfig, default: usize) -> Vec<u64> {
    (0..rc.trials.unwrap_or(default) as u64)
        .map(|i| seed::child_seed(rc.train.seed, "sweep", i))
        .collect()
}

/// Trains on the configured data and writes the model plus a `key=value`
/// log next to it (or to `--report-out`).
pub fn cmd_train(rc: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let model_out = require(&rc.model_out, "--model-out")?;
    let ds = training_rows(rc)?;
    let (model, log) = train_with_log(&ds, &rc.train)?;
    write_model(&model, model_out)?;

    let mut text = format!(
        "rows={} source={} target={} features={} rounds={} seed={}\n",
        ds.n_rows(),
        ds.count(Domain::Source),
        ds.count(Domain::Target),
        ds.n_cols(),
        rc.train.n_rounds,
        rc.train.seed
    );
    for r in &log.rounds {
        text.push_str(&r.to_log_line());
        text.push('\n');
    }
    let log_path = rc.report_out.clone().unwrap_or_else(|| {
        let mut p = model_out.as_os_str().to_owned();
        p.push(".log");
        PathBuf::from(p)
    });
    write_file(&log_path, &text)?;
    say(
        out,
        format!(
            "model={} trees={} log={}",
            model_out.display(),
            model.trees.len(),
            log_path.display()
        ),
    )?;
    Ok(true)
}

/// Writes `row,probability` for every row of `--data`.
pub fn cmd_predict(rc: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let model = read_model(require(&rc.model, "--model")?)?;
    let data = require(&rc.data, "--data")?;
    let opts = csv_options(rc, DomainSource::Fixed(Domain::Target));
    let (_, rows) = load_feature_rows(data, &[&rc.label_col, &rc.domain_col], &opts)?;
    let probs = model.predict_rows(&rows)?;
    let mut text = String::from("row,probability\n");
    for (i, p) in probs.iter().enumerate() {
        text.push_str(&format!("{i},{p:.16e}\n"));
    }
    emit(rc, out, &text)?;
    Ok(true)
}

/// Trains every configured learner, prints its test AUC and writes approval
/// ratios at the configured default-rate thresholds.
pub fn cmd_eval(rc: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let (train, test) = train_test_split(rc)?;
    let mut scored = Vec::new();
    for &algorithm in &rc.algorithms {
        let model = train_algorithm(&train, algorithm, &rc.train)?;
        let probs = model.predict(&test)?;
        let a = auc(test.labels(), &probs)?;
        if rc.report_out.is_some() {
            say(out, format!("algorithm={algorithm} auc={a:.16e}"))?;
        }
        scored.push((algorithm.to_string(), probs));
    }
    let report = InclusionReport::build(test.labels(), &scored, &rc.rates);
    emit(rc, out, &report.to_csv())?;
    Ok(true)
}

/// Writes the per-cell sweep report; failed cells are listed on `err`.
pub fn cmd_sweep(rc: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let (train, test) = train_test_split(rc)?;
    let report = run_fraction_sweep(&train, &test, &rc.fractions, &seeds(rc, 10), &rc.algorithms, &rc.train);
    for c in report.cells.iter().filter(|c| c.error.is_some()) {
        let _ = writeln!(
            err,
            "cell fraction={} seed={} algorithm={} error={}",
            c.fraction,
            c.seed,
            c.algorithm,
            c.error.as_deref().unwrap_or("")
        );
    }
    emit(rc, out, &report.to_csv())?;
    if rc.report_out.is_some() {
        for s in report.summary() {
            say(
                out,
                format!(
                    "fraction={} algorithm={} mean_auc={:.4} std_auc={:.4} n={}",
                    s.fraction, s.algorithm, s.mean, s.std, s.n
                ),
            )?;
        }
    }
    Ok(true)
}

pub fn cmd_sparsity(rc: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let (train, test) = train_test_split(rc)?;
    let report = run_sparsity_bench(&train, &test, &rc.keep_rates, &seeds(rc, 10), &rc.train);
    for c in report.cells.iter().filter(|c| c.error.is_some()) {
        let _ = writeln!(
            err,
            "cell keep_rate={} seed={} error={}",
            c.keep_rate,
            c.seed,
            c.error.as_deref().unwrap_or("")
        );
    }
    emit(rc, out, &report.to_csv())?;
    if rc.report_out.is_some() {
        for (rate, mean) in report.means() {
            say(out, format!("keep_rate={rate} mean_auc={}", mean.map_or("NA".into(), |m| format!("{m:.4}"))))?;
        }
    }
    Ok(true)
}

pub fn cmd_runtime(rc: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let ds = training_rows(rc)?;
    let report = run_runtime_bench(&ds, &rc.multipliers, rc.trials.unwrap_or(10), &rc.train)?;
    emit(rc, out, &report.to_csv())?;
    if rc.report_out.is_some() {
        for size in report.sizes() {
            say(
                out,
                format!(
                    "size={size} mean_seconds={:.6} median_seconds={:.6}",
                    report.mean_seconds(size),
                    report.median_seconds(size)
                ),
            )?;
        }
        say(out, format!("monotone={}", report.is_monotone()))?;
    }
    Ok(true)
}

/// Prints one line per trial and a final PASS or FAIL line. A failing trial
/// makes the command return `false`.
pub fn cmd_oracle_check(rc: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let trials = run_oracle_trials(rc.trials.unwrap_or(100), rc.train.seed);
    let mut text = String::new();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for t in &trials {
        text.push_str(&format!(
            "trial={} source={} target={} leaves={} marginal_dev={:.3e} joint_dev={:.3e} converged={}\n",
            t.trial, t.n_source, t.n_target, t.n_leaves, t.marginal_deviation, t.joint_deviation, t.converged
        ));
        worst = worst.max(t.marginal_deviation).max(t.joint_deviation);
        ok &= t.passes(ORACLE_TOLERANCE);
    }
    let verdict = if ok { "PASS" } else { "FAIL" };
    text.push_str(&format!(
        "{verdict} trials={} max_deviation={worst:.3e} tolerance={ORACLE_TOLERANCE:.0e}\n",
        trials.len()
    ));
    if let Some(path) = &rc.report_out {
        write_report(&text, path)?;
    }
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))?;
    Ok(ok)
}

/// `feature=<id> name=<name> gain=<total>` per used feature, largest first.
pub fn cmd_importance(rc: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    let model = read_model(require(&rc.model, "--model")?)?;
    let mut text = String::new();
    for (f, gain) in model.feature_importance() {
        let name = model.feature_names.get(f).map_or("", String::as_str);
        text.push_str(&format!("feature={f} name={name} gain={gain:.16e}\n"));
    }
    emit(rc, out, &text)?;
    Ok(true)
}
