//! Train on shifted synthetic domains and compare against target-only boosting.

use transboost::boost::{train_target_only, train_with_log, TransBoostConfig};
use transboost::data::split_target;
use transboost::data::synth::{shifted_domains, ShiftSpec};
use transboost::eval::auc;

fn main() -> transboost::Result<()> {
    let spec = ShiftSpec {
        n_source: 2000,
        n_target: 300,
        ..Default::default()
    };
    let ds = shifted_domains(&spec, 11);
    let (train, test) = split_target(&ds, 150, 11)?;

    let config = TransBoostConfig {
        n_rounds: 30,
        ..Default::default()
    };
    let (model, log) = train_with_log(&train, &config)?;
    for r in log.rounds.iter().step_by(10) {
        println!("{}", r.to_log_line());
    }

    let baseline = train_target_only(&train, &config)?;
    println!("transboost  auc={:.4}", auc(test.labels(), &model.predict(&test)?)?);
    println!("target-only auc={:.4}", auc(test.labels(), &baseline.predict(&test)?)?);
    Ok(())
}
