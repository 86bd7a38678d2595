//! AUC as features are randomly blanked out.

use transboost::boost::TransBoostConfig;
use transboost::data::split_target;
use transboost::data::synth::{shifted_domains, ShiftSpec};
use transboost::eval::run_sparsity_bench;

fn main() -> transboost::Result<()> {
    let ds = shifted_domains(
        &ShiftSpec {
            n_source: 1500,
            n_target: 400,
            ..Default::default()
        },
        5,
    );
    let (train, test) = split_target(&ds, 200, 5)?;
    let config = TransBoostConfig {
        n_rounds: 20,
        ..Default::default()
    };
    let report = run_sparsity_bench(&train, &test, &[0.05, 0.25, 1.0], &[1, 2, 3], &config);
    for (rate, mean) in report.means() {
        match mean {
            Some(m) => println!("keep_rate={rate:<5} mean_auc={m:.4}"),
            None => println!("keep_rate={rate:<5} every seed failed"),
        }
    }
    Ok(())
}
