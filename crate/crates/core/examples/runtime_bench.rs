//! Training time as the data is replicated.

use transboost::boost::TransBoostConfig;
use transboost::data::synth::{shifted_domains, ShiftSpec};
use transboost::eval::run_runtime_bench;

fn main() -> transboost::Result<()> {
    let ds = shifted_domains(
        &ShiftSpec {
            n_source: 3000,
            n_target: 1000,
            ..Default::default()
        },
        2,
    );
    let config = TransBoostConfig {
        n_rounds: 20,
        ..Default::default()
    };
    let report = run_runtime_bench(&ds, &[1.0, 2.0, 4.0], 3, &config)?;
    for size in report.sizes() {
        println!("rows={size:<6} median={:.4}s", report.median_seconds(size));
    }
    println!("monotone={}", report.is_monotone());
    Ok(())
}
