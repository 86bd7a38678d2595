//! Target-fraction sweep on the wine-quality data.
//!
//! Expects `winequality-red.csv` and `winequality-white.csv` under `data/`
//! (or the directory given as the first argument).

use transboost::boost::TransBoostConfig;
use transboost::eval::wine::{load_wine, wine_paths, wine_split};
use transboost::eval::{run_fraction_sweep, Algorithm};
use transboost::seed::child_seed;

fn main() -> transboost::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../data").into());
    let (red, white) = wine_paths(&dir);
    if !white.exists() {
        println!("{} not found; nothing to do", white.display());
        return Ok(());
    }
    let ds = load_wine(red, white)?;
    let (train, test) = wine_split(&ds, 0)?;
    let seeds: Vec<u64> = (0..3).map(|i| child_seed(0, "sweep", i)).collect();
    let report = run_fraction_sweep(
        &train,
        &test,
        &[0.1, 0.3, 1.0],
        &seeds,
        &[Algorithm::TransBoost, Algorithm::TargetOnly],
        &TransBoostConfig::default(),
    );
    print!("{}", report.summary_csv());
    Ok(())
}
