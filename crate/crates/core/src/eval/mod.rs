//! Metrics, reports and experiment harnesses.

mod harness;
mod metrics;
mod report;
pub mod wine;

pub use self::harness::{
    pilot_weights, resize, run_fraction_sweep, run_runtime_bench, run_sparsity_bench, train_algorithm,
};
pub use self::metrics::{approval_ratio, auc};
pub use self::report::{
    mean_std, median, write_report, Algorithm, InclusionReport, InclusionRow, RuntimeCell, RuntimeReport,
    SparsityCell, SparsityReport, SweepCell, SweepReport, SweepSummary,
};
