//! Transfer-learning gradient boosted decision trees.
//!
//! Two boosting models are trained side by side on a labeled source domain
//! and a (small) labeled target domain. Every round grows one tree structure
//! from the reweighted target objective; the main model (target) and the
//! ancillary model (source) share that structure but keep their own leaf
//! weights. After each round the source instances are reweighted in closed
//! form from the new tree's leaf partition (marginal correction) and the ratio
//! of the two models' label likelihoods (conditional correction).
//!
//! The [`kmm`] module rebuilds the same weights the slow way, by solving the
//! kernel mean matching quadratic program under the tree kernel, and serves as
//! an independent check on [`boost::update_weights`].
//!
//! ```
//! use transboost::data::synth::{shifted_domains, ShiftSpec};
//! use transboost::boost::{train, TransBoostConfig};
//! use transboost::eval::auc;
//!
//! let ds = shifted_domains(&ShiftSpec { n_source: 400, n_target: 200, ..Default::default() }, 7);
//! let config = TransBoostConfig { n_rounds: 10, ..Default::default() };
//! let model = train(&ds, &config).unwrap();
//! let probs = model.predict(&ds).unwrap();
//! assert!(auc(ds.labels(), &probs).unwrap() > 0.5);
//! ```

pub mod boost;
pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod kmm;
pub mod seed;
pub mod tree;

pub use error::{Error, Result};
