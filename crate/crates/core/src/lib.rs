//! Regression from a small budget of noisy labels plus ordinal side information.
//!
//! Two estimators sit at the center:
//!
//! * [`r2`]: rank, isotonic-regress the labeled points along the ranking, impute every
//!   unlabeled point from its nearest labeled predecessor, then predict by k-NN.
//! * [`clr`]: learn the direction of a linear target from pairwise comparisons of sample
//!   differences and its scale from a few labels.
//!
//! Around them: label-only baselines, simulated oracles and data, rank aggregation from
//! comparisons, and a budgeted experiment runner ([`bench`]).

pub mod aggregate;
pub mod baselines;
pub mod bench;
pub mod checks;
pub mod clr;
pub mod data;
pub mod error;
pub mod io;
pub mod isotonic;
pub mod neighbors;
pub mod oracle;
pub mod r2;
pub mod synthetic;

pub use data::{kendall_tau, mse, ranking_from_values, Comparison, ComparisonSet, ModelBounds, Ranking, SampleSet};
pub use error::{Error, Result};
