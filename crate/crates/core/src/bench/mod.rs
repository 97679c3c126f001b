//! Budgeted experiments: configs, the trial runner, sweeps and summaries.

pub mod budget;
pub mod config;
pub mod method;
pub mod runner;
pub mod sweep;

pub use budget::{allocate_budget, audit_usage, BudgetPlan};
pub use config::{BudgetConfig, Cell, ExperimentConfig, GeneratorConfig, RankingConfig, SweepAxis, SweepConfig};
pub use method::{Method, RankSource};
pub use runner::{derive_seed, read_records, trial_seeds, universe_size, run_experiment, write_records, ResultRecord};
pub use sweep::{median, read_summary, summarize, sweep, sweep_from_config, write_summary, SummaryRow, SweepOutput};
