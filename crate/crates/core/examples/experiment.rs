//! Run a bundled experiment config and print its summary.
//!
//! `cargo run --release --example experiment -- configs/perfect_ranking.toml`

use std::path::PathBuf;

use ordreg::bench::{run_experiment, summarize, ExperimentConfig};

fn main() -> ordreg::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/demo.toml"));
    let cfg = ExperimentConfig::from_path(&path)?;
    let records = run_experiment(&cfg)?;
    println!("{}: {} fits", cfg.name, records.len());
    for row in summarize(&records, None) {
        println!("{:<16} m={:<4} n={:<5} mean {:.4} median {:.4}", row.method, row.m, row.n, row.mean_mse, row.median_mse);
    }
    Ok(())
}
