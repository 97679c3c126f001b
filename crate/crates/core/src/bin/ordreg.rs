//! Command-line front end: `gen`, `run`, `sweep`, `check`.
//!
//! Output goes to `$ORDREG_OUT_DIR` (default `ordreg-out`).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ordreg::bench::{run_experiment, summarize, sweep_from_config, write_records, write_summary, ExperimentConfig};
use ordreg::checks::run_checks;
use ordreg::io::write_dataset;
use ordreg::synthetic::{gen_linear, gen_nonparametric, LinearSpec, NonparamSpec};
use ordreg::Result;

#[derive(Parser)]
#[command(name = "ordreg", version, about = "Regression from few labels plus ordinal information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Nonparametric,
    Linear,
}

#[derive(Subcommand)]
enum Command {
    /// Write a simulated dataset: train.csv, test.csv and meta.json.
    Gen {
        #[arg(long, value_enum, default_value = "nonparametric")]
        generator: Generator,
        #[arg(long, default_value_t = 1000)]
        n_train: usize,
        #[arg(long, default_value_t = 1000)]
        n_test: usize,
        /// Feature dimension (default 8 nonparametric, 50 linear).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        label_sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an experiment config; writes <name>.jsonl and <name>_summary.csv.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the config's [sweep] axis; writes <name>_sweep.jsonl and <name>_sweep.csv.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the invariant self-checks.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn out_dir() -> Result<PathBuf> {
    let dir = PathBuf::from(std::env::var("ORDREG_OUT_DIR").unwrap_or_else(|_| "ordreg-out".into()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn load(config: &Path, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_path(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn gen(generator: Generator, n_train: usize, n_test: usize, d: Option<usize>, label_sigma: f64, seed: u64) -> Result<()> {
    let dir = out_dir()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (train, train_truth, test, test_truth, meta) = match generator {
        Generator::Nonparametric => {
            let spec = NonparamSpec { d: d.unwrap_or(8), label_sigma, ..NonparamSpec::default() };
            let data = gen_nonparametric(&spec, n_train, n_test, &mut rng)?;
            let meta = json!({ "generator": "nonparametric", "spec": spec, "seed": seed, "p": data.p,
                               "standardizer": data.standardizer });
            (data.train, data.train_truth, data.test, data.test_truth, meta)
        }
        Generator::Linear => {
            let spec = LinearSpec { d: d.unwrap_or(50), label_sigma, ..LinearSpec::default() };
            let mut data = gen_linear(&spec, n_train, n_test, &mut rng)?;
            let ys = (0..n_train).map(|i| ordreg::oracle::LabelOracle::label(&mut data.labels, i)).collect::<Result<Vec<_>>>()?;
            let train = data.train.with_all_labels(&ys)?;
            let meta = json!({ "generator": "linear", "spec": spec, "seed": seed, "w_star": data.w_star });
            (train, data.train_truth, data.test, data.test_truth, meta)
        }
    };
    write_dataset(create(&dir.join("train.csv"))?, &train, Some(&train_truth))?;
    write_dataset(create(&dir.join("test.csv"))?, &test, Some(&test_truth))?;
    let mut m = create(&dir.join("meta.json"))?;
    serde_json::to_writer_pretty(&mut m, &meta)?;
    m.write_all(b"\n")?;
    m.flush()?;
    eprintln!("wrote {} train and {} test rows to {}", train.n(), test.n(), dir.display());
    Ok(())
}

fn run(config: &Path, seed: Option<u64>) -> Result<()> {
    let cfg = load(config, seed)?;
    let records = run_experiment(&cfg)?;
    let dir = out_dir()?;
    let mut w = create(&dir.join(format!("{}.jsonl", cfg.name)))?;
    write_records(&mut w, &records)?;
    w.flush()?;
    let summary = summarize(&records, None);
    write_summary(create(&dir.join(format!("{}_summary.csv", cfg.name)))?, &summary)?;
    for row in &summary {
        println!("{:<16} m={:<5} n={:<6} mean={:.4} median={:.4} ± {:.4}", row.method, row.m, row.n, row.mean_mse, row.median_mse, row.stderr_mse);
    }
    Ok(())
}

fn sweep(config: &Path, seed: Option<u64>) -> Result<()> {
    let cfg = load(config, seed)?;
    let out = sweep_from_config(&cfg)?;
    let dir = out_dir()?;
    let mut w = create(&dir.join(format!("{}_sweep.jsonl", cfg.name)))?;
    write_records(&mut w, &out.records)?;
    w.flush()?;
    write_summary(create(&dir.join(format!("{}_sweep.csv", cfg.name)))?, &out.summary)?;
    for row in &out.summary {
        println!(
            "{}={:<8} {:<16} m={:<5} n={:<6} mean={:.4} ± {:.4}",
            row.axis.as_deref().unwrap_or(""),
            row.value.unwrap_or(f64::NAN),
            row.method,
            row.m,
            row.n,
            row.mean_mse,
            row.stderr_mse
        );
    }
    Ok(())
}

fn check(seed: u64) -> bool {
    let mut all = true;
    for c in run_checks(seed) {
        println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        all &= c.passed;
    }
    all
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { generator, n_train, n_test, d, label_sigma, seed } => gen(generator, n_train, n_test, d, label_sigma, seed),
        Command::Run { config, seed } => run(&config, seed),
        Command::Sweep { config, seed } => sweep(&config, seed),
        Command::Check { seed } => {
            return if check(seed) { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
