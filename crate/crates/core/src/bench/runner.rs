use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::budget::audit_usage;
use super::config::{Cell, ExperimentConfig, GeneratorConfig};
use super::method::{Method, RankSource};
use crate::aggregate::{Aggregator, RankAggregator, RankSvmParams};
use crate::baselines::{fit_knn, fit_lasso, fit_linear_svr, fit_ols, LinearModel, SvrParams};
use crate::clr::{augment_clr, fit_clr, ClrConfig, ClrModel, DirectionMode};
use crate::data::{mse, ranking_from_values, Comparison, ComparisonSet, Ranking, SampleSet};
use crate::error::{Error, Result};
use crate::oracle::{sample_pairs, ComparisonOracle, ComparisonOracleConfig, Counted, LabelOracle, SimulatedComparisons};
use crate::r2::{cv_select, fit_r2, split_labeled, Candidate, R2Config};
use crate::synthetic::{gen_linear, gen_nonparametric};

/// One fitted method on one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub experiment: String,
    pub generator: String,
    pub method: String,
    pub cell: usize,
    pub trial: usize,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub total: Option<f64>,
    pub universe: usize,
    pub ranking_sigma: f64,
    pub labels_used: usize,
    pub comparisons_used: usize,
    pub test_mse: f64,
    /// Hyperparameter picked on the validation split, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tuned: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Trial seed from the base seed, the grid cell and the trial index. Cells do not share
/// streams, so adding a cell leaves every other cell's randomness untouched.
pub fn derive_seed(base: u64, cell: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ cell as u64) ^ (trial as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Independent stream for a named part of a trial.
fn stream(trial_seed: u64, tag: &str) -> ChaCha8Rng {
    // FNV-1a keeps the tag hash stable across platforms and releases.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(splitmix64(trial_seed ^ h))
}

/// Fixed label table behind a label oracle, so every method in a trial sees the same noisy
/// label for the same sample.
struct TableLabels<'a>(&'a [f64]);

impl LabelOracle for TableLabels<'_> {
    fn label(&mut self, i: usize) -> Result<f64> {
        self.0.get(i).copied().ok_or_else(|| Error::Dimension(format!("label index {i} out of range")))
    }
}

struct TrialData {
    universe: SampleSet,
    truth: Vec<f64>,
    noisy: Vec<f64>,
    test: SampleSet,
    test_truth: Vec<f64>,
    val: SampleSet,
    val_truth: Vec<f64>,
    oracle: ComparisonOracleConfig,
}

pub const LASSO_GRID: [f64; 8] = [1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0];
pub const SVR_C_GRID: [f64; 5] = [0.1, 1.0, 10.0, 100.0, 1000.0];
pub const SVR_ETA0_GRID: [f64; 2] = [0.1, 1.0];
/// SGD epochs for tuned SVR fits.
pub const SVR_EPOCHS: usize = 200;

fn svr_grid(c: Option<f64>) -> Vec<SvrParams> {
    let cs: Vec<f64> = c.map_or(SVR_C_GRID.to_vec(), |c| vec![c]);
    cs.iter()
        .flat_map(|&c| SVR_ETA0_GRID.iter().map(move |&eta0| SvrParams { c, eta0, epochs: SVR_EPOCHS, ..SvrParams::default() }))
        .collect()
}
/// Neighbor count of the k-NN Borda aggregator.
pub const KNN_BORDA_K: usize = 5;
const CV_CANDIDATES: [Candidate; 4] =
    [Candidate::R2 { k: 1 }, Candidate::R2 { k: 5 }, Candidate::Knn { k: 1 }, Candidate::Knn { k: 5 }];

/// Training samples generated per trial.
pub fn universe_size(cfg: &ExperimentConfig, cell: &Cell, methods: &[Method]) -> usize {
    let labels = methods
        .iter()
        .map(|m| if m.label_only() { cell.label_only_m } else { cell.m })
        .max()
        .unwrap_or(cell.m);
    let base = match (cfg.budget.universe, &cfg.generator) {
        (Some(u), _) => u,
        (None, GeneratorConfig::Nonparametric(_)) if cfg.budget.c.is_none() => cell.n,
        (None, GeneratorConfig::Nonparametric(_)) => 1000,
        (None, GeneratorConfig::Linear(_)) => 1000.max(20 * cell.n + 2),
    };
    base.max(labels)
}

fn split_tail(set: &SampleSet, truth: &[f64], at: usize) -> Result<(SampleSet, Vec<f64>, SampleSet, Vec<f64>)> {
    let head: Vec<usize> = (0..at).collect();
    let tail: Vec<usize> = (at..set.n()).collect();
    Ok((set.subset(&head)?, truth[..at].to_vec(), set.subset(&tail)?, truth[at..].to_vec()))
}

fn generate(cfg: &ExperimentConfig, universe: usize, rng: &mut ChaCha8Rng) -> Result<TrialData> {
    let n_val = cfg.validation.max(1);
    let held = cfg.n_test + n_val;
    match &cfg.generator {
        GeneratorConfig::Nonparametric(spec) => {
            let data = gen_nonparametric(spec, universe, held, rng)?;
            let noisy: Vec<f64> = data.train.labels().iter().map(|y| y.expect("generator labels every row")).collect();
            let features = SampleSet::new(data.train.features().to_vec(), data.train.d())?;
            let (test, test_truth, val, val_truth) = split_tail(&data.test, &data.test_truth, cfg.n_test)?;
            Ok(TrialData {
                universe: features,
                truth: data.train_truth,
                noisy,
                test,
                test_truth,
                val,
                val_truth,
                oracle: cfg.oracle.unwrap_or_else(ComparisonOracleConfig::noiseless),
            })
        }
        GeneratorConfig::Linear(spec) => {
            let mut data = gen_linear(spec, universe, held, rng)?;
            let noisy = (0..universe).map(|i| data.labels.label(i)).collect::<Result<Vec<_>>>()?;
            let (test, test_truth, val, val_truth) = split_tail(&data.test, &data.test_truth, cfg.n_test)?;
            Ok(TrialData {
                universe: data.train,
                truth: data.train_truth,
                noisy,
                test,
                test_truth,
                val,
                val_truth,
                oracle: cfg.oracle.unwrap_or(ComparisonOracleConfig::NoisyValue { sigma: spec.comparison_sigma }),
            })
        }
    }
}

fn test_mse<F: Fn(&[f64]) -> Result<f64>>(set: &SampleSet, truth: &[f64], predict: F) -> Result<f64> {
    let preds = set.rows().map(predict).collect::<Result<Vec<_>>>()?;
    mse(&preds, truth)
}

struct Outcome {
    mse: f64,
    labels_used: usize,
    comparisons_used: usize,
    tuned: Option<String>,
}

fn labeled_train(data: &TrialData, labeled: &[(usize, f64)]) -> Result<SampleSet> {
    let idx: Vec<usize> = labeled.iter().map(|&(i, _)| i).collect();
    let ys: Vec<f64> = labeled.iter().map(|&(_, y)| y).collect();
    data.universe.subset(&idx)?.with_all_labels(&ys)
}

fn pick_best<P, T, F>(grid: &[P], data: &TrialData, mut fit: F) -> Result<(T, P)>
where
    P: Copy,
    F: FnMut(P) -> Result<T>,
    T: Predictor,
{
    let mut best: Option<(T, P, f64)> = None;
    for &g in grid {
        let model = fit(g)?;
        let score = test_mse(&data.val, &data.val_truth, |x| model.predict(x))?;
        if best.as_ref().is_none_or(|b| score < b.2) {
            best = Some((model, g, score));
        }
    }
    let (model, g, _) = best.expect("non-empty grid");
    Ok((model, g))
}

trait Predictor {
    fn predict(&self, x: &[f64]) -> Result<f64>;
}

impl Predictor for LinearModel {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        LinearModel::predict(self, x)
    }
}

impl Predictor for ClrModel {
    fn predict(&self, x: &[f64]) -> Result<f64> {
        ClrModel::predict(self, x)
    }
}

fn run_method(method: &Method, cell: &Cell, data: &TrialData, perm: &[usize], ranking: &Ranking, trial_seed: u64) -> Result<Outcome> {
    let name = method.to_string();
    let mut rng = stream(trial_seed, &name);
    let label_cap = if method.label_only() { cell.label_only_m } else { cell.m };
    let comparison_cap = if method.uses_comparisons() { cell.n } else { 0 };
    let table: &[f64] = match method {
        Method::Knn { truth: true, .. } => &data.truth,
        _ => &data.noisy,
    };
    let mut labels = Counted::new(TableLabels(table));
    let mut comparisons =
        Counted::new(SimulatedComparisons::new(data.truth.clone(), data.oracle, stream(trial_seed, &format!("{name}/oracle")))?);
    if label_cap > perm.len() {
        return Err(Error::Budget(format!("{name} needs {label_cap} labels but the universe has {}", perm.len())));
    }
    let buy = |labels: &mut Counted<TableLabels>, count: usize| -> Result<Vec<(usize, f64)>> {
        let mut idx = perm[..count].to_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| Ok((i, labels.label(i)?))).collect()
    };

    let mut tuned = None;
    let mse = match *method {
        Method::Knn { k, .. } => {
            let train = labeled_train(data, &buy(&mut labels, label_cap)?)?;
            let model = fit_knn(&train, k.min(label_cap))?;
            test_mse(&data.test, &data.test_truth, |x| model.predict(x))?
        }
        Method::R2 { k, source } => {
            let labeled = buy(&mut labels, cell.m)?;
            let ranking = match source {
                RankSource::Values => ranking.clone(),
                _ => {
                    let pairs = sample_pairs(data.universe.n(), cell.n, &mut rng)?;
                    let mut items = Vec::with_capacity(pairs.len());
                    for (i, j) in pairs {
                        items.push(Comparison { i, j, z: comparisons.compare(i, j)? });
                    }
                    let set = ComparisonSet::new(items, data.universe.n())?;
                    let agg = match source {
                        RankSource::Borda => Aggregator::Borda,
                        RankSource::KnnBorda => Aggregator::KnnBorda { k: KNN_BORDA_K },
                        _ => Aggregator::RankSvm(RankSvmParams::default()),
                    };
                    agg.aggregate(&data.universe, &set, &mut rng)?
                }
            };
            let model = fit_r2(&data.universe, &labeled, &ranking, &R2Config::with_k(k))?;
            test_mse(&data.test, &data.test_truth, |x| model.predict(x))?
        }
        Method::R2Cv => {
            let labeled = buy(&mut labels, cell.m)?;
            let (train, held) = split_labeled(&labeled, 0.5, &mut rng)?;
            let mut mask = vec![None; data.universe.n()];
            for &(i, y) in &train {
                mask[i] = Some(y);
            }
            let universe = data.universe.clone().with_labels(mask)?;
            let held_idx: Vec<usize> = held.iter().map(|&(i, _)| i).collect();
            let held_y: Vec<f64> = held.iter().map(|&(_, y)| y).collect();
            let validation = data.universe.subset(&held_idx)?.with_all_labels(&held_y)?;
            let candidates: Vec<Candidate> = CV_CANDIDATES
                .iter()
                .copied()
                .filter(|c| match *c {
                    Candidate::Knn { k } => k <= train.len(),
                    Candidate::R2 { .. } => true,
                })
                .collect();
            let sel = cv_select(&universe, ranking, &validation, &candidates, &R2Config::default())?;
            tuned = Some(format!("{:?}", sel.candidate));
            test_mse(&data.test, &data.test_truth, |x| sel.predict(x))?
        }
        Method::Clr { active, augment } => {
            let mode = if active { DirectionMode::Active } else { DirectionMode::Passive };
            let clr_cfg = ClrConfig::new(cell.n, cell.m, mode);
            let (base, report) = fit_clr(&data.universe, &mut comparisons, &mut labels, &clr_cfg, &mut rng)?;
            let model = if augment {
                let (model, p) =
                    pick_best(&svr_grid(None), data, |p| augment_clr(&base, &data.universe, &report.labeled, p, &mut rng))?;
                tuned = Some(format!("C={} eta0={}", p.c, p.eta0));
                model
            } else {
                base
            };
            test_mse(&data.test, &data.test_truth, |x| model.predict(x))?
        }
        Method::Ols => {
            let train = labeled_train(data, &buy(&mut labels, label_cap)?)?;
            let fit = fit_ols(&train)?;
            test_mse(&data.test, &data.test_truth, |x| fit.model.predict(x))?
        }
        Method::Lasso { lambda } => {
            let train = labeled_train(data, &buy(&mut labels, label_cap)?)?;
            let grid: Vec<f64> = lambda.map_or(LASSO_GRID.to_vec(), |l| vec![l]);
            let (model, l) = pick_best(&grid, data, |l| Ok(fit_lasso(&train, l)?.model))?;
            if lambda.is_none() {
                tuned = Some(format!("lambda={l}"));
            }
            test_mse(&data.test, &data.test_truth, |x| model.predict(x))?
        }
        Method::Svr { c } => {
            let train = labeled_train(data, &buy(&mut labels, label_cap)?)?;
            let (model, p) = pick_best(&svr_grid(c), data, |p| fit_linear_svr(&train, p, &mut rng))?;
            tuned = Some(format!("C={} eta0={}", p.c, p.eta0));
            test_mse(&data.test, &data.test_truth, |x| model.predict(x))?
        }
    };
    audit_usage(&name, labels.used(), label_cap, comparisons.used(), comparison_cap)?;
    Ok(Outcome { mse, labels_used: labels.used(), comparisons_used: comparisons.used(), tuned })
}

fn run_trial(cfg: &ExperimentConfig, methods: &[Method], cell_index: usize, cell: &Cell, trial: usize) -> Result<Vec<ResultRecord>> {
    let seed = derive_seed(cfg.seed, cell_index, trial);
    let universe = universe_size(cfg, cell, methods);
    let data = generate(cfg, universe, &mut stream(seed, "data"))?;

    let mut perm: Vec<usize> = (0..universe).collect();
    perm.shuffle(&mut stream(seed, "labels"));
    let ranking = if cfg.ranking.sigma > 0.0 {
        let noise = Normal::new(0.0, cfg.ranking.sigma).map_err(|e| Error::Config(e.to_string()))?;
        let mut rng = stream(seed, "ranking");
        let noisy: Vec<f64> = data.truth.iter().map(|f| f + noise.sample(&mut rng)).collect();
        ranking_from_values(&noisy)?
    } else {
        ranking_from_values(&data.truth)?
    };

    let mut out = Vec::with_capacity(methods.len());
    for method in methods {
        let start = Instant::now();
        let o = run_method(method, cell, &data, &perm, &ranking, seed)
            .map_err(|e| annotate(e, &format!("{} (cell {cell_index}, trial {trial})", method)))?;
        out.push(ResultRecord {
            experiment: cfg.name.clone(),
            generator: cfg.generator.name().into(),
            method: method.to_string(),
            cell: cell_index,
            trial,
            seed,
            m: cell.m,
            n: cell.n,
            c: cell.c,
            total: cell.total,
            universe,
            ranking_sigma: cfg.ranking.sigma,
            labels_used: o.labels_used,
            comparisons_used: o.comparisons_used,
            test_mse: o.mse,
            tuned: o.tuned,
            wall_time_ms: cfg.record_timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        });
    }
    Ok(out)
}

fn annotate(e: Error, context: &str) -> Error {
    match e {
        Error::Budget(msg) => Error::Budget(format!("{context}: {msg}")),
        Error::Config(msg) => Error::Config(format!("{context}: {msg}")),
        other => other,
    }
}

/// Every method on every grid cell and trial. Trials run in parallel; records come back in
/// (cell, trial, method) order regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    let methods = cfg.parsed_methods()?;
    let cells = cfg.cells()?;
    let tasks: Vec<(usize, usize)> =
        (0..cells.len()).flat_map(|c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let batches = tasks
        .par_iter()
        .map(|&(c, t)| run_trial(cfg, &methods, c, &cells[c], t))
        .collect::<Result<Vec<_>>>()?;
    Ok(batches.into_iter().flatten().collect())
}

/// Records as JSON lines.
pub fn write_records<W: std::io::Write>(mut out: W, records: &[ResultRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_records<R: std::io::BufRead>(input: R) -> Result<Vec<ResultRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Draw `count` trial seeds the same way [`run_experiment`] does, for callers that drive
/// trials themselves.
pub fn trial_seeds(base: u64, cell: usize, count: usize) -> Vec<u64> {
    (0..count).map(|t| derive_seed(base, cell, t)).collect()
}
