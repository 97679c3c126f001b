//! Turning pairwise judgments into per-sample scores and then a ranking.
//!
//! Three scorers are provided: raw Borda counts, Borda counts averaged over feature-space
//! neighbors, and a kernel rankSVM trained by stochastic subgradient descent. Any of them
//! plugs into [`RankAggregator`].

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{ranking_from_values, Comparison, ComparisonSet, Ranking, SampleSet};
use crate::error::{Error, Result};
use crate::neighbors::{k_nearest, squared_distance};
use crate::r2::{join, parse_floats, strip_key};

pub use crate::oracle::{sample_pairs, simulate_comparisons, ComparisonOracleConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    Borda,
    KnnBorda,
    RankSvm,
}

impl ScorerKind {
    fn name(self) -> &'static str {
        match self {
            ScorerKind::Borda => "borda",
            ScorerKind::KnnBorda => "knn-borda",
            ScorerKind::RankSvm => "ranksvm",
        }
    }
}

/// RBF kernel expansion `g(x) = Σ_l α_l exp(−‖x_l − x‖² / bandwidth)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelExpansion {
    pub support: SampleSet,
    pub coefficients: Vec<f64>,
    pub bandwidth: f64,
}

impl KernelExpansion {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.support
            .rows()
            .zip(&self.coefficients)
            .filter(|(_, &a)| a != 0.0)
            .map(|(s, a)| a * (-squared_distance(s, x) / self.bandwidth).exp())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scorer {
    pub kind: ScorerKind,
    pub scores: Vec<f64>,
    pub kernel: Option<KernelExpansion>,
}

impl Scorer {
    /// Score for an unseen point; only rankSVM scorers extend beyond the training set.
    pub fn score_point(&self, x: &[f64]) -> Result<f64> {
        match &self.kernel {
            Some(k) if x.len() == k.support.d() => Ok(k.eval(x)),
            Some(k) => Err(Error::Dimension(format!("point has {} features, expected {}", x.len(), k.support.d()))),
            None => Err(Error::Parameter(format!("{} scorer has no out-of-sample extension", self.kind.name()))),
        }
    }

    pub fn to_flat_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{SCORER_HEADER}");
        let _ = writeln!(out, "kind {}", self.kind.name());
        let _ = writeln!(out, "scores {}", join(&self.scores));
        if let Some(k) = &self.kernel {
            let _ = writeln!(out, "bandwidth {}", k.bandwidth);
            let _ = writeln!(out, "coefficients {}", join(&k.coefficients));
            let _ = writeln!(out, "support {} {}", k.support.n(), k.support.d());
            for row in k.support.rows() {
                let _ = writeln!(out, "{}", join(row));
            }
        }
        out
    }

    pub fn from_flat_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut next = |what: &str| lines.next().ok_or_else(|| Error::Parse(format!("missing {what} line")));
        if next("header")?.trim() != SCORER_HEADER {
            return Err(Error::Parse("not a scorer file (bad header)".into()));
        }
        let kind = match strip_key(next("kind")?, "kind")? {
            "borda" => ScorerKind::Borda,
            "knn-borda" => ScorerKind::KnnBorda,
            "ranksvm" => ScorerKind::RankSvm,
            other => return Err(Error::Parse(format!("unknown scorer kind `{other}`"))),
        };
        let scores = parse_floats(strip_key(next("scores")?, "scores")?)?;
        let kernel = if kind == ScorerKind::RankSvm {
            let bandwidth = parse_floats(strip_key(next("bandwidth")?, "bandwidth")?)?
                .first()
                .copied()
                .ok_or_else(|| Error::Parse("empty bandwidth".into()))?;
            let coefficients = parse_floats(strip_key(next("coefficients")?, "coefficients")?)?;
            let dims: Vec<usize> = strip_key(next("support")?, "support")?
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad support size `{t}`"))))
                .collect::<Result<_>>()?;
            let [n, d] = dims[..] else {
                return Err(Error::Parse("support line needs `n d`".into()));
            };
            let mut feats = Vec::with_capacity(n * d);
            for _ in 0..n {
                feats.extend(parse_floats(next("support row")?)?);
            }
            Some(KernelExpansion { support: SampleSet::new(feats, d)?, coefficients, bandwidth })
        } else {
            None
        };
        Ok(Self { kind, scores, kernel })
    }
}

const SCORER_HEADER: &str = "ordreg-scorer v1";

/// Wins minus losses per item.
pub fn borda_scores(comparisons: &ComparisonSet, n: usize) -> Result<Scorer> {
    if comparisons.min_universe() > n {
        return Err(Error::Dimension(format!(
            "comparison index {} out of range for n = {n}",
            comparisons.min_universe() - 1
        )));
    }
    let mut scores = vec![0.0; n];
    for c in comparisons.iter() {
        let z = f64::from(c.z);
        scores[c.i] += z;
        scores[c.j] -= z;
    }
    Ok(Scorer { kind: ScorerKind::Borda, scores, kernel: None })
}

/// Average Borda count over each row's `k` nearest rows (the row itself included).
pub fn knn_borda_scores(base: &Scorer, features: &SampleSet, k: usize) -> Result<Scorer> {
    if base.kind != ScorerKind::Borda {
        return Err(Error::Parameter("k-NN smoothing expects raw Borda scores".into()));
    }
    let n = features.n();
    if base.scores.len() != n {
        return Err(Error::Dimension(format!("{} scores for {n} feature rows", base.scores.len())));
    }
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("k = {k} must lie in 1..={n}")));
    }
    let scores = features
        .rows()
        .map(|row| {
            let idx = k_nearest(features, row, k);
            idx.iter().map(|&i| base.scores[i]).sum::<f64>() / k as f64
        })
        .collect();
    Ok(Scorer { kind: ScorerKind::KnnBorda, scores, kernel: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSvmParams {
    pub bandwidth: f64,
    pub reg: f64,
    pub epochs: usize,
    /// Step size numerator; step `t` uses `step0 / √t`.
    pub step0: f64,
}

impl Default for RankSvmParams {
    fn default() -> Self {
        Self { bandwidth: 1.0, reg: 1e-3, epochs: 50, step0: 1.0 }
    }
}

const DENSE_KERNEL_LIMIT: usize = 6000;

/// Kernel rankSVM: minimizes `(reg/2)‖g‖² + mean hinge(1 − z (g(x_i) − g(x_j)))` over the
/// RBF span of the training rows by stochastic subgradient descent with step `step0/√t`,
/// judgments reshuffled every epoch.
pub fn fit_ranksvm_scorer<R: Rng + ?Sized>(
    features: &SampleSet,
    comparisons: &ComparisonSet,
    params: RankSvmParams,
    rng: &mut R,
) -> Result<Scorer> {
    if comparisons.is_empty() {
        return Err(Error::Budget("rankSVM needs at least one comparison".into()));
    }
    if !(params.bandwidth > 0.0) || !(params.reg > 0.0) || !(params.step0 > 0.0) {
        return Err(Error::Parameter("bandwidth, reg and step0 must be positive".into()));
    }
    let n = features.n();
    if comparisons.min_universe() > n {
        return Err(Error::Dimension("comparison index exceeds the feature rows".into()));
    }
    let kernel_row = |i: usize, out: &mut Vec<f64>| {
        out.clear();
        let xi = features.row(i);
        out.extend(features.rows().map(|x| (-squared_distance(xi, x) / params.bandwidth).exp()));
    };
    let dense: Option<Vec<f64>> = (n <= DENSE_KERNEL_LIMIT).then(|| {
        let mut k = vec![0.0; n * n];
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            kernel_row(i, &mut row);
            k[i * n..(i + 1) * n].copy_from_slice(&row);
        }
        k
    });

    // g = scale · Σ β_l k(x_l, ·); cache u_l = Σ β_m K(m, l) so g(x_l) = scale · u_l.
    let mut beta = vec![0.0; n];
    let mut cache = vec![0.0; n];
    let mut scale = 1.0f64;
    let mut order: Vec<usize> = (0..comparisons.len()).collect();
    let items = comparisons.as_slice();
    let (mut row_i, mut row_j) = (Vec::new(), Vec::new());
    let mut t = 0usize;
    for _ in 0..params.epochs.max(1) {
        order.shuffle(rng);
        for &c in &order {
            t += 1;
            let eta = params.step0 / (t as f64).sqrt();
            let Comparison { i, j, z } = items[c];
            let margin = f64::from(z) * scale * (cache[i] - cache[j]);
            scale *= 1.0 - (eta * params.reg).min(0.5);
            if margin < 1.0 {
                let step = eta * f64::from(z) / scale;
                beta[i] += step;
                beta[j] -= step;
                let (ki, kj): (&[f64], &[f64]) = match &dense {
                    Some(k) => (&k[i * n..(i + 1) * n], &k[j * n..(j + 1) * n]),
                    None => {
                        kernel_row(i, &mut row_i);
                        kernel_row(j, &mut row_j);
                        (&row_i, &row_j)
                    }
                };
                for ((u, a), b) in cache.iter_mut().zip(ki).zip(kj) {
                    *u += step * (a - b);
                }
            }
            if scale < 1e-150 {
                beta.iter_mut().for_each(|b| *b *= scale);
                cache.iter_mut().for_each(|u| *u *= scale);
                scale = 1.0;
            }
        }
    }
    let scores = cache.iter().map(|u| u * scale).collect();
    let coefficients = beta.iter().map(|b| b * scale).collect();
    Ok(Scorer {
        kind: ScorerKind::RankSvm,
        scores,
        kernel: Some(KernelExpansion { support: features.clone(), coefficients, bandwidth: params.bandwidth }),
    })
}

/// Ascending order of scores, lowest score at position 0, ties by index.
pub fn scores_to_ranking(scorer: &Scorer) -> Result<Ranking> {
    if scorer.scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidValue("non-finite score".into()));
    }
    ranking_from_values(&scorer.scores)
}

/// Anything that turns comparisons over a feature set into a ranking.
pub trait RankAggregator {
    fn aggregate(&self, features: &SampleSet, comparisons: &ComparisonSet, rng: &mut dyn rand::RngCore)
        -> Result<Ranking>;
}

/// The built-in aggregators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Aggregator {
    Borda,
    KnnBorda { k: usize },
    RankSvm(RankSvmParams),
}

impl RankAggregator for Aggregator {
    fn aggregate(
        &self,
        features: &SampleSet,
        comparisons: &ComparisonSet,
        rng: &mut dyn rand::RngCore,
    ) -> Result<Ranking> {
        let n = features.n();
        let scorer = match *self {
            Aggregator::Borda => borda_scores(comparisons, n)?,
            Aggregator::KnnBorda { k } => knn_borda_scores(&borda_scores(comparisons, n)?, features, k)?,
            Aggregator::RankSvm(p) => fit_ranksvm_scorer(features, comparisons, p, rng)?,
        };
        scores_to_ranking(&scorer)
    }
}
