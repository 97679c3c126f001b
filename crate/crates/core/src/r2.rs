//! Ranking-regression: order the universe, de-noise the labels along the order with
//! bounded isotonic regression, impute every sample from its closest labeled predecessor,
//! then predict with k nearest neighbors over the imputed universe.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{fit_knn, KnnRegressor};
use crate::data::{ModelBounds, Ranking, SampleSet};
use crate::error::{Error, Result};
use crate::isotonic::fit_bounded_isotonic;
use crate::neighbors::knn_mean;

/// Value given to samples ranked below every labeled sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StarImputation {
    /// Zero.
    #[default]
    Zero,
    /// The lowest de-noised anchor value.
    LowestAnchor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R2Config {
    pub k: usize,
    pub bounds: ModelBounds,
    pub star: StarImputation,
    /// Drop star-imputed rows from the prediction neighbor set.
    pub exclude_star_neighbors: bool,
}

impl Default for R2Config {
    fn default() -> Self {
        Self { k: 5, bounds: ModelBounds::loose(), star: StarImputation::Zero, exclude_star_neighbors: false }
    }
}

impl R2Config {
    pub fn with_k(k: usize) -> Self {
        Self { k, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct R2Model {
    train: SampleSet,
    imputed: Vec<f64>,
    star: Vec<bool>,
    neighbors: SampleSet,
    neighbor_values: Vec<f64>,
    k: usize,
    bounds: ModelBounds,
    exclude_star_neighbors: bool,
}

/// Fit on `universe` (features only are used), `labeled` = `(index, noisy label)` pairs and
/// a ranking of the whole universe.
pub fn fit_r2(universe: &SampleSet, labeled: &[(usize, f64)], ranking: &Ranking, cfg: &R2Config) -> Result<R2Model> {
    let n = universe.n();
    if labeled.is_empty() {
        return Err(Error::Budget("R2 needs at least one labeled sample".into()));
    }
    if ranking.n() != n {
        return Err(Error::Dimension(format!("ranking of {} samples for a universe of {n}", ranking.n())));
    }
    if cfg.k == 0 || cfg.k > n {
        return Err(Error::Parameter(format!("k = {} must lie in 1..={n}", cfg.k)));
    }
    let pos = ranking.positions();
    let mut seen = vec![false; n];
    let mut by_position: Vec<(usize, f64)> = Vec::with_capacity(labeled.len());
    for &(i, y) in labeled {
        if i >= n {
            return Err(Error::Dimension(format!("labeled index {i} out of range for n = {n}")));
        }
        if seen[i] {
            return Err(Error::InvalidValue(format!("sample {i} labeled twice")));
        }
        seen[i] = true;
        by_position.push((pos[i], y));
    }
    by_position.sort_by_key(|&(p, _)| p);
    let values: Vec<f64> = by_position.iter().map(|&(_, y)| y).collect();
    let denoised = fit_bounded_isotonic(&values, cfg.bounds.m_bound)?.fitted;

    let star_value = match cfg.star {
        StarImputation::Zero => 0.0,
        StarImputation::LowestAnchor => denoised[0],
    };
    let mut imputed = vec![0.0; n];
    let mut star = vec![false; n];
    let mut next_anchor = 0;
    let mut current: Option<f64> = None;
    for (p, &i) in ranking.order().iter().enumerate() {
        while next_anchor < by_position.len() && by_position[next_anchor].0 <= p {
            current = Some(denoised[next_anchor]);
            next_anchor += 1;
        }
        match current {
            Some(v) => imputed[i] = v,
            None => {
                imputed[i] = star_value;
                star[i] = true;
            }
        }
    }

    let (neighbors, neighbor_values) = if cfg.exclude_star_neighbors {
        let keep: Vec<usize> = (0..n).filter(|&i| !star[i]).collect();
        (universe.subset(&keep)?, keep.iter().map(|&i| imputed[i]).collect())
    } else {
        (universe.clone(), imputed.clone())
    };
    if cfg.k > neighbors.n() {
        return Err(Error::Parameter(format!(
            "k = {} exceeds the {} non-star neighbors",
            cfg.k,
            neighbors.n()
        )));
    }
    Ok(R2Model {
        train: universe.clone(),
        imputed,
        star,
        neighbors,
        neighbor_values,
        k: cfg.k,
        bounds: cfg.bounds,
        exclude_star_neighbors: cfg.exclude_star_neighbors,
    })
}

impl R2Model {
    /// Mean imputed value over the `k` nearest universe rows.
    pub fn predict(&self, query: &[f64]) -> Result<f64> {
        if query.len() != self.train.d() {
            return Err(Error::Dimension(format!(
                "query has {} features, model expects {}",
                query.len(),
                self.train.d()
            )));
        }
        if query.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidValue("non-finite query".into()));
        }
        Ok(knn_mean(&self.neighbors, &self.neighbor_values, query, self.k))
    }

    pub fn imputed(&self) -> &[f64] {
        &self.imputed
    }

    /// Rows that had no labeled predecessor in the ranking.
    pub fn star_mask(&self) -> &[bool] {
        &self.star
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bounds(&self) -> ModelBounds {
        self.bounds
    }

    pub fn train_features(&self) -> &SampleSet {
        &self.train
    }

    /// Versioned plain-text dump; floats use shortest round-trip formatting.
    pub fn to_flat_string(&self) -> String {
        let mut out = String::new();
        let (n, d) = (self.train.n(), self.train.d());
        let b = self.bounds;
        let _ = writeln!(out, "{R2_HEADER}");
        let _ = writeln!(out, "bounds {} {} {}", b.m_bound, b.smoothness, b.lipschitz);
        let _ = writeln!(out, "k {}", self.k);
        let _ = writeln!(out, "exclude_star {}", u8::from(self.exclude_star_neighbors));
        let _ = writeln!(out, "n {n} d {d}");
        for row in self.train.rows() {
            let _ = writeln!(out, "{}", join(row));
        }
        let _ = writeln!(out, "imputed {}", join(&self.imputed));
        let star: Vec<&str> = self.star.iter().map(|&s| if s { "1" } else { "0" }).collect();
        let _ = writeln!(out, "star {}", star.join(" "));
        out
    }

    pub fn from_flat_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut next = |what: &str| lines.next().ok_or_else(|| Error::Parse(format!("missing {what} line")));
        if next("header")?.trim() != R2_HEADER {
            return Err(Error::Parse("not an R2 model file (bad header)".into()));
        }
        let bounds = parse_floats(strip_key(next("bounds")?, "bounds")?)?;
        if bounds.len() != 3 {
            return Err(Error::Parse("bounds line needs 3 values".into()));
        }
        let bounds = ModelBounds::new(bounds[0], bounds[1], bounds[2])?;
        let k: usize = parse_one(strip_key(next("k")?, "k")?)?;
        let exclude: u8 = parse_one(strip_key(next("exclude_star")?, "exclude_star")?)?;
        let dims: Vec<&str> = next("size")?.split_whitespace().collect();
        if dims.len() != 4 || dims[0] != "n" || dims[2] != "d" {
            return Err(Error::Parse("size line must read `n <n> d <d>`".into()));
        }
        let n: usize = parse_one(dims[1])?;
        let d: usize = parse_one(dims[3])?;
        let mut features = Vec::with_capacity(n * d);
        for r in 0..n {
            let row = parse_floats(next("feature row")?)?;
            if row.len() != d {
                return Err(Error::Parse(format!("feature row {r} has {} values, expected {d}", row.len())));
            }
            features.extend(row);
        }
        let imputed = parse_floats(strip_key(next("imputed")?, "imputed")?)?;
        let star: Vec<bool> = strip_key(next("star")?, "star")?
            .split_whitespace()
            .map(|t| t == "1")
            .collect();
        if imputed.len() != n || star.len() != n {
            return Err(Error::Parse("imputed/star vectors do not match n".into()));
        }
        let train = SampleSet::new(features, d)?;
        let exclude_star_neighbors = exclude == 1;
        let (neighbors, neighbor_values) = if exclude_star_neighbors {
            let keep: Vec<usize> = (0..n).filter(|&i| !star[i]).collect();
            (train.subset(&keep)?, keep.iter().map(|&i| imputed[i]).collect())
        } else {
            (train.clone(), imputed.clone())
        };
        Ok(Self { train, imputed, star, neighbors, neighbor_values, k, bounds, exclude_star_neighbors })
    }
}

const R2_HEADER: &str = "ordreg-r2-model v1";

pub(crate) fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub(crate) fn strip_key<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .map(str::trim)
        .ok_or_else(|| Error::Parse(format!("expected `{key}` line, got `{line}`")))
}

pub(crate) fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| Error::Parse(format!("bad number `{t}`: {e}"))))
        .collect()
}

pub(crate) fn parse_one<T: std::str::FromStr>(s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse::<T>().map_err(|e| Error::Parse(format!("bad value `{s}`: {e}")))
}

/// Estimators considered by [`cv_select`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Candidate {
    R2 { k: usize },
    Knn { k: usize },
}

#[derive(Debug, Clone)]
pub enum FittedModel {
    R2(R2Model),
    Knn(KnnRegressor),
}

impl FittedModel {
    pub fn predict_raw(&self, query: &[f64]) -> Result<f64> {
        match self {
            FittedModel::R2(m) => m.predict(query),
            FittedModel::Knn(m) => m.predict(query),
        }
    }
}

/// The winning candidate; its predictions are clipped to `[-M, M]`.
#[derive(Debug, Clone)]
pub struct Selection {
    pub index: usize,
    pub candidate: Candidate,
    pub model: FittedModel,
    pub bounds: ModelBounds,
    /// Validation MSE of every candidate, in input order.
    pub validation_mse: Vec<f64>,
}

impl Selection {
    pub fn predict(&self, query: &[f64]) -> Result<f64> {
        Ok(self.bounds.clip(self.model.predict_raw(query)?))
    }
}

/// Fit every candidate on the training universe and keep the one with the lowest
/// validation error. Predictions are clipped before scoring; ties go to the earlier candidate.
///
/// `universe` must carry the training labels in its label mask; `validation` must be labeled.
pub fn cv_select(
    universe: &SampleSet,
    ranking: &Ranking,
    validation: &SampleSet,
    candidates: &[Candidate],
    base: &R2Config,
) -> Result<Selection> {
    let val = validation.labeled();
    if val.is_empty() {
        return Err(Error::Budget("validation set has no labeled samples".into()));
    }
    if candidates.is_empty() {
        return Err(Error::Parameter("no candidates to select from".into()));
    }
    let labeled = universe.labeled();
    let mut best: Option<(usize, FittedModel, f64)> = None;
    let mut scores = Vec::with_capacity(candidates.len());
    for (ci, cand) in candidates.iter().enumerate() {
        let model = match *cand {
            Candidate::R2 { k } => FittedModel::R2(fit_r2(universe, &labeled, ranking, &R2Config { k, ..*base })?),
            Candidate::Knn { k } => FittedModel::Knn(fit_knn(universe, k)?),
        };
        let mut sse = 0.0;
        for &(i, y) in &val {
            let p = base.bounds.clip(model.predict_raw(validation.row(i))?);
            sse += (p - y) * (p - y);
        }
        let score = sse / val.len() as f64;
        scores.push(score);
        if best.as_ref().is_none_or(|b| score < b.2) {
            best = Some((ci, model, score));
        }
    }
    let (index, model, _) = best.expect("at least one candidate");
    Ok(Selection { index, candidate: candidates[index], model, bounds: base.bounds, validation_mse: scores })
}

/// Split labeled pairs into a training part and a held-out part of `⌊fraction·m⌋` points
/// (at least one of each when `m ≥ 2`).
pub fn split_labeled<R: Rng + ?Sized>(
    labeled: &[(usize, f64)],
    holdout_fraction: f64,
    rng: &mut R,
) -> Result<(Vec<(usize, f64)>, Vec<(usize, f64)>)> {
    if labeled.len() < 2 {
        return Err(Error::Budget("need at least two labeled samples to hold some out".into()));
    }
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(Error::Parameter(format!("holdout fraction {holdout_fraction} not in (0, 1)")));
    }
    let mut shuffled = labeled.to_vec();
    shuffled.shuffle(rng);
    let hold = ((labeled.len() as f64 * holdout_fraction).floor() as usize).clamp(1, labeled.len() - 1);
    let held = shuffled.split_off(labeled.len() - hold);
    shuffled.sort_by_key(|p| p.0);
    let mut held = held;
    held.sort_by_key(|p| p.0);
    Ok((shuffled, held))
}
