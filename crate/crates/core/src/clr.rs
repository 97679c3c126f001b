//! Comparison linear regression.
//!
//! A linear target `⟨w*, x⟩` is split into a unit direction and a scale. Comparisons on
//! disjoint sample pairs label the difference vectors `X_a − X_b` with the sign of
//! `⟨w*, X_a − X_b⟩`, which turns direction finding into halfspace learning. A handful of
//! direct labels then fixes the scale by least squares along the learned direction.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{dot, fit_linear_svr, SvrParams};
use crate::data::{sample_labeled_subset, SampleSet};
use crate::error::{Error, Result};
use crate::oracle::{ComparisonOracle, LabelOracle};
use crate::r2::{join, parse_floats, parse_one, strip_key};

/// Difference rows `X_{2k} − X_{2k+1}` with the sample pair each row came from.
#[derive(Debug, Clone)]
pub struct PairwisePool {
    pub diffs: SampleSet,
    pub pairs: Vec<(usize, usize)>,
}

impl PairwisePool {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn build_pairwise_pool(universe: &SampleSet) -> Result<PairwisePool> {
    let n = universe.n();
    if n < 2 {
        return Err(Error::Budget(format!("pairing needs at least two samples, got {n}")));
    }
    let d = universe.d();
    let rows = n / 2;
    let mut feats = Vec::with_capacity(rows * d);
    let mut pairs = Vec::with_capacity(rows);
    for k in 0..rows {
        let (a, b) = (universe.row(2 * k), universe.row(2 * k + 1));
        feats.extend(a.iter().zip(b).map(|(x, y)| x - y));
        pairs.push((2 * k, 2 * k + 1));
    }
    Ok(PairwisePool { diffs: SampleSet::new(feats, d)?, pairs })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierBudgetReport {
    pub comparisons_used: usize,
    /// Band half-width of the last active round; 0 for passive fits.
    pub final_band: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassiveParams {
    pub reg: f64,
    pub iterations: usize,
    pub step0: f64,
}

impl Default for PassiveParams {
    fn default() -> Self {
        Self { reg: 1e-5, iterations: 300, step0: 100.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActiveParams {
    pub rounds: usize,
    /// Share of the budget spent on the uniform warm start.
    pub warm_fraction: f64,
    /// Quantile of `|⟨v₀, u⟩|` over the pool used as the first band half-width.
    pub initial_quantile: f64,
    /// Radius of the first localization ball around the previous direction.
    pub initial_radius: f64,
    pub iterations: usize,
    pub step0: f64,
    /// Settings for the warm-start fit.
    pub warm: PassiveParams,
    /// Fit each round on every judgment bought so far instead of the current band only.
    pub reuse_queries: bool,
}

impl Default for ActiveParams {
    fn default() -> Self {
        Self {
            rounds: 5,
            warm_fraction: 0.1,
            initial_quantile: 0.5,
            initial_radius: 2.0,
            iterations: 400,
            step0: 20.0,
            warm: PassiveParams::default(),
            reuse_queries: true,
        }
    }
}

/// Unit-norm copy of every pool row. Zero rows stay zero.
fn normalized_rows(pool: &PairwisePool) -> Vec<Vec<f64>> {
    pool.diffs
        .rows()
        .map(|r| {
            let norm = dot(r, r).sqrt();
            if norm > 0.0 {
                r.iter().map(|v| v / norm).collect()
            } else {
                r.to_vec()
            }
        })
        .collect()
}

struct HingeProblem<'a> {
    rows: Vec<&'a [f64]>,
    z: Vec<f64>,
    /// Margin scale: loss is `max(0, 1 − z⟨v,u⟩/tau)`.
    tau: f64,
    reg: f64,
}

impl HingeProblem<'_> {
    fn objective(&self, v: &[f64]) -> f64 {
        let loss: f64 = self
            .rows
            .iter()
            .zip(&self.z)
            .map(|(u, z)| (1.0 - z * dot(v, u) / self.tau).max(0.0))
            .sum();
        loss / self.rows.len() as f64 + 0.5 * self.reg * dot(v, v)
    }

    /// Projected subgradient descent from `start`, step `step0/√t`; keeps the best iterate.
    fn minimize(&self, start: Vec<f64>, iterations: usize, step0: f64, ball: Option<(&[f64], f64)>) -> Vec<f64> {
        let d = start.len();
        let inv_n = 1.0 / self.rows.len() as f64;
        let mut v = start;
        let mut best = v.clone();
        let mut best_obj = self.objective(&v);
        let mut grad = vec![0.0; d];
        for t in 1..=iterations {
            for (g, vj) in grad.iter_mut().zip(&v) {
                *g = self.reg * vj;
            }
            for (u, z) in self.rows.iter().zip(&self.z) {
                if z * dot(&v, u) / self.tau < 1.0 {
                    let c = z * inv_n / self.tau;
                    for (g, uj) in grad.iter_mut().zip(u.iter()) {
                        *g -= c * uj;
                    }
                }
            }
            let eta = step0 / (t as f64).sqrt();
            for (vj, g) in v.iter_mut().zip(&grad) {
                *vj -= eta * g;
            }
            if let Some((center, radius)) = ball {
                project_ball(&mut v, center, radius);
            }
            let obj = self.objective(&v);
            if obj < best_obj {
                best_obj = obj;
                best.clone_from(&v);
            }
        }
        best
    }
}

fn project_ball(v: &mut [f64], center: &[f64], radius: f64) {
    let dist = v.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
    if dist > radius {
        let s = radius / dist;
        for (a, c) in v.iter_mut().zip(center) {
            *a = c + (*a - c) * s;
        }
    }
}

fn unit(v: Vec<f64>) -> Result<Vec<f64>> {
    let norm = dot(&v, &v).sqrt();
    if !(norm > 1e-300) || !norm.is_finite() {
        return Err(Error::DegenerateDirection("classifier returned a zero weight vector".into()));
    }
    Ok(v.into_iter().map(|x| x / norm).collect())
}

fn query<O: ComparisonOracle + ?Sized>(oracle: &mut O, pool: &PairwisePool, row: usize) -> Result<f64> {
    let (a, b) = pool.pairs[row];
    Ok(f64::from(oracle.compare(a, b)?))
}

/// Passive halfspace learner: label `budget` uniformly chosen pool rows, minimize the
/// regularized hinge loss by full-batch subgradient descent, return the unit direction.
pub fn fit_passive_direction<O, R>(
    pool: &PairwisePool,
    oracle: &mut O,
    budget: usize,
    params: PassiveParams,
    rng: &mut R,
) -> Result<(Vec<f64>, ClassifierBudgetReport)>
where
    O: ComparisonOracle + ?Sized,
    R: Rng + ?Sized,
{
    if budget == 0 {
        return Err(Error::Budget("comparison budget must be at least 1".into()));
    }
    if budget > pool.len() {
        return Err(Error::Budget(format!("budget {budget} exceeds pool of {} difference rows", pool.len())));
    }
    let normalized = normalized_rows(pool);
    let chosen = sample_labeled_subset(pool.len(), budget, rng)?;
    let mut z = Vec::with_capacity(budget);
    for &r in &chosen {
        z.push(query(oracle, pool, r)?);
    }
    let problem = HingeProblem { rows: chosen.iter().map(|&r| normalized[r].as_slice()).collect(), z, tau: 1.0, reg: params.reg };
    let v = problem.minimize(vec![0.0; pool.diffs.d()], params.iterations, params.step0, None);
    Ok((unit(v)?, ClassifierBudgetReport { comparisons_used: budget, final_band: 0.0 }))
}

/// Margin-based localization.
///
/// A uniform warm start gives `v₀`. Round `r` then samples rows whose normalized margin
/// `|⟨v_{r−1}, u⟩|` is at most `b_r`, minimizes the hinge loss with margin scale `b_r` inside
/// a ball of radius `ρ_r` around `v_{r−1}`, and renormalizes. Both `b_r` and `ρ_r` halve
/// every round; a band holding too few unqueried rows for the round's quota is doubled
/// until it does. With `reuse_queries` the round objective covers every judgment bought so
/// far, warm start included; otherwise only the current band's.
pub fn fit_active_direction<O, R>(
    pool: &PairwisePool,
    oracle: &mut O,
    budget: usize,
    params: ActiveParams,
    rng: &mut R,
) -> Result<(Vec<f64>, ClassifierBudgetReport)>
where
    O: ComparisonOracle + ?Sized,
    R: Rng + ?Sized,
{
    let rounds = params.rounds;
    if rounds == 0 || budget < rounds {
        return Err(Error::Budget(format!("need budget >= rounds >= 1, got budget {budget}, rounds {rounds}")));
    }
    if budget > pool.len() {
        return Err(Error::Budget(format!("budget {budget} exceeds pool of {} difference rows", pool.len())));
    }
    let normalized = normalized_rows(pool);
    let d = pool.diffs.d();
    let warm = ((budget as f64 * params.warm_fraction).round() as usize).clamp(1, budget - rounds + 1);
    let mut used = vec![false; pool.len()];

    let warm_rows = sample_labeled_subset(pool.len(), warm, rng)?;
    let mut warm_z = Vec::with_capacity(warm);
    for &r in &warm_rows {
        used[r] = true;
        warm_z.push(query(oracle, pool, r)?);
    }
    let mut queried = warm_rows.clone();
    let mut queried_z = warm_z.clone();
    let warm_problem = HingeProblem {
        rows: warm_rows.iter().map(|&r| normalized[r].as_slice()).collect(),
        z: warm_z,
        tau: 1.0,
        reg: params.warm.reg,
    };
    let mut v = unit(warm_problem.minimize(vec![0.0; d], params.warm.iterations, params.warm.step0, None))?;
    let mut spent = warm;

    let mut margins: Vec<f64> = normalized.iter().map(|u| dot(&v, u).abs()).collect();
    let mut sorted = margins.clone();
    sorted.sort_by(f64::total_cmp);
    let q = params.initial_quantile.clamp(0.0, 1.0);
    let mut band = sorted[((sorted.len() - 1) as f64 * q).round() as usize].max(f64::MIN_POSITIVE);
    let mut radius = params.initial_radius;
    let per_round = (budget - warm) / rounds;

    for r in 0..rounds {
        let want = if r + 1 == rounds { budget - spent } else { per_round };
        if want == 0 {
            continue;
        }
        let in_band = |band: f64, margins: &[f64], used: &[bool]| -> Vec<usize> {
            (0..margins.len()).filter(|&i| !used[i] && margins[i] <= band).collect()
        };
        let widest = margins.iter().copied().fold(0.0, f64::max);
        let mut candidates = in_band(band, &margins, &used);
        while candidates.len() < want && band < widest {
            band *= 2.0;
            candidates = in_band(band, &margins, &used);
        }
        if candidates.is_empty() {
            return Err(Error::Exhausted(format!("no unqueried pool rows within band {band} in round {}", r + 1)));
        }
        candidates.shuffle(rng);
        candidates.truncate(want);
        let mut z = Vec::with_capacity(candidates.len());
        for &c in &candidates {
            used[c] = true;
            z.push(query(oracle, pool, c)?);
        }
        spent += candidates.len();
        queried.extend_from_slice(&candidates);
        queried_z.extend_from_slice(&z);
        let (rows, z) = if params.reuse_queries { (&queried, queried_z.clone()) } else { (&candidates, z) };
        let problem = HingeProblem { rows: rows.iter().map(|&c| normalized[c].as_slice()).collect(), z, tau: band, reg: 0.0 };
        let center = v.clone();
        v = unit(problem.minimize(center.clone(), params.iterations, params.step0 * band, Some((&center, radius))))?;
        for (m, u) in margins.iter_mut().zip(&normalized) {
            *m = dot(&v, u).abs();
        }
        if r + 1 < rounds {
            band *= 0.5;
            radius *= 0.5;
        }
    }
    Ok((v, ClassifierBudgetReport { comparisons_used: spent, final_band: band }))
}

/// Least-squares scale along a fixed direction: `Σ⟨v,X⟩y / Σ⟨v,X⟩²`.
pub fn estimate_scale(direction: &[f64], labeled: &[(&[f64], f64)]) -> Result<f64> {
    if labeled.is_empty() {
        return Err(Error::Budget("scale estimate needs at least one label".into()));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, y) in labeled {
        if x.len() != direction.len() {
            return Err(Error::Dimension(format!("sample has {} features, direction {}", x.len(), direction.len())));
        }
        let t = dot(direction, x);
        num += t * y;
        den += t * t;
    }
    if den == 0.0 {
        return Err(Error::DegenerateProjection);
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionMode {
    Passive,
    Active,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClrConfig {
    pub comparisons: usize,
    pub labels: usize,
    pub mode: DirectionMode,
    pub augment: bool,
    pub passive: PassiveParams,
    pub active: ActiveParams,
    pub svr: SvrParams,
}

impl ClrConfig {
    pub fn new(comparisons: usize, labels: usize, mode: DirectionMode) -> Self {
        Self {
            comparisons,
            labels,
            mode,
            augment: false,
            passive: PassiveParams::default(),
            active: ActiveParams::default(),
            svr: SvrParams::default(),
        }
    }
}

/// Linear SVR weights over `(x; (⟨v̂,x⟩ − mean)/std)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedWeights {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub projection_mean: f64,
    pub projection_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClrModel {
    pub direction: Vec<f64>,
    pub scale: f64,
    pub augmented: Option<AugmentedWeights>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClrReport {
    pub direction: ClassifierBudgetReport,
    /// The `(index, label)` pairs bought from the label oracle.
    pub labeled: Vec<(usize, f64)>,
}

impl ClrReport {
    pub fn labels_used(&self) -> usize {
        self.labeled.len()
    }
}

/// Pool → direction → scale, plus the optional augmented SVR on top.
pub fn fit_clr<C, L, R>(
    universe: &SampleSet,
    comparisons: &mut C,
    labels: &mut L,
    cfg: &ClrConfig,
    rng: &mut R,
) -> Result<(ClrModel, ClrReport)>
where
    C: ComparisonOracle + ?Sized,
    L: LabelOracle + ?Sized,
    R: Rng + ?Sized,
{
    if cfg.labels == 0 {
        return Err(Error::Budget("label budget must be at least 1".into()));
    }
    if cfg.comparisons == 0 {
        return Err(Error::Budget("comparison budget must be at least 1".into()));
    }
    let pool = build_pairwise_pool(universe)?;
    let (direction, dir_report) = match cfg.mode {
        DirectionMode::Passive => fit_passive_direction(&pool, comparisons, cfg.comparisons, cfg.passive, rng)?,
        DirectionMode::Active => fit_active_direction(&pool, comparisons, cfg.comparisons, cfg.active, rng)?,
    };
    let idx = sample_labeled_subset(universe.n(), cfg.labels, rng)?;
    let mut labeled = Vec::with_capacity(idx.len());
    for &i in &idx {
        labeled.push((i, labels.label(i)?));
    }
    let pairs: Vec<(&[f64], f64)> = labeled.iter().map(|&(i, y)| (universe.row(i), y)).collect();
    let scale = estimate_scale(&direction, &pairs)?;
    let mut model = ClrModel { direction, scale, augmented: None };
    if cfg.augment {
        model = augment_clr(&model, universe, &labeled, cfg.svr, rng)?;
    }
    Ok((model, ClrReport { direction: dir_report, labeled }))
}

/// Fit the linear SVR on `(x; standardized ⟨v̂,x⟩)` over the labeled rows. The projection is
/// standardized with its mean and spread over the whole universe, which costs no labels.
pub fn augment_clr<R: Rng + ?Sized>(
    model: &ClrModel,
    universe: &SampleSet,
    labeled: &[(usize, f64)],
    svr: SvrParams,
    rng: &mut R,
) -> Result<ClrModel> {
    let d = universe.d();
    if model.direction.len() != d {
        return Err(Error::Dimension(format!("model has {} features, universe {d}", model.direction.len())));
    }
    let proj: Vec<f64> = universe.rows().map(|x| dot(&model.direction, x)).collect();
    let mean = proj.iter().sum::<f64>() / proj.len() as f64;
    let var = proj.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / proj.len() as f64;
    let std = if var > 0.0 { var.sqrt() } else { 1.0 };
    let mut feats = Vec::with_capacity(labeled.len() * (d + 1));
    for &(i, _) in labeled {
        feats.extend_from_slice(universe.row(i));
        feats.push((proj[i] - mean) / std);
    }
    let ys: Vec<f64> = labeled.iter().map(|&(_, y)| y).collect();
    let train = SampleSet::new(feats, d + 1)?.with_all_labels(&ys)?;
    let lin = fit_linear_svr(&train, svr, rng)?;
    Ok(ClrModel {
        direction: model.direction.clone(),
        scale: model.scale,
        augmented: Some(AugmentedWeights {
            weights: lin.weights,
            intercept: lin.intercept,
            projection_mean: mean,
            projection_std: std,
        }),
    })
}

impl ClrModel {
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let norm = dot(weights, weights).sqrt();
        let direction = unit(weights.to_vec())?;
        Ok(Self { direction, scale: norm, augmented: None })
    }

    /// `r̂ · v̂`.
    pub fn weights(&self) -> Vec<f64> {
        self.direction.iter().map(|v| v * self.scale).collect()
    }

    pub fn predict(&self, query: &[f64]) -> Result<f64> {
        let d = self.direction.len();
        if query.len() != d {
            return Err(Error::Dimension(format!("query has {} features, model expects {d}", query.len())));
        }
        let proj = dot(&self.direction, query);
        Ok(match &self.augmented {
            None => self.scale * proj,
            Some(a) => {
                dot(&a.weights[..d], query) + a.weights[d] * (proj - a.projection_mean) / a.projection_std + a.intercept
            }
        })
    }

    pub fn to_flat_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CLR_HEADER}");
        let _ = writeln!(out, "d {}", self.direction.len());
        let _ = writeln!(out, "direction {}", join(&self.direction));
        let _ = writeln!(out, "scale {}", self.scale);
        match &self.augmented {
            None => {
                let _ = writeln!(out, "augmented none");
            }
            Some(a) => {
                let _ = writeln!(out, "augmented {}", join(&a.weights));
                let _ = writeln!(out, "intercept {}", a.intercept);
                let _ = writeln!(out, "projection {} {}", a.projection_mean, a.projection_std);
            }
        }
        out
    }

    pub fn from_flat_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut next = |what: &str| lines.next().ok_or_else(|| Error::Parse(format!("missing {what} line")));
        if next("header")?.trim() != CLR_HEADER {
            return Err(Error::Parse("not a CLR model file (bad header)".into()));
        }
        let d: usize = parse_one(strip_key(next("d")?, "d")?)?;
        let direction = parse_floats(strip_key(next("direction")?, "direction")?)?;
        let scale: f64 = parse_one(strip_key(next("scale")?, "scale")?)?;
        if direction.len() != d {
            return Err(Error::Parse(format!("direction has {} entries, expected {d}", direction.len())));
        }
        let aug = strip_key(next("augmented")?, "augmented")?;
        let augmented = if aug == "none" {
            None
        } else {
            let weights = parse_floats(aug)?;
            if weights.len() != d + 1 {
                return Err(Error::Parse(format!("augmented weights need {} entries", d + 1)));
            }
            let intercept: f64 = parse_one(strip_key(next("intercept")?, "intercept")?)?;
            let proj = parse_floats(strip_key(next("projection")?, "projection")?)?;
            if proj.len() != 2 {
                return Err(Error::Parse("projection line needs mean and std".into()));
            }
            Some(AugmentedWeights { weights, intercept, projection_mean: proj[0], projection_std: proj[1] })
        };
        Ok(Self { direction, scale, augmented })
    }
}

const CLR_HEADER: &str = "ordreg-clr-model v1";

/// Angle in radians between two non-zero vectors.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    let c = dot(a, b) / (dot(a, a).sqrt() * dot(b, b).sqrt());
    c.clamp(-1.0, 1.0).acos()
}
