//! Samples, rankings, comparisons and the small metrics shared by every estimator.
//!
//! Indices are 0-based everywhere. A [`Ranking`] stores `order[position] = sample index`,
//! with position 0 holding the sample believed to have the smallest target value.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature matrix (row-major, `n × d`) with optional per-row labels.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    features: Vec<f64>,
    labels: Vec<Option<f64>>,
    n: usize,
    d: usize,
}

impl SampleSet {
    /// Unlabeled sample set from a flat row-major buffer.
    pub fn new(features: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("feature dimension must be at least 1".into()));
        }
        if features.is_empty() || !features.len().is_multiple_of(d) {
            return Err(Error::Dimension(format!(
                "buffer of length {} is not a non-empty multiple of d = {d}",
                features.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "non-finite feature at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        let n = features.len() / d;
        Ok(Self { features, labels: vec![None; n], n, d })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("ragged feature rows".into()));
        }
        Self::new(rows.iter().flatten().copied().collect(), d)
    }

    /// Attach a label mask. `labels.len()` must equal `n`.
    pub fn with_labels(mut self, labels: Vec<Option<f64>>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Dimension(format!(
                "{} labels for {} samples",
                labels.len(),
                self.n
            )));
        }
        if labels.iter().flatten().any(|y| !y.is_finite()) {
            return Err(Error::InvalidValue("non-finite label".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Convenience: every row labeled.
    pub fn with_all_labels(self, labels: &[f64]) -> Result<Self> {
        self.with_labels(labels.iter().copied().map(Some).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.features.chunks_exact(self.d)
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn label(&self, i: usize) -> Option<f64> {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Option<f64>] {
        &self.labels
    }

    pub fn labeled_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.labels[i].is_some()).collect()
    }

    /// New sample set made of the given rows (labels carried along).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.d);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n {
                return Err(Error::Dimension(format!("index {i} out of range for n = {}", self.n)));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::new(features, self.d)?.with_labels(labels)
    }

    /// Labeled rows only, as `(row index, label)` pairs.
    pub fn labeled(&self) -> Vec<(usize, f64)> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, y)| y.map(|y| (i, y)))
            .collect()
    }
}

/// Permutation of sample indices, position → index, ascending in target value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    order: Vec<usize>,
}

impl Ranking {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || seen[i] {
                return Err(Error::InvalidValue(format!(
                    "ranking is not a permutation of 0..{n} (offending index {i})"
                )));
            }
            seen[i] = true;
        }
        Ok(Self { order })
    }

    pub fn identity(n: usize) -> Self {
        Self { order: (0..n).collect() }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Inverse permutation: `positions()[index] = rank position`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &i) in self.order.iter().enumerate() {
            pos[i] = p;
        }
        pos
    }

    /// Relabel samples: sample `i` becomes `map[i]`.
    pub fn relabel(&self, map: &[usize]) -> Result<Self> {
        Self::new(self.order.iter().map(|&i| map[i]).collect())
    }
}

/// One pairwise judgment: `z = +1` asserts `f(X_i) > f(X_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub i: usize,
    pub j: usize,
    pub z: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComparisonSet {
    items: Vec<Comparison>,
}

impl ComparisonSet {
    pub fn new(items: Vec<Comparison>, n: usize) -> Result<Self> {
        for c in &items {
            if c.i == c.j {
                return Err(Error::InvalidPair(c.i, c.j));
            }
            if c.i >= n || c.j >= n {
                return Err(Error::Dimension(format!(
                    "comparison ({}, {}) out of range for n = {n}",
                    c.i, c.j
                )));
            }
            if c.z != 1 && c.z != -1 {
                return Err(Error::InvalidValue(format!("comparison sign {} not in {{-1, +1}}", c.z)));
            }
        }
        Ok(Self { items })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Comparison> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Comparison] {
        &self.items
    }

    /// Largest index mentioned plus one (0 for an empty set).
    pub fn min_universe(&self) -> usize {
        self.items.iter().map(|c| c.i.max(c.j) + 1).max().unwrap_or(0)
    }
}

/// Function-value bound `M` and Hölder class parameters `(s, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelBounds {
    pub m_bound: f64,
    pub smoothness: f64,
    pub lipschitz: f64,
}

impl ModelBounds {
    pub fn new(m_bound: f64, smoothness: f64, lipschitz: f64) -> Result<Self> {
        if !(m_bound > 0.0 && m_bound.is_finite()) {
            return Err(Error::Parameter(format!("M must be positive, got {m_bound}")));
        }
        if !(smoothness > 0.0 && smoothness <= 1.0) {
            return Err(Error::Parameter(format!("s must lie in (0, 1], got {smoothness}")));
        }
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::Parameter(format!("L must be positive, got {lipschitz}")));
        }
        Ok(Self { m_bound, smoothness, lipschitz })
    }

    /// Bound large enough to leave the isotonic box inactive.
    pub fn loose() -> Self {
        Self { m_bound: 1e6, smoothness: 1.0, lipschitz: 1.0 }
    }

    pub fn clip(&self, v: f64) -> f64 {
        v.clamp(-self.m_bound, self.m_bound)
    }
}

impl Default for ModelBounds {
    fn default() -> Self {
        Self::loose()
    }
}

/// Kendall-Tau discordance counted over ordered pairs, as in the noisy-ranking model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankingNoiseReport {
    /// Discordant ordered pairs; each unordered discordant pair counts twice.
    pub discordant_ordered: u64,
    /// `discordant_ordered / n²`.
    pub nu: f64,
}

/// Ordered-pair Kendall-Tau distance between two rankings in O(n log n).
pub fn kendall_tau(a: &Ranking, b: &Ranking) -> Result<RankingNoiseReport> {
    let n = a.n();
    if n != b.n() {
        return Err(Error::Dimension(format!("rankings of size {n} and {}", b.n())));
    }
    // Walk samples in a-order and read off their b-positions; discordant pairs are inversions.
    let pos_b = b.positions();
    let mut seq: Vec<usize> = a.order().iter().map(|&i| pos_b[i]).collect();
    let inversions = count_inversions(&mut seq);
    let discordant_ordered = 2 * inversions;
    let nu = if n == 0 { 0.0 } else { discordant_ordered as f64 / (n as f64 * n as f64) };
    Ok(RankingNoiseReport { discordant_ordered, nu })
}

fn count_inversions(seq: &mut [usize]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mut buf = seq.to_vec();
    let mut count = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut l, mut r, mut k) = (start, mid, start);
            while l < mid && r < end {
                if seq[l] <= seq[r] {
                    buf[k] = seq[l];
                    l += 1;
                } else {
                    buf[k] = seq[r];
                    count += (mid - l) as u64;
                    r += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - l)].copy_from_slice(&seq[l..mid]);
            k += mid - l;
            buf[k..k + (end - r)].copy_from_slice(&seq[r..end]);
            start = end;
        }
        seq.copy_from_slice(&buf);
        width *= 2;
    }
    count
}

/// Ascending argsort; ties keep index order.
pub fn ranking_from_values(values: &[f64]) -> Result<Ranking> {
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::InvalidValue(format!("NaN at index {i}")));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(Ranking { order })
}

/// Mean squared error between two equal-length vectors.
pub fn mse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.is_empty() || pred.len() != truth.len() {
        return Err(Error::Dimension(format!(
            "mse needs equal non-empty lengths, got {} and {}",
            pred.len(),
            truth.len()
        )));
    }
    let sum: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(sum / pred.len() as f64)
}

/// Uniformly random size-`m` subset of `0..n`, returned in ascending order.
pub fn sample_labeled_subset<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Vec<usize>> {
    if m == 0 || m > n {
        return Err(Error::Budget(format!("need 1 <= m <= n, got m = {m}, n = {n}")));
    }
    let mut idx = rand::seq::index::sample(rng, n, m).into_vec();
    idx.sort_unstable();
    Ok(idx)
}
