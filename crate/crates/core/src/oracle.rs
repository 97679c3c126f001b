//! Simulated label and comparison oracles.
//!
//! Every oracle owns its RNG stream. [`Counted`] wraps an oracle and tallies calls so a
//! harness can check that a fit stayed within its budget.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::data::{Comparison, ComparisonSet};
use crate::error::{Error, Result};

/// Noise model for pairwise judgments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ComparisonOracleConfig {
    /// True sign flipped independently with probability `1/2 − lambda`.
    Flip { lambda: f64 },
    /// Sign of `(f_i + ε₁) − (f_j + ε₂)`, `ε ~ N(0, sigma²)` drawn fresh per judgment.
    NoisyValue { sigma: f64 },
}

impl ComparisonOracleConfig {
    pub fn noiseless() -> Self {
        Self::Flip { lambda: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Flip { lambda } if !(lambda > 0.0 && lambda <= 0.5) => {
                Err(Error::Parameter(format!("flip margin lambda must lie in (0, 1/2], got {lambda}")))
            }
            Self::NoisyValue { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => {
                Err(Error::Parameter(format!("value noise sigma must be >= 0, got {sigma}")))
            }
            _ => Ok(()),
        }
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else {
        -1
    }
}

/// One judgment on the pair `(a, b)` with true values `fa`, `fb`.
pub fn judge<R: Rng + ?Sized>(fa: f64, fb: f64, cfg: &ComparisonOracleConfig, rng: &mut R) -> i8 {
    match *cfg {
        ComparisonOracleConfig::Flip { lambda } => {
            let z = sign(fa - fb);
            let flip = 0.5 - lambda;
            if flip > 0.0 && rng.random::<f64>() < flip {
                -z
            } else {
                z
            }
        }
        ComparisonOracleConfig::NoisyValue { sigma } => {
            if sigma == 0.0 {
                return sign(fa - fb);
            }
            let noise = Normal::new(0.0, sigma).expect("sigma validated");
            sign((fa + noise.sample(rng)) - (fb + noise.sample(rng)))
        }
    }
}

/// Judge every listed pair against `truth`.
pub fn simulate_comparisons<R: Rng + ?Sized>(
    truth: &[f64],
    pairs: &[(usize, usize)],
    cfg: &ComparisonOracleConfig,
    rng: &mut R,
) -> Result<ComparisonSet> {
    cfg.validate()?;
    if truth.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidValue("non-finite truth value".into()));
    }
    let n = truth.len();
    let mut items = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        if i == j {
            return Err(Error::InvalidPair(i, j));
        }
        if i >= n || j >= n {
            return Err(Error::Dimension(format!("pair ({i}, {j}) out of range for n = {n}")));
        }
        items.push(Comparison { i, j, z: judge(truth[i], truth[j], cfg, rng) });
    }
    ComparisonSet::new(items, n)
}

/// `count` distinct unordered pairs `(i, j)`, `i < j`, drawn uniformly without replacement.
pub fn sample_pairs<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    let total = n * n.saturating_sub(1) / 2;
    if count > total {
        return Err(Error::Budget(format!("{count} pairs requested but only {total} exist for n = {n}")));
    }
    let offset = |i: usize| i * n - i * (i + 1) / 2;
    let mut linear = rand::seq::index::sample(rng, total, count).into_vec();
    linear.sort_unstable();
    Ok(linear
        .into_iter()
        .map(|k| {
            // Largest i with offset(i) <= k.
            let (mut lo, mut hi) = (0usize, n - 1);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if offset(mid) <= k {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let i = if offset(hi) <= k { hi } else { lo };
            (i, i + 1 + (k - offset(i)))
        })
        .collect())
}

pub trait ComparisonOracle {
    /// `+1` when the oracle believes `f(X_i) > f(X_j)`, else `-1`.
    fn compare(&mut self, i: usize, j: usize) -> Result<i8>;
}

pub trait LabelOracle {
    fn label(&mut self, i: usize) -> Result<f64>;
}

/// Comparison oracle over a fixed vector of true values.
#[derive(Debug, Clone)]
pub struct SimulatedComparisons<R> {
    truth: Vec<f64>,
    cfg: ComparisonOracleConfig,
    rng: R,
}

impl<R: Rng> SimulatedComparisons<R> {
    pub fn new(truth: Vec<f64>, cfg: ComparisonOracleConfig, rng: R) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { truth, cfg, rng })
    }
}

impl<R: Rng> ComparisonOracle for SimulatedComparisons<R> {
    fn compare(&mut self, i: usize, j: usize) -> Result<i8> {
        if i == j {
            return Err(Error::InvalidPair(i, j));
        }
        let n = self.truth.len();
        if i >= n || j >= n {
            return Err(Error::Dimension(format!("pair ({i}, {j}) out of range for n = {n}")));
        }
        Ok(judge(self.truth[i], self.truth[j], &self.cfg, &mut self.rng))
    }
}

/// Label oracle returning `truth[i] + N(0, sigma²)`.
#[derive(Debug, Clone)]
pub struct SimulatedLabels<R> {
    truth: Vec<f64>,
    noise: Option<Normal<f64>>,
    rng: R,
}

impl<R: Rng> SimulatedLabels<R> {
    pub fn new(truth: Vec<f64>, sigma: f64, rng: R) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!("label noise sigma must be >= 0, got {sigma}")));
        }
        let noise = (sigma > 0.0).then(|| Normal::new(0.0, sigma).expect("sigma validated"));
        Ok(Self { truth, noise, rng })
    }
}

impl<R: Rng> LabelOracle for SimulatedLabels<R> {
    fn label(&mut self, i: usize) -> Result<f64> {
        let f = *self
            .truth
            .get(i)
            .ok_or_else(|| Error::Dimension(format!("label index {i} out of range")))?;
        Ok(match &self.noise {
            Some(dist) => f + dist.sample(&mut self.rng),
            None => f,
        })
    }
}

/// Call-counting wrapper around either oracle kind.
#[derive(Debug, Clone)]
pub struct Counted<O> {
    inner: O,
    used: usize,
}

impl<O> Counted<O> {
    pub fn new(inner: O) -> Self {
        Self { inner, used: 0 }
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: ComparisonOracle> ComparisonOracle for Counted<O> {
    fn compare(&mut self, i: usize, j: usize) -> Result<i8> {
        self.used += 1;
        self.inner.compare(i, j)
    }
}

impl<O: LabelOracle> LabelOracle for Counted<O> {
    fn label(&mut self, i: usize) -> Result<f64> {
        self.used += 1;
        self.inner.label(i)
    }
}

impl<O: ComparisonOracle + ?Sized> ComparisonOracle for &mut O {
    fn compare(&mut self, i: usize, j: usize) -> Result<i8> {
        (**self).compare(i, j)
    }
}

impl<O: LabelOracle + ?Sized> LabelOracle for &mut O {
    fn label(&mut self, i: usize) -> Result<f64> {
        (**self).label(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_limits_match_true_sign() {
        let truth = [0.3, -1.0, 2.0, 0.7];
        let pairs = sample_pairs(4, 6, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let flip = simulate_comparisons(&truth, &pairs, &ComparisonOracleConfig::Flip { lambda: 0.5 }, &mut rng)
            .unwrap();
        let value = simulate_comparisons(&truth, &pairs, &ComparisonOracleConfig::NoisyValue { sigma: 0.0 }, &mut rng)
            .unwrap();
        assert_eq!(flip, value);
        for c in flip.iter() {
            assert_eq!(c.z, if truth[c.i] > truth[c.j] { 1 } else { -1 });
        }
    }

    #[test]
    fn flip_rate_matches_margin() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let cfg = ComparisonOracleConfig::Flip { lambda: 0.1 };
        let pairs = vec![(0, 1); 100_000];
        let set = simulate_comparisons(&[1.0, 0.0], &pairs, &cfg, &mut rng).unwrap();
        let errors = set.iter().filter(|c| c.z != 1).count() as f64 / 100_000.0;
        assert!((errors - 0.4).abs() < 0.01, "error rate {errors}");
    }

    #[test]
    fn invalid_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cfg = ComparisonOracleConfig::noiseless();
        assert!(matches!(simulate_comparisons(&[1.0, 2.0], &[(1, 1)], &cfg, &mut rng), Err(Error::InvalidPair(1, 1))));
        assert!(simulate_comparisons(&[1.0, 2.0], &[(0, 2)], &cfg, &mut rng).is_err());
        let bad = ComparisonOracleConfig::Flip { lambda: 0.0 };
        assert!(simulate_comparisons(&[1.0, 2.0], &[(0, 1)], &bad, &mut rng).is_err());
        assert!(ComparisonOracleConfig::NoisyValue { sigma: -1.0 }.validate().is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let truth: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let pairs = sample_pairs(20, 50, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let cfg = ComparisonOracleConfig::NoisyValue { sigma: 0.5 };
        let a = simulate_comparisons(&truth, &pairs, &cfg, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = simulate_comparisons(&truth, &pairs, &cfg, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pair_sampling_is_exhaustive_and_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let all = sample_pairs(6, 15, &mut rng).unwrap();
        let mut expected = Vec::new();
        for i in 0..6 {
            for j in (i + 1)..6 {
                expected.push((i, j));
            }
        }
        assert_eq!(all, expected);
        assert!(sample_pairs(6, 16, &mut rng).is_err());
        let some = sample_pairs(100, 500, &mut rng).unwrap();
        let mut dedup = some.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 500);
        assert!(some.iter().all(|&(i, j)| i < j && j < 100));
    }

    #[test]
    fn counted_tallies_calls() {
        let oracle = SimulatedLabels::new(vec![1.0, 2.0], 0.0, ChaCha8Rng::seed_from_u64(0)).unwrap();
        let mut counted = Counted::new(oracle);
        assert_eq!(counted.label(1).unwrap(), 2.0);
        counted.label(0).unwrap();
        assert_eq!(counted.used(), 2);
        assert!(counted.label(5).is_err());
    }
}
