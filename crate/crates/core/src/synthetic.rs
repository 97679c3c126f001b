//! Simulated datasets: an additive nonparametric target on the unit cube and a dense
//! Gaussian linear model with noisy-value comparisons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::baselines::dot;
use crate::data::SampleSet;
use crate::error::{Error, Result};
use crate::oracle::{ComparisonOracleConfig, SimulatedComparisons, SimulatedLabels};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NonparamSpec {
    pub d: usize,
    /// Fixed frequency; drawn from `U[0, 10]` per dataset when `None`.
    pub p: Option<f64>,
    pub label_sigma: f64,
    /// Draw a separate `p` for every dimension instead of one shared value.
    pub per_dimension_p: bool,
}

impl Default for NonparamSpec {
    fn default() -> Self {
        Self { d: 8, p: None, label_sigma: 0.5, per_dimension_p: false }
    }
}

impl NonparamSpec {
    pub fn validate(&self) -> Result<()> {
        if self.d < 4 {
            return Err(Error::Parameter(format!("nonparametric generator needs d >= 4, got {}", self.d)));
        }
        if let Some(p) = self.p {
            if !(0.0..=10.0).contains(&p) {
                return Err(Error::Parameter(format!("p must lie in [0, 10], got {p}")));
            }
        }
        if !(self.label_sigma >= 0.0 && self.label_sigma.is_finite()) {
            return Err(Error::Parameter(format!("label sigma must be >= 0, got {}", self.label_sigma)));
        }
        Ok(())
    }
}

/// Component `f^(kind)` for `kind` in `1..=4`.
pub fn component(kind: usize, p: f64, x: f64) -> f64 {
    match kind {
        1 => p * x - 0.5,
        2 => p * x * x * x - 1.0 / 3.0,
        3 => -2.0 * (-p * x).sin(),
        4 => (-p * x).exp() + (-1.0f64).exp() - 1.0,
        _ => panic!("component kind must be 1..=4, got {kind}"),
    }
}

/// Component used for 1-based dimension `i`: the cycle 1, 2, 3, 4, 1, …
pub fn component_kind(i: usize) -> usize {
    match i % 4 {
        0 => 4,
        r => r,
    }
}

/// Unstandardized `f(x) = Σ_i f^(i mod 4)(x_i)`; `ps` holds one value or one per dimension.
pub fn nonparametric_raw(x: &[f64], ps: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(j, &xj)| {
            let p = if ps.len() == 1 { ps[0] } else { ps[j] };
            component(component_kind(j + 1), p, xj)
        })
        .sum()
}

/// Mean and standard deviation (population) of a reference sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: f64,
    pub std: f64,
}

impl Standardizer {
    pub fn fit(reference: &[f64]) -> Result<Self> {
        if reference.is_empty() {
            return Err(Error::Dimension("cannot standardize against an empty reference".into()));
        }
        let n = reference.len() as f64;
        let mean = reference.iter().sum::<f64>() / n;
        let var = reference.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        if !(var > 0.0) {
            return Err(Error::Degenerate("reference values have zero variance".into()));
        }
        Ok(Self { mean, std: var.sqrt() })
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| (v - self.mean) / self.std).collect()
    }
}

pub fn standardize(values: &[f64], reference: &Standardizer) -> Vec<f64> {
    reference.apply(values)
}

#[derive(Debug, Clone)]
pub struct NonparamData {
    /// Every training row carries a noisy label.
    pub train: SampleSet,
    pub test: SampleSet,
    pub train_truth: Vec<f64>,
    pub test_truth: Vec<f64>,
    pub p: Vec<f64>,
    pub standardizer: Standardizer,
}

fn uniform_rows<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<SampleSet> {
    SampleSet::new((0..n * d).map(|_| rng.random::<f64>()).collect(), d)
}

pub fn gen_nonparametric<R: Rng + ?Sized>(
    spec: &NonparamSpec,
    n_train: usize,
    n_test: usize,
    rng: &mut R,
) -> Result<NonparamData> {
    spec.validate()?;
    if n_train == 0 || n_test == 0 {
        return Err(Error::Dimension("train and test sizes must be at least 1".into()));
    }
    let p: Vec<f64> = match spec.p {
        Some(p) => vec![p],
        None if spec.per_dimension_p => (0..spec.d).map(|_| rng.random::<f64>() * 10.0).collect(),
        None => vec![rng.random::<f64>() * 10.0],
    };
    let train_x = uniform_rows(n_train, spec.d, rng)?;
    let test_x = uniform_rows(n_test, spec.d, rng)?;
    let raw_train: Vec<f64> = train_x.rows().map(|x| nonparametric_raw(x, &p)).collect();
    let raw_test: Vec<f64> = test_x.rows().map(|x| nonparametric_raw(x, &p)).collect();
    let standardizer = Standardizer::fit(&raw_train)?;
    let train_truth = standardizer.apply(&raw_train);
    let test_truth = standardizer.apply(&raw_test);
    let labels: Vec<f64> = if spec.label_sigma > 0.0 {
        let noise = Normal::new(0.0, spec.label_sigma).expect("sigma validated");
        train_truth.iter().map(|f| f + noise.sample(rng)).collect()
    } else {
        train_truth.clone()
    };
    Ok(NonparamData {
        train: train_x.with_all_labels(&labels)?,
        test: test_x,
        train_truth,
        test_truth,
        p,
        standardizer,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearSpec {
    pub d: usize,
    pub label_sigma: f64,
    pub comparison_sigma: f64,
}

impl Default for LinearSpec {
    fn default() -> Self {
        Self { d: 50, label_sigma: 0.5, comparison_sigma: 0.5 }
    }
}

#[derive(Debug, Clone)]
pub struct LinearData {
    /// Unlabeled; labels come from `labels`.
    pub train: SampleSet,
    pub test: SampleSet,
    pub w_star: Vec<f64>,
    pub train_truth: Vec<f64>,
    pub test_truth: Vec<f64>,
    pub labels: SimulatedLabels<ChaCha8Rng>,
    pub comparisons: SimulatedComparisons<ChaCha8Rng>,
}

fn gaussian_rows<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<SampleSet> {
    SampleSet::new((0..n * d).map(|_| StandardNormal.sample(rng)).collect(), d)
}

pub fn gen_linear<R: Rng + ?Sized>(spec: &LinearSpec, n_train: usize, n_test: usize, rng: &mut R) -> Result<LinearData> {
    if spec.d == 0 {
        return Err(Error::Parameter("linear generator needs d >= 1".into()));
    }
    if n_train == 0 || n_test == 0 {
        return Err(Error::Dimension("train and test sizes must be at least 1".into()));
    }
    let w_star: Vec<f64> = (0..spec.d).map(|_| StandardNormal.sample(rng)).collect();
    let train = gaussian_rows(n_train, spec.d, rng)?;
    let test = gaussian_rows(n_test, spec.d, rng)?;
    let train_truth: Vec<f64> = train.rows().map(|x| dot(&w_star, x)).collect();
    let test_truth: Vec<f64> = test.rows().map(|x| dot(&w_star, x)).collect();
    let labels = SimulatedLabels::new(train_truth.clone(), spec.label_sigma, ChaCha8Rng::seed_from_u64(rng.random()))?;
    let comparisons = SimulatedComparisons::new(
        train_truth.clone(),
        ComparisonOracleConfig::NoisyValue { sigma: spec.comparison_sigma },
        ChaCha8Rng::seed_from_u64(rng.random()),
    )?;
    Ok(LinearData { train, test, w_star, train_truth, test_truth, labels, comparisons })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{ComparisonOracle, LabelOracle};

    #[test]
    fn component_values() {
        assert_eq!(component(1, 10.0, 1.0), 9.5);
        for p in [0.0, 3.0, 10.0] {
            assert!((component(4, p, 0.0) - (-1.0f64).exp()).abs() < 1e-15);
        }
        assert_eq!((1..=8).map(component_kind).collect::<Vec<_>>(), vec![1, 2, 3, 4, 1, 2, 3, 4]);
    }

    #[test]
    fn train_truth_is_standardized() {
        let data = gen_nonparametric(&NonparamSpec::default(), 1000, 200, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let n = data.train_truth.len() as f64;
        let mean = data.train_truth.iter().sum::<f64>() / n;
        let var = data.train_truth.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        assert!(mean.abs() <= 1e-12);
        assert!((var - 1.0).abs() <= 1e-12);
        assert!(data.train.features().iter().chain(data.test.features()).all(|&x| (0.0..=1.0).contains(&x)));
        assert_eq!(data.train.labeled_indices().len(), 1000);
    }

    #[test]
    fn standardize_examples() {
        let reference = [1.0, 2.0, 3.0, 6.0];
        let s = Standardizer::fit(&reference).unwrap();
        let shifted: Vec<f64> = reference.iter().map(|v| v - s.mean).collect();
        let centered = Standardizer::fit(&shifted).unwrap();
        assert!(centered.mean.abs() < 1e-15);
        let own = standardize(&reference, &s);
        let m = own.iter().sum::<f64>() / 4.0;
        let v = own.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / 4.0;
        assert!(m.abs() < 1e-15 && (v - 1.0).abs() < 1e-12);
        assert!(matches!(Standardizer::fit(&[2.0, 2.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn noiseless_linear_oracles() {
        let spec = LinearSpec { d: 5, label_sigma: 0.0, comparison_sigma: 0.0 };
        let mut data = gen_linear(&spec, 20, 5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        for i in 0..20 {
            let f = dot(&data.w_star, data.train.row(i));
            assert_eq!(data.labels.label(i).unwrap(), f);
            let j = (i + 1) % 20;
            let z = data.comparisons.compare(i, j).unwrap();
            assert_eq!(z, if f > data.train_truth[j] { 1 } else { -1 });
        }
        let again = gen_linear(&spec, 20, 5, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(again.w_star, data.w_star);
    }

    #[test]
    fn bad_specs() {
        let spec = NonparamSpec { d: 3, ..NonparamSpec::default() };
        assert!(gen_nonparametric(&spec, 10, 10, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
        let spec = NonparamSpec { p: Some(11.0), ..NonparamSpec::default() };
        assert!(spec.validate().is_err());
    }
}
