//! Experiment configuration, read from TOML.
//!
//! ```toml
//! name = "perfect-ranking"
//! methods = ["knn:5", "r2:5"]
//! trials = 20
//! seed = 7
//!
//! [generator]
//! kind = "nonparametric"        # or "linear"
//! d = 8
//! label_sigma = 0.5
//!
//! [budget]
//! m = [25, 50, 100]
//! n = 1000                      # ranked samples or comparisons
//! # cost-ratio mode instead of n:
//! # c = [1, 2, 5]
//! # total_per_c = 50            # C = 50·c   (or: total = 500)
//!
//! [oracle]                      # comparison oracle
//! model = "flip"
//! lambda = 0.5
//!
//! [ranking]
//! sigma = 0.0                   # value noise behind the ranking
//!
//! [sweep]                       # only for `sweep`
//! axis = "ranking_sigma"
//! values = [0, 0.5, 1]
//! ```

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::budget::allocate_budget;
use super::method::Method;
use crate::error::{Error, Result};
use crate::oracle::ComparisonOracleConfig;
use crate::synthetic::{LinearSpec, NonparamSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorConfig {
    Nonparametric(NonparamSpec),
    Linear(LinearSpec),
}

impl GeneratorConfig {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorConfig::Nonparametric(_) => "nonparametric",
            GeneratorConfig::Linear(_) => "linear",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    /// Label counts.
    pub m: Vec<usize>,
    /// Ranked samples or comparisons when no cost ratio is given.
    #[serde(default)]
    pub n: Option<usize>,
    /// Cost ratios; switches to `n = C − c·m`.
    #[serde(default)]
    pub c: Option<Vec<f64>>,
    /// Fixed total budget `C`.
    #[serde(default)]
    pub total: Option<f64>,
    /// `C = total_per_c · c`.
    #[serde(default)]
    pub total_per_c: Option<f64>,
    /// Training samples generated per trial; a default is derived from the budget.
    #[serde(default)]
    pub universe: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankingConfig {
    /// Standard deviation of the value noise the ranking is sorted by.
    #[serde(default)]
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    M,
    C,
    #[serde(rename = "C")]
    Total,
    RankingSigma,
    ComparisonCount,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::M => "m",
            SweepAxis::C => "c",
            SweepAxis::Total => "C",
            SweepAxis::RankingSigma => "ranking_sigma",
            SweepAxis::ComparisonCount => "comparison_count",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "m" => SweepAxis::M,
            "c" => SweepAxis::C,
            "C" => SweepAxis::Total,
            "ranking_sigma" => SweepAxis::RankingSigma,
            "comparison_count" => SweepAxis::ComparisonCount,
            other => return Err(Error::Config(format!("unknown sweep axis {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

fn default_n_test() -> usize {
    1000
}

fn default_validation() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub generator: GeneratorConfig,
    pub methods: Vec<String>,
    pub budget: BudgetConfig,
    pub trials: usize,
    pub seed: u64,
    /// Comparison oracle. Defaults: noiseless for the nonparametric generator, the
    /// generator's own noisy-value oracle for the linear one.
    #[serde(default)]
    pub oracle: Option<ComparisonOracleConfig>,
    #[serde(default)]
    pub ranking: RankingConfig,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    /// Held-out points with noiseless targets used to tune hyperparameters.
    #[serde(default = "default_validation")]
    pub validation: usize,
    /// Add wall-clock time to records. Off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_timing: bool,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

/// One point of the budget grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub m: usize,
    /// Ranked samples or comparison budget.
    pub n: usize,
    pub c: Option<f64>,
    pub total: Option<f64>,
    /// Labels granted to label-only methods.
    pub label_only_m: usize,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn parsed_methods(&self) -> Result<Vec<Method>> {
        self.methods.iter().map(|m| m.parse()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("no methods listed".into()));
        }
        let methods = self.parsed_methods()?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.budget.m.is_empty() {
            return Err(Error::Config("budget.m must list at least one label count".into()));
        }
        if self.n_test == 0 {
            return Err(Error::Config("n_test must be at least 1".into()));
        }
        if !(self.ranking.sigma >= 0.0 && self.ranking.sigma.is_finite()) {
            return Err(Error::Config(format!("ranking.sigma must be >= 0, got {}", self.ranking.sigma)));
        }
        if let Some(o) = &self.oracle {
            o.validate()?;
        }
        if methods.iter().any(|m| m.needs_validation()) && self.validation == 0 {
            return Err(Error::Config("tuned methods need validation > 0".into()));
        }
        match &self.generator {
            GeneratorConfig::Nonparametric(s) => s.validate()?,
            GeneratorConfig::Linear(s) if s.d == 0 => return Err(Error::Config("linear generator needs d >= 1".into())),
            GeneratorConfig::Linear(_) => {}
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep.values must not be empty".into()));
            }
        }
        self.cells().map(|_| ())
    }

    /// Budget grid: cost ratios (outer) × label counts (inner).
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let b = &self.budget;
        let mut out = Vec::new();
        match &b.c {
            None => {
                let n = b.n.ok_or_else(|| Error::Config("budget needs either n or c".into()))?;
                for &m in &b.m {
                    out.push(Cell { m, n, c: None, total: None, label_only_m: m });
                }
            }
            Some(cs) => {
                if cs.is_empty() {
                    return Err(Error::Config("budget.c must not be empty".into()));
                }
                for &c in cs {
                    let total = match (b.total, b.total_per_c) {
                        (Some(t), None) => t,
                        (None, Some(per)) => per * c,
                        _ => return Err(Error::Config("cost-ratio budgets need exactly one of total, total_per_c".into())),
                    };
                    for &m in &b.m {
                        let plan = allocate_budget(c, total, m)?;
                        out.push(Cell { m, n: plan.n, c: Some(c), total: Some(total), label_only_m: plan.label_only_m() });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Copy of the config with one axis pinned to `value`.
    pub fn with_axis(&self, axis: SweepAxis, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.sweep = None;
        let count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Config(format!("{} needs a non-negative integer, got {v}", axis.name())))
            }
        };
        match axis {
            SweepAxis::M => cfg.budget.m = vec![count(value)?],
            SweepAxis::C => cfg.budget.c = Some(vec![value]),
            SweepAxis::Total => {
                cfg.budget.total = Some(value);
                cfg.budget.total_per_c = None;
            }
            SweepAxis::RankingSigma => cfg.ranking.sigma = value,
            SweepAxis::ComparisonCount => cfg.budget.n = Some(count(value)?),
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
name = "t"
methods = ["knn:5", "r2:5"]
trials = 3
seed = 1
[generator]
kind = "nonparametric"
[budget]
m = [10, 20]
n = 200
"#;

    #[test]
    fn parses_and_defaults() {
        let cfg = ExperimentConfig::from_toml_str(BASIC).unwrap();
        assert_eq!(cfg.n_test, 1000);
        assert!(matches!(cfg.generator, GeneratorConfig::Nonparametric(s) if s.d == 8 && s.label_sigma == 0.5));
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[1].m, 20);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn cost_cells() {
        let text = BASIC.replace("n = 200", "c = [1, 5]\ntotal_per_c = 50");
        let cfg = ExperimentConfig::from_toml_str(&text).unwrap();
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 4);
        assert_eq!((cells[2].n, cells[2].label_only_m, cells[2].total), (200, 50, Some(250.0)));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml_str(&BASIC.replace("knn:5", "magic")).is_err());
        assert!(ExperimentConfig::from_toml_str(&BASIC.replace("trials = 3", "trials = 0")).is_err());
        assert!(ExperimentConfig::from_toml_str(&BASIC.replace("n = 200", "c = [10]\ntotal = 50")).is_err());
        assert!(ExperimentConfig::from_toml_str(&format!("{BASIC}\nbogus = 1")).is_err());
    }

    #[test]
    fn axis_override() {
        let cfg = ExperimentConfig::from_toml_str(BASIC).unwrap();
        let one = cfg.with_axis(SweepAxis::M, 50.0).unwrap();
        assert_eq!(one.budget.m, vec![50]);
        assert_eq!(cfg.with_axis(SweepAxis::RankingSigma, 1.5).unwrap().ranking.sigma, 1.5);
        assert!(cfg.with_axis(SweepAxis::M, 2.5).is_err());
        assert_eq!("C".parse::<SweepAxis>().unwrap(), SweepAxis::Total);
    }
}
