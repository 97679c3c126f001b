use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Where an R² method gets its ranking from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSource {
    /// Sort the universe by (optionally noisy) true values.
    Values,
    Borda,
    KnnBorda,
    RankSvm,
}

/// A method name as written in experiment configs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// `knn:K` on noisy labels, `knn-truth:K` on noiseless ones.
    Knn { k: usize, truth: bool },
    /// `r2:K`, `r2-borda:K`, `r2-knn-borda:K`, `r2-ranksvm:K`.
    R2 { k: usize, source: RankSource },
    /// `r2-cv`: validation choice among R² and k-NN with k ∈ {1, 5}.
    R2Cv,
    /// `clr-passive`, `clr-active`, with `-aug` for the augmented variant.
    Clr { active: bool, augment: bool },
    Ols,
    /// `lasso` (tuned) or `lasso:λ`.
    Lasso { lambda: Option<f64> },
    /// `svr` (tuned) or `svr:C`.
    Svr { c: Option<f64> },
}

impl Method {
    /// Label-only methods get the whole budget as labels in cost-ratio mode.
    pub fn label_only(&self) -> bool {
        matches!(self, Method::Knn { .. } | Method::Ols | Method::Lasso { .. } | Method::Svr { .. })
    }

    pub fn uses_comparisons(&self) -> bool {
        matches!(self, Method::Clr { .. } | Method::R2 { source: RankSource::Borda | RankSource::KnnBorda | RankSource::RankSvm, .. })
    }

    pub fn needs_validation(&self) -> bool {
        matches!(self, Method::Lasso { lambda: None } | Method::Svr { .. } | Method::Clr { augment: true, .. })
    }
}

fn parse_k(name: &str, arg: Option<&str>) -> Result<usize> {
    let arg = arg.ok_or_else(|| Error::Config(format!("method {name} needs a neighbor count, e.g. {name}:5")))?;
    match arg.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(Error::Config(format!("bad neighbor count {arg:?} for {name}"))),
    }
}

fn parse_positive(name: &str, arg: Option<&str>) -> Result<Option<f64>> {
    match arg {
        None => Ok(None),
        Some(a) => match a.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Some(v)),
            _ => Err(Error::Config(format!("bad parameter {a:?} for {name}"))),
        },
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let no_arg = |m: Method| {
            if arg.is_some() {
                Err(Error::Config(format!("method {name} takes no parameter")))
            } else {
                Ok(m)
            }
        };
        match name {
            "knn" => Ok(Method::Knn { k: parse_k(name, arg)?, truth: false }),
            "knn-truth" => Ok(Method::Knn { k: parse_k(name, arg)?, truth: true }),
            "r2" => Ok(Method::R2 { k: parse_k(name, arg)?, source: RankSource::Values }),
            "r2-borda" => Ok(Method::R2 { k: parse_k(name, arg)?, source: RankSource::Borda }),
            "r2-knn-borda" => Ok(Method::R2 { k: parse_k(name, arg)?, source: RankSource::KnnBorda }),
            "r2-ranksvm" => Ok(Method::R2 { k: parse_k(name, arg)?, source: RankSource::RankSvm }),
            "r2-cv" => no_arg(Method::R2Cv),
            "clr-passive" => no_arg(Method::Clr { active: false, augment: false }),
            "clr-active" => no_arg(Method::Clr { active: true, augment: false }),
            "clr-passive-aug" => no_arg(Method::Clr { active: false, augment: true }),
            "clr-active-aug" => no_arg(Method::Clr { active: true, augment: true }),
            "ols" => no_arg(Method::Ols),
            "lasso" => Ok(Method::Lasso { lambda: parse_positive(name, arg)? }),
            "svr" => Ok(Method::Svr { c: parse_positive(name, arg)? }),
            _ => Err(Error::Config(format!("unknown method {s:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Method::Knn { k, truth: false } => write!(f, "knn:{k}"),
            Method::Knn { k, truth: true } => write!(f, "knn-truth:{k}"),
            Method::R2 { k, source } => {
                let prefix = match source {
                    RankSource::Values => "r2",
                    RankSource::Borda => "r2-borda",
                    RankSource::KnnBorda => "r2-knn-borda",
                    RankSource::RankSvm => "r2-ranksvm",
                };
                write!(f, "{prefix}:{k}")
            }
            Method::R2Cv => write!(f, "r2-cv"),
            Method::Clr { active, augment } => {
                write!(f, "clr-{}{}", if active { "active" } else { "passive" }, if augment { "-aug" } else { "" })
            }
            Method::Ols => write!(f, "ols"),
            Method::Lasso { lambda: None } => write!(f, "lasso"),
            Method::Lasso { lambda: Some(l) } => write!(f, "lasso:{l}"),
            Method::Svr { c: None } => write!(f, "svr"),
            Method::Svr { c: Some(c) } => write!(f, "svr:{c}"),
        }
    }
}
