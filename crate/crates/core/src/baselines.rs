//! Label-only regressors: k-NN, OLS, LASSO and linear SVR.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::SampleSet;
use crate::error::{Error, Result};
use crate::neighbors::knn_mean;

/// k-NN regressor over the labeled rows of a sample set.
#[derive(Debug, Clone)]
pub struct KnnRegressor {
    rows: SampleSet,
    targets: Vec<f64>,
    k: usize,
}

pub fn fit_knn(train: &SampleSet, k: usize) -> Result<KnnRegressor> {
    let labeled = train.labeled();
    if labeled.is_empty() {
        return Err(Error::Budget("k-NN needs at least one labeled row".into()));
    }
    if k == 0 || k > labeled.len() {
        return Err(Error::Parameter(format!("k = {k} with {} labeled rows", labeled.len())));
    }
    let idx: Vec<usize> = labeled.iter().map(|&(i, _)| i).collect();
    Ok(KnnRegressor {
        rows: train.subset(&idx)?,
        targets: labeled.iter().map(|&(_, y)| y).collect(),
        k,
    })
}

impl KnnRegressor {
    pub fn predict(&self, query: &[f64]) -> Result<f64> {
        if query.len() != self.rows.d() {
            return Err(Error::Dimension(format!(
                "query has {} features, model expects {}",
                query.len(),
                self.rows.d()
            )));
        }
        Ok(knn_mean(&self.rows, &self.targets, query, self.k))
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict(&self, query: &[f64]) -> Result<f64> {
        if query.len() != self.weights.len() {
            return Err(Error::Dimension(format!(
                "query has {} features, model expects {}",
                query.len(),
                self.weights.len()
            )));
        }
        Ok(dot(&self.weights, query) + self.intercept)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn labeled_xy(train: &SampleSet) -> Result<(Vec<&[f64]>, Vec<f64>)> {
    let labeled = train.labeled();
    if labeled.is_empty() {
        return Err(Error::Budget("no labeled rows".into()));
    }
    Ok((
        labeled.iter().map(|&(i, _)| train.row(i)).collect(),
        labeled.iter().map(|&(_, y)| y).collect(),
    ))
}

fn column_means(xs: &[&[f64]], d: usize) -> Vec<f64> {
    let mut mean = vec![0.0; d];
    for x in xs {
        for (m, v) in mean.iter_mut().zip(x.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= xs.len() as f64);
    mean
}

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub model: LinearModel,
    /// True when the centered Gram matrix was singular and ridge jitter was added.
    pub jitter_used: bool,
}

const OLS_JITTER: f64 = 1e-8;

/// Least squares with intercept via the centered normal equations.
pub fn fit_ols(train: &SampleSet) -> Result<OlsFit> {
    let (xs, ys) = labeled_xy(train)?;
    let (m, d) = (xs.len(), train.d());
    let x_mean = column_means(&xs, d);
    let y_mean = ys.iter().sum::<f64>() / m as f64;
    let xc = DMatrix::from_fn(m, d, |i, j| xs[i][j] - x_mean[j]);
    let yc = DVector::from_iterator(m, ys.iter().map(|y| y - y_mean));
    let gram = xc.transpose() * &xc;
    let rhs = xc.transpose() * yc;

    let scale = gram.diagonal().max().max(1.0);
    let well_posed = gram.clone().cholesky().filter(|ch| {
        let l = ch.l();
        (0..d).all(|i| l[(i, i)] * l[(i, i)] > 1e-10 * scale)
    });
    let (w, jitter_used) = match well_posed {
        Some(ch) => (ch.solve(&rhs), false),
        None => {
            let ridge = gram + DMatrix::identity(d, d) * OLS_JITTER * scale;
            let ch = ridge
                .cholesky()
                .ok_or_else(|| Error::Degenerate("jittered Gram matrix not positive definite".into()))?;
            (ch.solve(&rhs), true)
        }
    };
    let weights: Vec<f64> = w.iter().copied().collect();
    let intercept = y_mean - dot(&weights, &x_mean);
    Ok(OlsFit { model: LinearModel { weights, intercept }, jitter_used })
}

#[derive(Debug, Clone)]
pub struct LassoFit {
    pub model: LinearModel,
    pub converged: bool,
    pub sweeps: usize,
    /// Objective in standardized coordinates after each sweep.
    pub objective_trace: Vec<f64>,
}

pub const LASSO_TOL: f64 = 1e-7;
pub const LASSO_MAX_SWEEPS: usize = 10_000;

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Cyclic coordinate descent for `(1/2m)‖r‖² + λ‖w‖₁` on standardized features.
///
/// Weights are mapped back to the raw feature scale before returning.
pub fn fit_lasso(train: &SampleSet, lambda: f64) -> Result<LassoFit> {
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let (xs, ys) = labeled_xy(train)?;
    let (m, d) = (xs.len(), train.d());
    let mf = m as f64;
    let mean = column_means(&xs, d);
    let mut std = vec![0.0; d];
    for x in &xs {
        for j in 0..d {
            std[j] += (x[j] - mean[j]).powi(2);
        }
    }
    std.iter_mut().for_each(|s| *s = (*s / mf).sqrt());

    // Column-major standardized design; zero-variance columns stay at zero weight.
    let active: Vec<bool> = std.iter().map(|&s| s > 1e-12).collect();
    let z: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            if active[j] {
                xs.iter().map(|x| (x[j] - mean[j]) / std[j]).collect()
            } else {
                vec![0.0; m]
            }
        })
        .collect();
    let y_mean = ys.iter().sum::<f64>() / mf;
    let mut resid: Vec<f64> = ys.iter().map(|y| y - y_mean).collect();
    let mut w = vec![0.0; d];

    let objective = |resid: &[f64], w: &[f64]| {
        resid.iter().map(|r| r * r).sum::<f64>() / (2.0 * mf) + lambda * w.iter().map(|v| v.abs()).sum::<f64>()
    };
    let mut trace = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < LASSO_MAX_SWEEPS {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for j in (0..d).filter(|&j| active[j]) {
            let zj = &z[j];
            let rho = dot(zj, &resid) / mf + w[j];
            let new = soft_threshold(rho, lambda);
            let delta = new - w[j];
            if delta != 0.0 {
                for (r, zv) in resid.iter_mut().zip(zj) {
                    *r -= delta * zv;
                }
                w[j] = new;
            }
            max_change = max_change.max(delta.abs());
        }
        trace.push(objective(&resid, &w));
        if max_change < LASSO_TOL {
            converged = true;
            break;
        }
    }

    let weights: Vec<f64> = (0..d).map(|j| if active[j] { w[j] / std[j] } else { 0.0 }).collect();
    let intercept = y_mean - dot(&weights, &mean);
    Ok(LassoFit { model: LinearModel { weights, intercept }, converged, sweeps, objective_trace: trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub epochs: usize,
    pub eta0: f64,
}

impl Default for SvrParams {
    fn default() -> Self {
        Self { c: 1.0, epsilon: 0.1, epochs: 50, eta0: 0.1 }
    }
}

/// Linear ε-insensitive SVR by stochastic subgradient descent.
///
/// Minimizes `(1/2Cm)‖w‖² + (1/m) Σ max(0, |y − ⟨w,x⟩ − b| − ε)`, the primal scaled by `1/(Cm)`.
/// Schedule: rows are reshuffled in place at the start of every epoch, the global step
/// counter `t` starts at 1 and `η_t = eta0 / √t`. For a residual `r` outside the tube,
/// `g = sign(r)`, else `g = 0`; then `w ← w − η (w/(Cm) − g·x)` and `b ← b + η g`.
/// The returned model averages the iterates of the second half of all steps.
pub fn fit_linear_svr<R: Rng + ?Sized>(train: &SampleSet, params: SvrParams, rng: &mut R) -> Result<LinearModel> {
    if !(params.c > 0.0) {
        return Err(Error::Parameter(format!("C must be positive, got {}", params.c)));
    }
    if !(params.epsilon >= 0.0) {
        return Err(Error::Parameter(format!("epsilon must be >= 0, got {}", params.epsilon)));
    }
    let (xs, ys) = labeled_xy(train)?;
    let (m, d) = (xs.len(), train.d());
    let reg = 1.0 / (params.c * m as f64);
    let total = params.epochs.max(1) * m;
    let avg_from = total / 2;

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut w_avg = vec![0.0; d];
    let mut b_avg = 0.0;
    let mut n_avg = 0usize;
    let mut order: Vec<usize> = (0..m).collect();
    let mut t = 0usize;
    for _ in 0..params.epochs.max(1) {
        order.shuffle(rng);
        for &i in &order {
            t += 1;
            let eta = params.eta0 / (t as f64).sqrt();
            let x = xs[i];
            let r = ys[i] - dot(&w, x) - b;
            let g = if r.abs() > params.epsilon { r.signum() } else { 0.0 };
            for (wj, xj) in w.iter_mut().zip(x.iter()) {
                *wj -= eta * (*wj * reg - g * xj);
            }
            b += eta * g;
            if t > avg_from {
                n_avg += 1;
                for (a, wj) in w_avg.iter_mut().zip(&w) {
                    *a += wj;
                }
                b_avg += b;
            }
        }
    }
    let k = n_avg.max(1) as f64;
    Ok(LinearModel { weights: w_avg.iter().map(|v| v / k).collect(), intercept: b_avg / k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn linear_data(m: usize, d: usize, w: &[f64], b: f64, seed: u64) -> SampleSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let feats: Vec<f64> = (0..m * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let s = SampleSet::new(feats, d).unwrap();
        let ys: Vec<f64> = s.rows().map(|x| dot(w, x) + b).collect();
        s.with_all_labels(&ys).unwrap()
    }

    #[test]
    fn knn_examples() {
        let s = linear_data(20, 2, &[1.0, -2.0], 0.5, 1);
        let model = fit_knn(&s, 1).unwrap();
        for i in 0..s.n() {
            assert_eq!(model.predict(s.row(i)).unwrap(), s.label(i).unwrap());
        }
        let all = fit_knn(&s, 20).unwrap();
        let mean = s.labeled().iter().map(|p| p.1).sum::<f64>() / 20.0;
        assert!((all.predict(&[0.3, 0.3]).unwrap() - mean).abs() < 1e-12);
        assert!(matches!(fit_knn(&s, 21), Err(Error::Parameter(_))));
        assert!(matches!(all.predict(&[0.0]), Err(Error::Dimension(_))));
    }

    #[test]
    fn knn_ignores_unlabeled_rows() {
        let s = SampleSet::from_rows(&[vec![0.0], vec![1.0], vec![2.0]])
            .unwrap()
            .with_labels(vec![Some(5.0), None, Some(7.0)])
            .unwrap();
        let model = fit_knn(&s, 1).unwrap();
        assert_eq!(model.predict(&[1.1]).unwrap(), 7.0);
        assert!(fit_knn(&s, 3).is_err());
    }

    #[test]
    fn ols_recovers_exact_linear_data() {
        let w = [0.5, -1.5, 2.0];
        let fit = fit_ols(&linear_data(30, 3, &w, 0.7, 2)).unwrap();
        assert!(!fit.jitter_used);
        for (a, b) in fit.model.weights.iter().zip(&w) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!((fit.model.intercept - 0.7).abs() < 1e-6);
    }

    #[test]
    fn ols_constant_labels() {
        let s = linear_data(10, 2, &[0.0, 0.0], 3.25, 3);
        let fit = fit_ols(&s).unwrap();
        assert!(fit.model.weights.iter().all(|w| w.abs() < 1e-9));
        assert!((fit.model.intercept - 3.25).abs() < 1e-9);
    }

    #[test]
    fn ols_single_sample_uses_jitter() {
        let s = SampleSet::from_rows(&[vec![1.0, 2.0]]).unwrap().with_all_labels(&[4.0]).unwrap();
        let fit = fit_ols(&s).unwrap();
        assert!(fit.jitter_used);
        assert!((fit.model.predict(&[1.0, 2.0]).unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn lasso_kills_all_weights_above_lambda_max() {
        let s = linear_data(40, 3, &[1.0, 2.0, -1.0], 0.0, 4);
        let fit = fit_lasso(&s, 100.0).unwrap();
        assert!(fit.model.weights.iter().all(|&w| w == 0.0));
        assert!(fit.converged);
    }

    #[test]
    fn lasso_rejects_negative_lambda() {
        let s = linear_data(5, 1, &[1.0], 0.0, 5);
        assert!(matches!(fit_lasso(&s, -1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn svr_rejects_bad_params() {
        let s = linear_data(5, 1, &[1.0], 0.0, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let bad_c = SvrParams { c: 0.0, ..SvrParams::default() };
        assert!(fit_linear_svr(&s, bad_c, &mut rng).is_err());
        let bad_eps = SvrParams { epsilon: -0.1, ..SvrParams::default() };
        assert!(fit_linear_svr(&s, bad_eps, &mut rng).is_err());
    }

    #[test]
    fn svr_huge_tube_shrinks_weights() {
        let s = linear_data(50, 2, &[3.0, -2.0], 0.0, 6);
        let params = SvrParams { c: 1.0, epsilon: 1e6, epochs: 50, eta0: 0.5 };
        let model = fit_linear_svr(&s, params, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(model.weights.iter().all(|w| w.abs() < 1e-12));
    }
}
