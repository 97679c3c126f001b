//! Label-only baselines on a dense linear target.

use ordreg::baselines::{fit_knn, fit_lasso, fit_linear_svr, fit_ols, SvrParams};
use ordreg::mse;
use ordreg::oracle::LabelOracle;
use ordreg::synthetic::{gen_linear, LinearSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ordreg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut data = gen_linear(&LinearSpec { d: 10, ..LinearSpec::default() }, 200, 1000, &mut rng)?;
    let ys = (0..200).map(|i| data.labels.label(i)).collect::<ordreg::Result<Vec<_>>>()?;
    let train = data.train.with_all_labels(&ys)?;
    let eval = |f: &dyn Fn(&[f64]) -> ordreg::Result<f64>| -> ordreg::Result<f64> {
        let pred = data.test.rows().map(f).collect::<ordreg::Result<Vec<_>>>()?;
        mse(&pred, &data.test_truth)
    };
    let knn = fit_knn(&train, 5)?;
    let ols = fit_ols(&train)?;
    let lasso = fit_lasso(&train, 0.05)?;
    let svr = fit_linear_svr(&train, SvrParams { c: 100.0, epochs: 200, ..SvrParams::default() }, &mut rng)?;
    println!("5-NN  {:.4}", eval(&|x| knn.predict(x))?);
    println!("OLS   {:.4}", eval(&|x| ols.model.predict(x))?);
    println!("LASSO {:.4} ({} sweeps)", eval(&|x| lasso.model.predict(x))?, lasso.sweeps);
    println!("SVR   {:.4}", eval(&|x| svr.predict(x))?);
    Ok(())
}
