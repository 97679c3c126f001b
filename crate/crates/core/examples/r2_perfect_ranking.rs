//! R² with a perfect ranking against k-NN on the same noisy labels.

use ordreg::baselines::fit_knn;
use ordreg::r2::{fit_r2, R2Config};
use ordreg::synthetic::{gen_nonparametric, NonparamSpec};
use ordreg::{mse, ranking_from_values};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ordreg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data = gen_nonparametric(&NonparamSpec::default(), 1000, 1000, &mut rng)?;
    let ranking = ranking_from_values(&data.train_truth)?;
    for m in [25, 50, 100, 200, 400] {
        let labeled: Vec<(usize, f64)> = (0..m).map(|i| (i, data.train.label(i).unwrap())).collect();
        let r2 = fit_r2(&data.train, &labeled, &ranking, &R2Config::with_k(5))?;
        let idx: Vec<usize> = (0..m).collect();
        let knn = fit_knn(&data.train.subset(&idx)?, 5)?;
        let eval = |pred: Vec<f64>| mse(&pred, &data.test_truth);
        let e_r2 = eval(data.test.rows().map(|x| r2.predict(x)).collect::<ordreg::Result<_>>()?)?;
        let e_knn = eval(data.test.rows().map(|x| knn.predict(x)).collect::<ordreg::Result<_>>()?)?;
        println!("m = {m:>3}: R² 5-NN {e_r2:.4}   5-NN {e_knn:.4}");
    }
    Ok(())
}
