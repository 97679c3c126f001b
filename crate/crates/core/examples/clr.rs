//! Comparison-based linear regression, passive and active, against OLS on the same labels.

use ordreg::baselines::fit_ols;
use ordreg::clr::{angle, fit_clr, ClrConfig, DirectionMode};
use ordreg::mse;
use ordreg::oracle::{Counted, LabelOracle};
use ordreg::synthetic::{gen_linear, LinearSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ordreg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let spec = LinearSpec { d: 20, ..LinearSpec::default() };
    let data = gen_linear(&spec, 40_002, 1000, &mut rng)?;
    let (m, n) = (30, 2000);
    for mode in [DirectionMode::Passive, DirectionMode::Active] {
        let mut comps = Counted::new(data.comparisons.clone());
        let mut labels = Counted::new(data.labels.clone());
        let (model, _) = fit_clr(&data.train, &mut comps, &mut labels, &ClrConfig::new(n, m, mode), &mut rng)?;
        let pred: Vec<f64> = data.test.rows().map(|x| model.predict(x)).collect::<ordreg::Result<_>>()?;
        println!(
            "{mode:?}: angle {:.4}, scale {:.3} (true {:.3}), test MSE {:.4}, {} comparisons, {} labels",
            angle(&model.direction, &data.w_star),
            model.scale,
            data.w_star.iter().map(|w| w * w).sum::<f64>().sqrt(),
            mse(&pred, &data.test_truth)?,
            comps.used(),
            labels.used()
        );
    }
    let mut labels = data.labels.clone();
    let idx: Vec<usize> = (0..m).collect();
    let ys = idx.iter().map(|&i| labels.label(i)).collect::<ordreg::Result<Vec<_>>>()?;
    let ols = fit_ols(&data.train.subset(&idx)?.with_all_labels(&ys)?)?;
    let pred: Vec<f64> = data.test.rows().map(|x| ols.model.predict(x)).collect::<ordreg::Result<_>>()?;
    println!("OLS on the same {m} labels: test MSE {:.4}", mse(&pred, &data.test_truth)?);
    Ok(())
}
