//! Choosing between R² and plain k-NN on held-out labels when the ranking may be bad.

use ordreg::r2::{cv_select, split_labeled, Candidate, R2Config};
use ordreg::synthetic::{gen_nonparametric, NonparamSpec};
use ordreg::{ranking_from_values, SampleSet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> ordreg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let data = gen_nonparametric(&NonparamSpec::default(), 1000, 1, &mut rng)?;
    let labeled: Vec<(usize, f64)> = (0..100).map(|i| (i, data.train.label(i).unwrap())).collect();
    let (train, held) = split_labeled(&labeled, 0.5, &mut rng)?;
    let mut mask = vec![None; 1000];
    for &(i, y) in &train {
        mask[i] = Some(y);
    }
    let universe = SampleSet::new(data.train.features().to_vec(), 8)?.with_labels(mask)?;
    let rows: Vec<usize> = held.iter().map(|h| h.0).collect();
    let ys: Vec<f64> = held.iter().map(|h| h.1).collect();
    let validation = data.train.subset(&rows)?.with_all_labels(&ys)?;
    let candidates = [Candidate::R2 { k: 5 }, Candidate::Knn { k: 5 }];
    for sigma in [0.0f64, 1.0, 5.0] {
        let noise = Normal::new(0.0, sigma.max(1e-12)).unwrap();
        let noisy: Vec<f64> = data.train_truth.iter().map(|f| f + noise.sample(&mut rng)).collect();
        let sel = cv_select(&universe, &ranking_from_values(&noisy)?, &validation, &candidates, &R2Config::default())?;
        println!("ranking noise {sigma}: picked {:?} (validation MSE {:?})", sel.candidate, sel.validation_mse);
    }
    Ok(())
}
