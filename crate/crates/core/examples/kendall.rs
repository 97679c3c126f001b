//! Rankings from values and the Kendall-Tau noise level of a perturbed ranking.

use ordreg::{kendall_tau, ranking_from_values};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> ordreg::Result<()> {
    let values = [0.3, 0.1, 0.2, 0.9, 0.5];
    let truth = ranking_from_values(&values)?;
    println!("order (smallest first): {:?}", truth.order());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
    let truth = ranking_from_values(&f)?;
    for sigma in [0.0, 0.01, 0.1, 0.5] {
        let noisy: Vec<f64> = if sigma > 0.0 {
            let noise = Normal::new(0.0, sigma).unwrap();
            f.iter().map(|v| v + noise.sample(&mut rng)).collect()
        } else {
            f.clone()
        };
        let report = kendall_tau(&truth, &ranking_from_values(&noisy)?)?;
        println!("sigma {sigma:<4}: {} discordant ordered pairs, nu = {:.4}", report.discordant_ordered, report.nu);
    }
    Ok(())
}
