//! Bounded isotonic regression on a noisy increasing sequence.

use ordreg::isotonic::{fit_bounded_isotonic, pava_blocks};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> ordreg::Result<()> {
    let y = [0.3, -0.2, 0.4, 1.1, 0.9, 0.8, 2.5, 1.7];
    for b in pava_blocks(&y) {
        println!("positions {}..{} pooled at {:.3}", b.start, b.start + b.len, b.mean);
    }
    let boxed = fit_bounded_isotonic(&y, 1.0)?;
    println!("boxed to [-1, 1]: {:?}\n", boxed.fitted);

    let noise = Normal::new(0.0, 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for m in [100, 1000, 10000] {
        let f: Vec<f64> = (0..m).map(|i| 2.0 * i as f64 / m as f64 - 1.0).collect();
        let noisy: Vec<f64> = f.iter().map(|v| v + noise.sample(&mut rng)).collect();
        let fit = fit_bounded_isotonic(&noisy, 1.0)?;
        let risk = fit.fitted.iter().zip(&f).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / m as f64;
        println!("m = {m:>5}: per-point risk {risk:.5}");
    }
    Ok(())
}
