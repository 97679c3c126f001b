//! Turning pairwise comparisons into a ranking: Borda, k-NN Borda and kernel rankSVM.

use ordreg::aggregate::{Aggregator, RankAggregator, RankSvmParams};
use ordreg::oracle::{sample_pairs, simulate_comparisons, ComparisonOracleConfig};
use ordreg::synthetic::{gen_nonparametric, NonparamSpec};
use ordreg::{kendall_tau, ranking_from_values};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ordreg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data = gen_nonparametric(&NonparamSpec::default(), 300, 1, &mut rng)?;
    let truth = ranking_from_values(&data.train_truth)?;
    let oracle = ComparisonOracleConfig::Flip { lambda: 0.4 };
    for count in [1000, 3000, 10000] {
        let pairs = sample_pairs(300, count, &mut rng)?;
        let comps = simulate_comparisons(&data.train_truth, &pairs, &oracle, &mut rng)?;
        print!("{count:>5} comparisons:");
        for (name, agg) in [
            ("borda", Aggregator::Borda),
            ("knn-borda", Aggregator::KnnBorda { k: 5 }),
            ("ranksvm", Aggregator::RankSvm(RankSvmParams::default())),
        ] {
            let ranking = agg.aggregate(&data.train, &comps, &mut rng)?;
            print!("  {name} nu={:.4}", kendall_tau(&ranking, &truth)?.nu);
        }
        println!();
    }
    Ok(())
}
