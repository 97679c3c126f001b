//! Generate a dataset, write it as CSV and read it back; same for rankings and comparisons.

use ordreg::io::{read_comparisons, read_dataset, read_ranking, write_comparisons, write_dataset, write_ranking};
use ordreg::oracle::{sample_pairs, simulate_comparisons, ComparisonOracleConfig};
use ordreg::ranking_from_values;
use ordreg::synthetic::{gen_nonparametric, NonparamSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ordreg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let data = gen_nonparametric(&NonparamSpec { d: 4, p: Some(3.0), ..NonparamSpec::default() }, 5, 2, &mut rng)?;

    let mut csv = Vec::new();
    write_dataset(&mut csv, &data.train, Some(&data.train_truth))?;
    print!("{}", String::from_utf8_lossy(&csv));
    let back = read_dataset(csv.as_slice())?;
    assert_eq!(back.samples, data.train);

    let ranking = ranking_from_values(&data.train_truth)?;
    let mut text = Vec::new();
    write_ranking(&mut text, &ranking)?;
    assert_eq!(read_ranking(text.as_slice())?, ranking);

    let pairs = sample_pairs(5, 6, &mut rng)?;
    let comps = simulate_comparisons(&data.train_truth, &pairs, &ComparisonOracleConfig::noiseless(), &mut rng)?;
    let mut text = Vec::new();
    write_comparisons(&mut text, &comps)?;
    print!("\n{}", String::from_utf8_lossy(&text));
    assert_eq!(read_comparisons(text.as_slice(), 5)?, comps);
    Ok(())
}
