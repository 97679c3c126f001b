use ordreg::aggregate::{Aggregator, RankAggregator};
use ordreg::checks::isotonic_by_partitions;
use ordreg::clr::{fit_clr, ClrConfig, DirectionMode};
use ordreg::oracle::{sample_pairs, simulate_comparisons, ComparisonOracleConfig, Counted};
use ordreg::r2::{cv_select, fit_r2, Candidate, R2Config};
use ordreg::synthetic::{gen_linear, gen_nonparametric, LinearSpec, NonparamSpec};
use ordreg::{kendall_tau, mse, ranking_from_values, Ranking, SampleSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Imputation computed the slow way: each sample takes the denoised value of the labeled
/// sample with the highest rank position not above its own, or 0 if there is none.
fn brute_imputation(ranking: &Ranking, labeled: &[(usize, f64)]) -> Vec<f64> {
    let pos = ranking.positions();
    let mut anchors: Vec<(usize, f64)> = labeled.iter().map(|&(i, y)| (pos[i], y)).collect();
    anchors.sort_by_key(|a| a.0);
    let ys: Vec<f64> = anchors.iter().map(|a| a.1).collect();
    let fit = isotonic_by_partitions(&ys);
    (0..pos.len())
        .map(|i| anchors.iter().zip(&fit).rev().find(|(a, _)| a.0 <= pos[i]).map_or(0.0, |(_, &v)| v))
        .collect()
}

proptest! {
    #[test]
    fn r2_imputation_matches_brute_force(
        order in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle(),
        picks in prop::sample::subsequence((0..12usize).collect::<Vec<_>>(), 1..=5),
        ys in prop::collection::vec(-3.0f64..3.0, 5),
    ) {
        let universe = SampleSet::new((0..12).map(|i| i as f64).collect(), 1).unwrap();
        let ranking = Ranking::new(order).unwrap();
        let labeled: Vec<(usize, f64)> = picks.iter().zip(&ys).map(|(&i, &y)| (i, y)).collect();
        let model = fit_r2(&universe, &labeled, &ranking, &R2Config::with_k(1)).unwrap();
        let expected = brute_imputation(&ranking, &labeled);
        for (a, b) in model.imputed().iter().zip(&expected) {
            prop_assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", model.imputed(), expected);
        }
        // 1-NN on a training point returns its own imputed value.
        for i in 0..12 {
            prop_assert!((model.predict(&[i as f64]).unwrap() - expected[i]).abs() < 1e-9);
        }
    }
}

#[test]
fn r2_on_a_hand_example() {
    // Values increase with the index; labels at 1 (2.0), 3 (1.0), 4 (5.0).
    let universe = SampleSet::new(vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 1).unwrap();
    let ranking = Ranking::identity(6);
    let model = fit_r2(&universe, &[(1, 2.0), (3, 1.0), (4, 5.0)], &ranking, &R2Config::with_k(1)).unwrap();
    assert_eq!(model.imputed(), &[0.0, 1.5, 1.5, 1.5, 5.0, 5.0]);
    assert_eq!(model.star_mask(), &[true, false, false, false, false, false]);
}

#[test]
fn borda_ranking_from_complete_comparisons_reproduces_truth_fit() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let data = gen_nonparametric(&NonparamSpec::default(), 40, 50, &mut rng).unwrap();
    let pairs = sample_pairs(40, 40 * 39 / 2, &mut rng).unwrap();
    let comps = simulate_comparisons(&data.train_truth, &pairs, &ComparisonOracleConfig::noiseless(), &mut rng).unwrap();
    let truth_rank = ranking_from_values(&data.train_truth).unwrap();
    let borda = Aggregator::Borda.aggregate(&data.train, &comps, &mut rng).unwrap();
    assert_eq!(kendall_tau(&borda, &truth_rank).unwrap().discordant_ordered, 0);
    let labeled: Vec<(usize, f64)> = (0..40).step_by(4).map(|i| (i, data.train.label(i).unwrap())).collect();
    let cfg = R2Config::with_k(5);
    let a = fit_r2(&data.train, &labeled, &borda, &cfg).unwrap();
    let b = fit_r2(&data.train, &labeled, &truth_rank, &cfg).unwrap();
    assert_eq!(a.imputed(), b.imputed());
}

#[test]
fn cv_select_prefers_r2_with_a_perfect_ranking() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data = gen_nonparametric(&NonparamSpec::default(), 500, 300, &mut rng).unwrap();
    let labels: Vec<Option<f64>> = (0..500).map(|i| if i < 60 { data.train.label(i) } else { None }).collect();
    let universe = SampleSet::new(data.train.features().to_vec(), 8).unwrap().with_labels(labels).unwrap();
    let validation = data.test.clone().with_all_labels(&data.test_truth).unwrap();
    let ranking = ranking_from_values(&data.train_truth).unwrap();
    let cands = [Candidate::Knn { k: 5 }, Candidate::R2 { k: 5 }];
    let sel = cv_select(&universe, &ranking, &validation, &cands, &R2Config::default()).unwrap();
    assert_eq!(sel.candidate, Candidate::R2 { k: 5 });
    assert!(sel.validation_mse[1] < sel.validation_mse[0]);
}

#[test]
fn clr_recovers_a_noiseless_linear_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let spec = LinearSpec { d: 5, label_sigma: 0.0, comparison_sigma: 0.0 };
    let data = gen_linear(&spec, 4002, 500, &mut rng).unwrap();
    for mode in [DirectionMode::Passive, DirectionMode::Active] {
        let mut comps = Counted::new(data.comparisons.clone());
        let mut labels = Counted::new(data.labels.clone());
        let cfg = ClrConfig::new(1000, 20, mode);
        let (model, report) = fit_clr(&data.train, &mut comps, &mut labels, &cfg, &mut rng).unwrap();
        assert_eq!((comps.used(), labels.used(), report.labels_used()), (1000, 20, 20), "{mode:?}");
        let preds: Vec<f64> = data.test.rows().map(|x| model.predict(x).unwrap()).collect();
        let err = mse(&preds, &data.test_truth).unwrap();
        let var = data.test_truth.iter().map(|v| v * v).sum::<f64>() / 500.0;
        assert!(err < 0.01 * var, "{mode:?}: mse {err} vs signal {var}");
    }
}
