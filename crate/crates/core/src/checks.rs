//! Quick self-checks of the library's invariants, each against an independent oracle.
//! Backs the `check` command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::aggregate::{borda_scores, scores_to_ranking};
use crate::bench::allocate_budget;
use crate::clr::estimate_scale;
use crate::data::{kendall_tau, ranking_from_values, Comparison, ComparisonSet, Ranking};
use crate::isotonic::fit_bounded_isotonic;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Exact isotonic fit by enumerating every split of `y` into contiguous blocks and keeping
/// the cheapest split whose block means do not decrease.
pub fn isotonic_by_partitions(y: &[f64]) -> Vec<f64> {
    let m = y.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (m - 1)) {
        let mut fit = Vec::with_capacity(m);
        let mut start = 0;
        let mut ok = true;
        let mut last = f64::NEG_INFINITY;
        for end in 1..=m {
            if end == m || mask & (1 << (end - 1)) != 0 {
                let mean = y[start..end].iter().sum::<f64>() / (end - start) as f64;
                if mean < last {
                    ok = false;
                    break;
                }
                last = mean;
                fit.extend(std::iter::repeat_n(mean, end - start));
                start = end;
            }
        }
        if !ok {
            continue;
        }
        let sse: f64 = fit.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|b| sse < b.0 - 1e-12) {
            best = Some((sse, fit));
        }
    }
    best.expect("the single-block split is always feasible").1
}

/// Left side of the ranking-error bound: `Σ_i (f at true position i − f at estimated position i)²`.
pub fn rank_value_error(values: &[f64], truth: &Ranking, estimate: &Ranking) -> f64 {
    truth.order().iter().zip(estimate.order()).map(|(&a, &b)| (values[a] - values[b]).powi(2)).sum()
}

/// `8 M² √(2ν) n`.
pub fn rank_value_bound(m_bound: f64, nu: f64, n: usize) -> f64 {
    8.0 * m_bound * m_bound * (2.0 * nu).sqrt() * n as f64
}

fn outcome(name: &'static str, failures: usize, total: usize) -> CheckOutcome {
    CheckOutcome { name, passed: failures == 0, detail: format!("{failures} failures in {total} cases") }
}

fn check_pava(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut failures = 0;
    let total = 2000;
    for _ in 0..total {
        let m = rng.random_range(1..=5);
        let y: Vec<f64> = (0..m).map(|_| f64::from(rng.random_range(-4i32..=4)) * 0.5).collect();
        let fit = fit_bounded_isotonic(&y, 100.0).expect("valid input");
        let exact = isotonic_by_partitions(&y);
        if fit.fitted.iter().zip(&exact).any(|(a, b)| (a - b).abs() > 1e-9) {
            failures += 1;
        }
    }
    outcome("isotonic fit equals the block-partition oracle (m <= 5)", failures, total)
}

fn check_borda(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut failures = 0;
    let total = 500;
    for _ in 0..total {
        let n = rng.random_range(2..=6);
        let mut values: Vec<f64> = (0..n).map(|i| i as f64).collect();
        values.shuffle(rng);
        let mut items = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = if rng.random::<bool>() { (i, j) } else { (j, i) };
                items.push(Comparison { i: a, j: b, z: if values[a] > values[b] { 1 } else { -1 } });
            }
        }
        let set = ComparisonSet::new(items, n).expect("valid tournament");
        let got = scores_to_ranking(&borda_scores(&set, n).expect("scores")).expect("ranking");
        if got != ranking_from_values(&values).expect("finite") {
            failures += 1;
        }
    }
    outcome("Borda recovers complete noiseless tournaments (n <= 6)", failures, total)
}

fn check_scale(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut failures = 0;
    let total = 500;
    for _ in 0..total {
        let d = rng.random_range(1..=6);
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = rng.random_range(-10.0..10.0);
        let xs: Vec<Vec<f64>> = (0..rng.random_range(1..20)).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let labeled: Vec<(&[f64], f64)> =
            xs.iter().map(|x| (x.as_slice(), c * x.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>())).collect();
        match estimate_scale(&v, &labeled) {
            Ok(r) if (r - c).abs() <= 1e-9 * c.abs().max(1.0) => {}
            _ => failures += 1,
        }
    }
    outcome("scale estimate returns c on labels c<v,x>", failures, total)
}

fn check_rank_bound(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut failures = 0;
    let mut total = 0;
    let m_bound = 1.0;
    for n in 2..=5usize {
        for _ in 0..20 {
            let values: Vec<f64> = (0..n).map(|_| rng.random_range(-m_bound..=m_bound)).collect();
            let truth = ranking_from_values(&values).expect("finite");
            for_each_permutation(n, |perm| {
                let est = Ranking::new(perm.to_vec()).expect("permutation");
                let nu = kendall_tau(&truth, &est).expect("same size").nu;
                total += 1;
                if rank_value_error(&values, &truth, &est) > rank_value_bound(m_bound, nu, n) + 1e-12 {
                    failures += 1;
                }
            });
        }
    }
    outcome("ranking-error value bound over all permutations (n <= 5)", failures, total)
}

fn check_kendall(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut failures = 0;
    let total = 300;
    for _ in 0..total {
        let n = rng.random_range(1..=30);
        let mut a: Vec<usize> = (0..n).collect();
        let mut b = a.clone();
        a.shuffle(rng);
        b.shuffle(rng);
        let (ra, rb) = (Ranking::new(a).expect("perm"), Ranking::new(b).expect("perm"));
        let ab = kendall_tau(&ra, &rb).expect("same size");
        let ba = kendall_tau(&rb, &ra).expect("same size");
        let aa = kendall_tau(&ra, &ra).expect("same size");
        let pa = ra.positions();
        let pb = rb.positions();
        let mut brute = 0u64;
        for i in 0..n {
            for j in 0..n {
                if (pa[i] as i64 - pa[j] as i64) * (pb[i] as i64 - pb[j] as i64) < 0 {
                    brute += 1;
                }
            }
        }
        if ab != ba || aa.discordant_ordered != 0 || ab.discordant_ordered != brute {
            failures += 1;
        }
    }
    outcome("Kendall-Tau is symmetric, zero on itself and matches pair counting", failures, total)
}

fn check_budget() -> CheckOutcome {
    let ok = allocate_budget(5.0, 2500.0, 100).map(|p| p.n).ok() == Some(2000)
        && allocate_budget(1.0, 500.0, 500).map(|p| p.n).ok() == Some(0)
        && allocate_budget(10.0, 500.0, 100).is_err();
    CheckOutcome { name: "budget allocation gives n = C - c*m", passed: ok, detail: "3 cases".into() }
}

/// Heap's algorithm over `0..n`.
pub fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut f: F) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Run every check with the given seed.
pub fn run_checks(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        check_pava(&mut rng),
        check_borda(&mut rng),
        check_scale(&mut rng),
        check_rank_bound(&mut rng),
        check_kendall(&mut rng),
        check_budget(),
    ]
}
