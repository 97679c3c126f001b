//! Brute-force Euclidean neighbor search with lower-index tie-breaking.

use std::cmp::Ordering;

use crate::data::SampleSet;

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` rows nearest to `query`, nearest first.
///
/// Distance ties go to the lower row index. `k` is capped at the number of rows.
pub fn k_nearest(rows: &SampleSet, query: &[f64], k: usize) -> Vec<usize> {
    let mut cand: Vec<(f64, usize)> = rows
        .rows()
        .enumerate()
        .map(|(i, r)| (squared_distance(r, query), i))
        .collect();
    let k = k.min(cand.len());
    if k == 0 {
        return Vec::new();
    }
    let cmp = |a: &(f64, usize), b: &(f64, usize)| -> Ordering {
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
    };
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, cmp);
        cand.truncate(k);
    }
    cand.sort_unstable_by(cmp);
    cand.into_iter().map(|(_, i)| i).collect()
}

/// Mean of `values` over the `k` nearest rows.
pub fn knn_mean(rows: &SampleSet, values: &[f64], query: &[f64], k: usize) -> f64 {
    let idx = k_nearest(rows, query, k);
    idx.iter().map(|&i| values[i]).sum::<f64>() / idx.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_break_by_index() {
        let rows = SampleSet::from_rows(&[vec![1.0], vec![-1.0], vec![1.0], vec![0.0]]).unwrap();
        assert_eq!(k_nearest(&rows, &[0.0], 1), vec![3]);
        assert_eq!(k_nearest(&rows, &[0.0], 3), vec![3, 0, 1]);
        assert_eq!(k_nearest(&rows, &[0.0], 10).len(), 4);
    }
}
