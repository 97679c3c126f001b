//! Box-constrained isotonic least squares.
//!
//! Pool-adjacent-violators gives the unconstrained monotone fit as a sequence of
//! blocks whose level is the block mean. Clamping every level into `[-M, M]` keeps the
//! sequence non-decreasing and is the exact minimizer of the boxed program.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct IsotonicFit {
    pub fitted: Vec<f64>,
    pub sse: f64,
}

/// A maximal run of pooled positions sharing one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub start: usize,
    pub len: usize,
    pub mean: f64,
}

/// Unweighted PAVA. Blocks are returned left to right with strictly increasing means.
pub fn pava_blocks(values: &[f64]) -> Vec<Block> {
    let mut blocks: Vec<Block> = Vec::with_capacity(values.len());
    let mut sums: Vec<f64> = Vec::with_capacity(values.len());
    for (k, &y) in values.iter().enumerate() {
        let mut cur = Block { start: k, len: 1, mean: y };
        let mut sum = y;
        while let Some(prev) = blocks.last() {
            if prev.mean < cur.mean {
                break;
            }
            let prev_sum = sums.pop().expect("sums tracks blocks");
            let prev = blocks.pop().expect("checked above");
            sum += prev_sum;
            cur = Block { start: prev.start, len: prev.len + cur.len, mean: 0.0 };
            cur.mean = sum / cur.len as f64;
        }
        blocks.push(cur);
        sums.push(sum);
    }
    blocks
}

/// Least-squares fit that is non-decreasing and bounded by `m_bound` in absolute value.
pub fn fit_bounded_isotonic(values: &[f64], m_bound: f64) -> Result<IsotonicFit> {
    if values.is_empty() {
        return Err(Error::Dimension("isotonic regression needs at least one value".into()));
    }
    if !(m_bound > 0.0) {
        return Err(Error::Parameter(format!("box bound must be positive, got {m_bound}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidValue("non-finite value in isotonic input".into()));
    }
    let mut fitted = Vec::with_capacity(values.len());
    for b in pava_blocks(values) {
        let level = b.mean.clamp(-m_bound, m_bound);
        fitted.extend(std::iter::repeat_n(level, b.len));
    }
    let sse = fitted.iter().zip(values).map(|(f, y)| (f - y) * (f - y)).sum();
    Ok(IsotonicFit { fitted, sse })
}
