//! Weighted isotonic regression by pool-adjacent-violators.

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
struct Block<T> {
    mean: T,
    weight: T,
    len: usize,
}

/// Non-decreasing least-squares fit of `values` under `weights`.
///
/// Minimises `Σ w_i (y_i - x_i)²` subject to `y_1 <= y_2 <= ... <= y_n`.
/// Weights must be strictly positive; with an exact scalar the result is exact.
pub fn isotonic_increasing<T: Scalar>(values: &[T], weights: &[T]) -> Vec<T> {
    assert_eq!(values.len(), weights.len(), "values and weights differ in length");
    let mut stack: Vec<Block<T>> = Vec::with_capacity(values.len());
    for (&y, &w) in values.iter().zip(weights) {
        debug_assert!(w > T::zero(), "weights must be positive");
        let mut block = Block { mean: y, weight: w, len: 1 };
        while let Some(top) = stack.last() {
            if top.mean < block.mean {
                break;
            }
            // top.mean >= block.mean: pool. Equal means pool too, which keeps
            // the block list strictly increasing.
            let top = stack.pop().unwrap();
            let weight = top.weight + block.weight;
            block = Block {
                mean: (top.mean * top.weight + block.mean * block.weight) / weight,
                weight,
                len: top.len + block.len,
            };
        }
        stack.push(block);
    }
    stack
        .into_iter()
        .flat_map(|b| std::iter::repeat(b.mean).take(b.len))
        .collect()
}
