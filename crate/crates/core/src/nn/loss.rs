use crate::error::{contract, Result};
use crate::scalar::Real;

/// Mean squared error and its gradient `2 (pred - target) / N`.
pub fn mse_loss<T: Real>(pred: &[T], target: &[T]) -> Result<(T, Vec<T>)> {
    if pred.len() != target.len() {
        return Err(contract(format!(
            "mse: prediction has {} values, target {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.is_empty() {
        return Err(contract("mse of empty tensors"));
    }
    let n = T::lit(pred.len() as f64);
    let diff: Vec<T> = pred.iter().zip(target).map(|(p, t)| *p - *t).collect();
    let loss = diff.iter().map(|d| *d * *d).sum::<T>() / n;
    let two = T::lit(2.0);
    Ok((loss, diff.into_iter().map(|d| two * d / n).collect()))
}
