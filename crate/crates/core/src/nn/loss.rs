use super::Tensor;
use crate::error::{Error, Result};

/// Mean squared error over every element of a `[batch, 2]` prediction, and
/// its gradient `2 (pred - target) / (batch * 2)`.
pub fn mse_dual_loss(pred: &Tensor, target: &Tensor) -> Result<(f64, Tensor)> {
    if pred.shape() != target.shape() {
        return Err(Error::shape("mse loss", pred.shape(), target.shape()));
    }
    let (n, k) = pred.dims2()?;
    if n == 0 {
        return Err(Error::InvalidArgument("mse loss on an empty batch".into()));
    }
    let count = (n * k) as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(pred.len());
    for (p, t) in pred.data().iter().zip(target.data()) {
        let d = p - t;
        loss += d * d;
        grad.push(2.0 * d / count);
    }
    Ok((loss / count, Tensor::new(pred.shape().to_vec(), grad)?))
}
