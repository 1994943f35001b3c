//! Weight initializers.

use rand::Rng as _;

use super::Tensor;
use crate::seed::Rng;

/// Uniform in `[-sqrt(6 / fan_in), sqrt(6 / fan_in)]`.
pub fn he_uniform(shape: &[usize], fan_in: usize, rng: &mut Rng) -> Tensor {
    uniform(shape, (6.0 / fan_in as f64).sqrt(), rng)
}

/// Uniform in `[-sqrt(6 / (fan_in + fan_out)), +...]`.
pub fn glorot_uniform(shape: &[usize], fan_in: usize, fan_out: usize, rng: &mut Rng) -> Tensor {
    uniform(shape, (6.0 / (fan_in + fan_out) as f64).sqrt(), rng)
}

fn uniform(shape: &[usize], limit: f64, rng: &mut Rng) -> Tensor {
    Tensor::from_fn(shape, |_| limit * (2.0 * rng.gen::<f64>() - 1.0))
}
