//! A small deterministic CNN engine: NHWC `f64` tensors, hand-written
//! forward/backward passes per layer, MSE dual-regression loss and Adam.

mod adam;
pub mod gradcheck;
pub mod init;
pub mod layers;
mod loss;
mod tensor;

pub use adam::{Adam, AdamConfig};
pub use layers::{Layer, LayerSpec, Mode, Param};
pub use loss::mse_dual_loss;
pub use tensor::Tensor;
