//! Layer specifications and their trainable implementations.
//!
//! Every layer caches what it needs during `forward` and overwrites the
//! gradients of its parameters during `backward`.

mod conv;
mod dense;
mod norm;
mod pool;

pub use conv::{same_padding, Conv2d, DepthwiseConv2d};
pub use dense::Dense;
pub use norm::BatchNorm;
pub use pool::{pooled_extent, Flatten, GlobalAvgPool, MaxPool2, Relu};

use serde::{Deserialize, Serialize};

use super::init;
use super::Tensor;
use crate::error::{Error, Result};
use crate::seed::Rng;

pub const BN_MOMENTUM: f64 = 0.99;
pub const BN_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Infer,
}

/// A learnable array and the gradient from the last backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub value: Tensor,
    pub grad: Tensor,
}

impl Param {
    pub fn new(value: Tensor) -> Self {
        let grad = Tensor::zeros(value.shape());
        Self { value, grad }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LayerSpec {
    /// 3×3 convolution, "same" padding.
    Conv2d { out_channels: usize, stride: usize },
    /// 3×3 per-channel convolution, "same" padding.
    DepthwiseConv2d { stride: usize },
    /// 1×1 convolution, stride 1.
    PointwiseConv { out_channels: usize },
    BatchNorm { momentum: f64, epsilon: f64 },
    Relu,
    /// 2×2 window, stride 2.
    MaxPool2,
    GlobalAvgPool,
    /// Row-major ravel of an `[h, w, c]` map.
    Flatten,
    Dense { units: usize },
    /// Linear two-unit regression head (valence, arousal).
    OutputHead,
}

impl LayerSpec {
    pub fn batch_norm() -> Self {
        LayerSpec::BatchNorm {
            momentum: BN_MOMENTUM,
            epsilon: BN_EPSILON,
        }
    }

    /// Convolutions and dense layers; batch norm is not counted.
    pub fn is_weighted(&self) -> bool {
        matches!(
            self,
            LayerSpec::Conv2d { .. }
                | LayerSpec::DepthwiseConv2d { .. }
                | LayerSpec::PointwiseConv { .. }
                | LayerSpec::Dense { .. }
                | LayerSpec::OutputHead
        )
    }

    pub fn name(&self) -> String {
        match self {
            LayerSpec::Conv2d { out_channels, stride } => {
                format!("conv3-{out_channels}-s{stride}")
            }
            LayerSpec::DepthwiseConv2d { stride } => format!("dw-conv3-s{stride}"),
            LayerSpec::PointwiseConv { out_channels } => format!("conv1-{out_channels}-s1"),
            LayerSpec::BatchNorm { .. } => "batch-norm".into(),
            LayerSpec::Relu => "relu".into(),
            LayerSpec::MaxPool2 => "max-pool-2x2".into(),
            LayerSpec::GlobalAvgPool => "global-avg-pool".into(),
            LayerSpec::Flatten => "flatten".into(),
            LayerSpec::Dense { units } => format!("FC-{units}"),
            LayerSpec::OutputHead => "FC-2-linear".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match *self {
            LayerSpec::Conv2d { out_channels, stride } => {
                if out_channels == 0 || !(1..=2).contains(&stride) {
                    return bad(format!("invalid {}", self.name()));
                }
            }
            LayerSpec::DepthwiseConv2d { stride } if !(1..=2).contains(&stride) => {
                return bad(format!("invalid {}", self.name()));
            }
            LayerSpec::PointwiseConv { out_channels: 0 } | LayerSpec::Dense { units: 0 } => {
                return bad(format!("invalid {}", self.name()));
            }
            LayerSpec::BatchNorm { momentum, epsilon }
                if !((0.0..1.0).contains(&momentum) && epsilon > 0.0) =>
            {
                return bad("invalid batch-norm hyperparameters".into());
            }
            _ => {}
        }
        Ok(())
    }

    /// Output shape (without batch axis) for an input of shape `input`.
    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>> {
        self.validate()?;
        let map = || match *input {
            [h, w, c] => Ok((h, w, c)),
            _ => Err(Error::shape("spatial layer input", input, &[0, 0, 0])),
        };
        let vec = || match *input {
            [f] => Ok(f),
            _ => Err(Error::shape("dense layer input", input, &[0])),
        };
        Ok(match *self {
            LayerSpec::Conv2d { out_channels, stride } => {
                let (h, w, _) = map()?;
                vec![h.div_ceil(stride), w.div_ceil(stride), out_channels]
            }
            LayerSpec::DepthwiseConv2d { stride } => {
                let (h, w, c) = map()?;
                vec![h.div_ceil(stride), w.div_ceil(stride), c]
            }
            LayerSpec::PointwiseConv { out_channels } => {
                let (h, w, _) = map()?;
                vec![h, w, out_channels]
            }
            LayerSpec::BatchNorm { .. } | LayerSpec::Relu => input.to_vec(),
            LayerSpec::MaxPool2 => {
                let (h, w, c) = map()?;
                vec![pooled_extent(h), pooled_extent(w), c]
            }
            LayerSpec::GlobalAvgPool => vec![map()?.2],
            LayerSpec::Flatten => {
                let (h, w, c) = map()?;
                vec![h * w * c]
            }
            LayerSpec::Dense { units } => {
                vec()?;
                vec![units]
            }
            LayerSpec::OutputHead => {
                vec()?;
                vec![2]
            }
        })
    }

    /// Learnable scalar count for an input of shape `input`.
    pub fn param_count(&self, input: &[usize]) -> Result<usize> {
        let out = self.output_shape(input)?;
        let last = |s: &[usize]| *s.last().unwrap_or(&0);
        Ok(match self {
            LayerSpec::Conv2d { .. } => 9 * last(input) * last(&out) + last(&out),
            LayerSpec::DepthwiseConv2d { .. } => 9 * last(input) + last(input),
            LayerSpec::PointwiseConv { .. } => last(input) * last(&out) + last(&out),
            LayerSpec::BatchNorm { .. } => 2 * last(input),
            LayerSpec::Dense { .. } | LayerSpec::OutputHead => {
                last(input) * last(&out) + last(&out)
            }
            _ => 0,
        })
    }
}

/// A layer with its parameters and forward cache.
#[derive(Debug, Clone)]
pub enum Layer {
    Conv2d(Conv2d),
    Depthwise(DepthwiseConv2d),
    BatchNorm(BatchNorm),
    Relu(Relu),
    MaxPool2(MaxPool2),
    GlobalAvgPool(GlobalAvgPool),
    Flatten(Flatten),
    Dense(Dense),
}

macro_rules! dispatch {
    ($self:expr, $l:ident => $body:expr) => {
        match $self {
            Layer::Conv2d($l) => $body,
            Layer::Depthwise($l) => $body,
            Layer::BatchNorm($l) => $body,
            Layer::Relu($l) => $body,
            Layer::MaxPool2($l) => $body,
            Layer::GlobalAvgPool($l) => $body,
            Layer::Flatten($l) => $body,
            Layer::Dense($l) => $body,
        }
    };
}

impl Layer {
    /// Instantiates `spec` for inputs of shape `input` (no batch axis).
    pub fn init(spec: &LayerSpec, input: &[usize], rng: &mut Rng) -> Result<Layer> {
        let out = spec.output_shape(input)?;
        let in_c = *input.last().unwrap_or(&0);
        Ok(match *spec {
            LayerSpec::Conv2d { out_channels, stride } => {
                let w = init::he_uniform(&[3, 3, in_c, out_channels], 9 * in_c, rng);
                Layer::Conv2d(Conv2d::new(w, Tensor::zeros(&[out_channels]), stride)?)
            }
            LayerSpec::PointwiseConv { out_channels } => {
                let w = init::he_uniform(&[1, 1, in_c, out_channels], in_c, rng);
                Layer::Conv2d(Conv2d::new(w, Tensor::zeros(&[out_channels]), 1)?)
            }
            LayerSpec::DepthwiseConv2d { stride } => {
                let w = init::he_uniform(&[3, 3, in_c], 9, rng);
                Layer::Depthwise(DepthwiseConv2d::new(w, Tensor::zeros(&[in_c]), stride)?)
            }
            LayerSpec::BatchNorm { momentum, epsilon } => {
                Layer::BatchNorm(BatchNorm::new(in_c, momentum, epsilon))
            }
            LayerSpec::Relu => Layer::Relu(Relu::default()),
            LayerSpec::MaxPool2 => Layer::MaxPool2(MaxPool2::default()),
            LayerSpec::GlobalAvgPool => Layer::GlobalAvgPool(GlobalAvgPool::default()),
            LayerSpec::Flatten => Layer::Flatten(Flatten::default()),
            LayerSpec::Dense { units } => {
                let w = init::he_uniform(&[in_c, units], in_c, rng);
                Layer::Dense(Dense::new(w, Tensor::zeros(&[units]))?)
            }
            LayerSpec::OutputHead => {
                let w = init::glorot_uniform(&[in_c, out[0]], in_c, out[0], rng);
                Layer::Dense(Dense::new(w, Tensor::zeros(&[out[0]]))?)
            }
        })
    }

    pub fn forward(&mut self, x: &Tensor, mode: Mode) -> Result<Tensor> {
        dispatch!(self, l => l.forward(x, mode))
    }

    /// Returns the gradient with respect to the layer input.
    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        dispatch!(self, l => l.backward(grad))
    }

    pub fn params(&self) -> Vec<&Param> {
        match self {
            Layer::Conv2d(l) => vec![&l.weight, &l.bias],
            Layer::Depthwise(l) => vec![&l.weight, &l.bias],
            Layer::BatchNorm(l) => vec![&l.gamma, &l.beta],
            Layer::Dense(l) => vec![&l.weight, &l.bias],
            _ => vec![],
        }
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        match self {
            Layer::Conv2d(l) => vec![&mut l.weight, &mut l.bias],
            Layer::Depthwise(l) => vec![&mut l.weight, &mut l.bias],
            Layer::BatchNorm(l) => vec![&mut l.gamma, &mut l.beta],
            Layer::Dense(l) => vec![&mut l.weight, &mut l.bias],
            _ => vec![],
        }
    }

    /// Non-learnable state (batch-norm running statistics).
    pub fn buffers(&self) -> Vec<&Tensor> {
        match self {
            Layer::BatchNorm(l) => vec![&l.running_mean, &l.running_var],
            _ => vec![],
        }
    }

    pub fn buffers_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            Layer::BatchNorm(l) => vec![&mut l.running_mean, &mut l.running_var],
            _ => vec![],
        }
    }

    /// Hash of the branch taken by each piecewise-linear unit in the last
    /// forward pass (ReLU on/off, max-pool winner); `None` for smooth layers
    /// or before any forward pass. Two evaluations with equal fingerprints
    /// ran through the same linear piece.
    pub fn branch_fingerprint(&self) -> Option<u64> {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        match self {
            Layer::Relu(l) => l.mask()?.hash(&mut h),
            Layer::MaxPool2(l) => l.argmax()?.hash(&mut h),
            _ => return None,
        }
        Some(h.finish())
    }

    /// Drops cached activations.
    pub fn clear_cache(&mut self) {
        dispatch!(self, l => l.clear_cache())
    }
}

fn missing_cache(layer: &str) -> Error {
    Error::State(format!("{layer}: backward called before forward"))
}
