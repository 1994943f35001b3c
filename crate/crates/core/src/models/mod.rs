//! Architecture builders for the three regression networks and the
//! trainable `Network` built from them.
//!
//! * `M1`: VGG-style, six blocks of two 3×3 convolutions with
//!   16, 32, 64, 128, 256, 512 filters, each block closed by a 2×2 max pool,
//!   then FC-6144, FC-6144.
//! * `M2`: same skeleton with 64, 128, 256, 512, 512, 512 filters and
//!   FC-6144, FC-6144, FC-2000.
//! * `M3`: MobileNet-style, a strided 3×3 convolution followed by thirteen
//!   depthwise/pointwise pairs and global average pooling.
//!
//! Every convolution is followed by batch norm and ReLU, every hidden dense
//! layer by ReLU, and all three end in a linear two-unit head.

mod checkpoint;
mod network;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use network::Network;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::augment::InputSize;
use crate::error::{Error, Result};
use crate::nn::LayerSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelId {
    M1,
    M2,
    M3,
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "M1" => Ok(ModelId::M1),
            "M2" => Ok(ModelId::M2),
            "M3" => Ok(ModelId::M3),
            _ => Err(Error::InvalidArgument(format!("unknown model id {s:?} (expected M1, M2 or M3)"))),
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelId::M1 => "M1",
            ModelId::M2 => "M2",
            ModelId::M3 => "M3",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub id: ModelId,
    pub input: InputSize,
    /// MobileNet width multiplier ω, applied to M3's pointwise widths.
    pub width_multiplier: f64,
    /// Uniform shrink of every channel and unit count, for small runs.
    pub channel_scale: f64,
}

impl ModelConfig {
    pub fn full(id: ModelId) -> Self {
        Self {
            id,
            input: InputSize::FULL,
            width_multiplier: 1.0,
            channel_scale: 1.0,
        }
    }

    /// 24×64 input with 1/16 channels.
    pub fn desk(id: ModelId) -> Self {
        Self {
            id,
            input: InputSize::DESK,
            width_multiplier: 1.0,
            channel_scale: 1.0 / 16.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v > 0.0 && v <= 1.0;
        if !unit(self.width_multiplier) {
            return Err(Error::InvalidArgument(format!(
                "width multiplier must lie in (0, 1], got {}",
                self.width_multiplier
            )));
        }
        if !unit(self.channel_scale) {
            return Err(Error::InvalidArgument(format!(
                "channel scale must lie in (0, 1], got {}",
                self.channel_scale
            )));
        }
        if self.input.height == 0 || self.input.width == 0 {
            return Err(Error::InvalidArgument("input size must be non-zero".into()));
        }
        Ok(())
    }
}

/// `ceil(count * factor)`, at least 1. A tiny tolerance keeps exact products
/// such as `6144 / 16` from rounding up through representation error.
pub fn scaled(count: usize, factor: f64) -> usize {
    ((count as f64 * factor - 1e-9).ceil() as usize).max(1)
}

const M1_WIDTHS: [usize; 6] = [16, 32, 64, 128, 256, 512];
const M2_WIDTHS: [usize; 6] = [64, 128, 256, 512, 512, 512];
const M1_DENSE: [usize; 2] = [6144, 6144];
const M2_DENSE: [usize; 3] = [6144, 6144, 2000];
/// (depthwise stride, pointwise filters) for each MobileNet block.
const M3_BLOCKS: [(usize, usize); 13] = [
    (1, 64),
    (2, 128),
    (1, 128),
    (2, 256),
    (1, 256),
    (2, 512),
    (1, 512),
    (1, 512),
    (1, 512),
    (1, 512),
    (1, 512),
    (2, 1024),
    (1, 1024),
];
const M3_STEM: usize = 32;

/// Layer list plus the inferred shape after every layer. No parameters are
/// allocated, so full-scale architectures are cheap to inspect.
#[derive(Debug, Clone, PartialEq)]
pub struct Architecture {
    pub config: ModelConfig,
    pub layers: Vec<LayerSpec>,
    /// `shapes[0]` is the input; `shapes[i + 1]` is the output of `layers[i]`.
    pub shapes: Vec<Vec<usize>>,
}

pub fn build_architecture(config: &ModelConfig) -> Result<Architecture> {
    config.validate()?;
    let s = config.channel_scale;
    let mut layers = Vec::new();
    let conv_bn_relu = |layers: &mut Vec<LayerSpec>, spec: LayerSpec| {
        layers.push(spec);
        layers.push(LayerSpec::batch_norm());
        layers.push(LayerSpec::Relu);
    };
    match config.id {
        ModelId::M1 | ModelId::M2 => {
            let (widths, dense): (&[usize], &[usize]) = if config.id == ModelId::M1 {
                (&M1_WIDTHS, &M1_DENSE)
            } else {
                (&M2_WIDTHS, &M2_DENSE)
            };
            for &c in widths {
                for _ in 0..2 {
                    conv_bn_relu(
                        &mut layers,
                        LayerSpec::Conv2d {
                            out_channels: scaled(c, s),
                            stride: 1,
                        },
                    );
                }
                layers.push(LayerSpec::MaxPool2);
            }
            layers.push(LayerSpec::Flatten);
            for &u in dense {
                layers.push(LayerSpec::Dense { units: scaled(u, s) });
                layers.push(LayerSpec::Relu);
            }
        }
        ModelId::M3 => {
            conv_bn_relu(
                &mut layers,
                LayerSpec::Conv2d {
                    out_channels: scaled(M3_STEM, s),
                    stride: 2,
                },
            );
            for (stride, c) in M3_BLOCKS {
                conv_bn_relu(&mut layers, LayerSpec::DepthwiseConv2d { stride });
                conv_bn_relu(
                    &mut layers,
                    LayerSpec::PointwiseConv {
                        out_channels: scaled(c, s * config.width_multiplier),
                    },
                );
            }
            layers.push(LayerSpec::GlobalAvgPool);
        }
    }
    layers.push(LayerSpec::OutputHead);
    Architecture::from_layers(*config, layers)
}

impl Architecture {
    /// Infers shapes for an arbitrary layer list on `config.input`. Used for
    /// probe networks; `config.id` is only carried along.
    pub fn from_layers(config: ModelConfig, layers: Vec<LayerSpec>) -> Result<Self> {
        let mut shapes = vec![vec![config.input.height, config.input.width, 3]];
        for spec in &layers {
            let next = spec.output_shape(shapes.last().expect("non-empty"))?;
            if next.contains(&0) {
                return Err(Error::InvalidArgument(format!(
                    "input {}x{} collapses to an empty map at {}",
                    config.input.height,
                    config.input.width,
                    spec.name()
                )));
            }
            shapes.push(next);
        }
        Ok(Architecture { config, layers, shapes })
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .zip(&self.shapes)
            .map(|(l, s)| l.param_count(s).expect("validated at build time"))
            .sum()
    }

    /// Convolution and dense layers, not counting the output head.
    pub fn weighted_layers(&self) -> usize {
        self.layers.iter().filter(|l| l.is_weighted()).count().saturating_sub(1)
    }

    /// Output channels of every convolution, in order.
    pub fn conv_channels(&self) -> Vec<usize> {
        self.layers
            .iter()
            .zip(&self.shapes[1..])
            .filter(|(l, _)| matches!(l, LayerSpec::Conv2d { .. } | LayerSpec::PointwiseConv { .. }))
            .map(|(_, s)| s[2])
            .collect()
    }

    /// Spatial `(height, width)` after each max pool.
    pub fn pool_ladder(&self) -> Vec<(usize, usize)> {
        self.layers
            .iter()
            .zip(&self.shapes[1..])
            .filter(|(l, _)| matches!(l, LayerSpec::MaxPool2))
            .map(|(_, s)| (s[0], s[1]))
            .collect()
    }

    pub fn shape_table(&self) -> String {
        let cfg = &self.config;
        let mut out = String::new();
        writeln!(
            out,
            "model {} input {}x{}x3 width_multiplier {} channel_scale {}",
            cfg.id, cfg.input.height, cfg.input.width, cfg.width_multiplier, cfg.channel_scale
        )
        .unwrap();
        writeln!(out, "{:>3}  {:<18} {:<18} {:>12}", "#", "layer", "output", "params").unwrap();
        for (i, (l, s)) in self.layers.iter().zip(&self.shapes).enumerate() {
            let shape = self.shapes[i + 1]
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("x");
            let params = l.param_count(s).unwrap_or(0);
            writeln!(out, "{:>3}  {:<18} {:<18} {:>12}", i, l.name(), shape, params).unwrap();
        }
        writeln!(out, "weighted layers (excluding head): {}", self.weighted_layers()).unwrap();
        writeln!(out, "total parameters: {}", self.param_count()).unwrap();
        out
    }
}
