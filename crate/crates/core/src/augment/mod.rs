//! Training-time augmentation, letterboxing and pixel normalization.
//!
//! Stage order is fixed: brightness, then one composed affine warp
//! (rotation, shear, translation), then the optional horizontal flip, then
//! letterbox to the model input size and scaling to [0, 1].

mod color;
mod config;
mod transform;

pub use color::{apply_brightness, hls_to_rgb, rgb_to_hls, scale_lightness};
pub use config::{AugmentConfig, Interval, TransformParams};
pub use transform::{
    apply_affine, apply_hflip, letterbox, letterbox_layout, normalize_pixels, sample_transform,
    LetterboxLayout, NormalizedInput,
};

use image::RgbImage;

use crate::dataset::Label;
use crate::error::Result;
use crate::eyeslot::EyeSlot;

/// Model input frame, `width × height` pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct InputSize {
    pub height: usize,
    pub width: usize,
}

impl InputSize {
    pub const FULL: InputSize = InputSize {
        height: 170,
        width: 512,
    };
    pub const DESK: InputSize = InputSize {
        height: 24,
        width: 64,
    };
}

/// Applies the random transforms selected by `seed`, without resizing.
pub fn augment_image(image: &RgbImage, config: &AugmentConfig, seed: u64) -> RgbImage {
    let p = sample_transform(config, image.width(), image.height(), seed);
    let bright = apply_brightness(image, p.brightness);
    let warped = apply_affine(&bright, p.rotation, p.dx, p.dy, p.shear);
    if p.hflip {
        apply_hflip(&warped)
    } else {
        warped
    }
}

/// Full training-time path for one slot. The label is passed through as is.
pub fn augment_pipeline(
    slot: &EyeSlot,
    config: &AugmentConfig,
    size: InputSize,
    seed: u64,
) -> Result<(NormalizedInput, Label)> {
    let augmented = augment_image(&slot.image, config, seed);
    let boxed = letterbox(&augmented, size.width as u32, size.height as u32)?;
    Ok((normalize_pixels(&boxed), slot.label))
}

/// Evaluation path: letterbox and normalize only.
pub fn prepare_eval(slot: &EyeSlot, size: InputSize) -> Result<(NormalizedInput, Label)> {
    let boxed = letterbox(&slot.image, size.width as u32, size.height as u32)?;
    Ok((normalize_pixels(&boxed), slot.label))
}
