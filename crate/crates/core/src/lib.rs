//! # ocular-core
//!
//! Affect (valence/arousal) regression from the ocular region of a face.
//!
//! The pipeline:
//!
//! 1. [`dataset`]: parse landmark/label annotations, drop out-of-range labels,
//!    carve a seeded validation split.
//! 2. [`eyeslot`]: fit an expanded, de-rotated box around the eyes, eyebrows
//!    and nearest nose point, then crop the "eye slot".
//! 3. [`augment`]: random brightness/affine/flip jitter, letterbox to the
//!    model input and scale to [0, 1].
//! 4. [`nn`] and [`models`]: a from-scratch CNN engine and the VGG-style
//!    (`M1`, `M2`) and MobileNet-style (`M3`) dual regressors.
//! 5. [`training`]: Adam on mean squared error, per-epoch loss history.
//! 6. [`metrics`]: RMSE, Pearson correlation, concordance correlation and
//!    sign agreement.
//! 7. [`attention`]: input-gradient saliency maps and heatmap overlays.

pub mod attention;
pub mod augment;
pub mod dataset;
mod error;
pub mod eyeslot;
pub mod imageops;
pub mod metrics;
pub mod models;
pub mod nn;
pub mod pipeline;
pub mod seed;
pub mod synthetic;
pub mod training;

pub use error::{Error, Result};
