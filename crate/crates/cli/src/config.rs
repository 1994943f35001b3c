//! Optional TOML configuration. Every field may be omitted; command-line
//! flags take precedence over the file, and the file over built-in
//! defaults.

use std::path::{Path, PathBuf};

use ocular_core::augment::AugmentConfig;
use ocular_core::nn::AdamConfig;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub paths: PathsSection,
    pub model: ModelSection,
    pub train: TrainSection,
    pub augment: Option<AugmentConfig>,
    pub split: SplitSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub annotations: Option<PathBuf>,
    pub images: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub slots: Vec<PathBuf>,
    pub test_slots: Vec<PathBuf>,
    pub split: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub id: Option<String>,
    pub input_size: Option<String>,
    pub channel_scale: Option<f64>,
    pub width_multiplier: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub shuffle: Option<bool>,
    pub augment: Option<bool>,
    pub adam: Option<AdamConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub validation_fraction: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}
