pub mod attention;
pub mod augment_preview;
pub mod describe;
pub mod evaluate;
pub mod plot;
pub mod preprocess;
pub mod split;
pub mod synth;
pub mod train;

use std::path::{Path, PathBuf};

use ocular_core::dataset::SplitManifest;

use crate::{CliError, CliResult};

pub fn create_dir(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> CliResult {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn create_file(path: &Path) -> CliResult<std::io::BufWriter<std::fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))
}

pub fn read_split(path: &Path) -> CliResult<SplitManifest> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read split manifest {}: {e}", path.display())))?;
    Ok(SplitManifest::from_text(&text)?)
}

/// The flag if given, else the config value, else an error naming the flag.
pub fn required<T>(flag: Option<T>, config: Option<T>, name: &str) -> CliResult<T> {
    flag.or(config)
        .ok_or_else(|| CliError::Usage(format!("missing --{name} (or its config file entry)")))
}

pub fn list_or(flag: Vec<PathBuf>, config: Vec<PathBuf>) -> Vec<PathBuf> {
    if flag.is_empty() {
        config
    } else {
        flag
    }
}
