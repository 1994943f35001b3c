use std::path::PathBuf;

use ocular_core::pipeline::{preprocess, REJECTION_REPORT, SLOT_MANIFEST};

use super::required;
use crate::config::FileConfig;
use crate::CliResult;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// TOML config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Annotation CSV: image path, 68 landmark pairs, valence, arousal.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Directory image paths are relative to [default: the annotation file's directory].
    #[arg(long)]
    images: Option<PathBuf>,
    /// Output directory for slots, manifest and rejection report.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: Args) -> CliResult {
    let file = FileConfig::load(args.config.as_deref())?;
    let annotations = required(args.annotations, file.paths.annotations, "annotations")?;
    let out = required(args.out, file.paths.out, "out")?;
    let images = args
        .images
        .or(file.paths.images)
        .unwrap_or_else(|| annotations.parent().map(PathBuf::from).unwrap_or_default());
    let summary = preprocess(&annotations, &images, &out)?;
    print!("{}", summary.report_text());
    println!("manifest: {}", out.join(SLOT_MANIFEST).display());
    println!("report: {}", out.join(REJECTION_REPORT).display());
    Ok(())
}
