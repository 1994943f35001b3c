use std::path::PathBuf;

use ocular_core::pipeline::{split_from_index, SlotIndex};

use super::{list_or, write_file};
use crate::config::FileConfig;
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// TOML config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Slot manifests of the training pool (repeatable).
    #[arg(long = "slots")]
    slots: Vec<PathBuf>,
    /// Slot manifests of the held-out test corpus (repeatable).
    #[arg(long = "test-slots")]
    test_slots: Vec<PathBuf>,
    /// Fraction of the pool moved to validation [default: 0.01].
    #[arg(long)]
    fraction: Option<f64>,
    /// Seed for the validation draw [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Split manifest to write.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: Args) -> CliResult {
    let file = FileConfig::load(args.config.as_deref())?;
    let pool = list_or(args.slots, file.paths.slots);
    if pool.is_empty() {
        return Err(CliError::Usage("missing --slots (or paths.slots in the config)".into()));
    }
    let test = list_or(args.test_slots, file.paths.test_slots);
    let fraction = args.fraction.or(file.split.validation_fraction).unwrap_or(0.01);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let pool = SlotIndex::open(&pool)?;
    let test = if test.is_empty() { None } else { Some(SlotIndex::open(&test)?) };
    let manifest = split_from_index(&pool, test.as_ref(), fraction, seed)?;
    write_file(&args.out, manifest.to_text())?;
    println!(
        "train: {}\nvalidation: {}\ntest: {}",
        manifest.train.len(),
        manifest.validation.len(),
        manifest.test.len()
    );
    Ok(())
}
