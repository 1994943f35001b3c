use std::path::PathBuf;

use ocular_core::synthetic::{generate_corpus, CorpusSpec};

use crate::CliResult;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Output directory; receives images/ and annotations.csv.
    #[arg(long)]
    out: PathBuf,
    /// Number of faces.
    #[arg(long, default_value_t = 32)]
    count: usize,
    /// Square image side in pixels.
    #[arg(long, default_value_t = 160)]
    size: u32,
    /// Faces are rotated uniformly within ± this many degrees.
    #[arg(long, default_value_t = 15.0)]
    max_angle: f64,
    /// Seed for face placement, labels and rendering.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn run(args: Args) -> CliResult {
    let spec = CorpusSpec {
        count: args.count,
        width: args.size,
        height: args.size,
        max_angle: args.max_angle,
        seed: args.seed,
    };
    let records = generate_corpus(&args.out, &spec)?;
    println!("wrote {} faces to {}", records.len(), args.out.display());
    Ok(())
}
