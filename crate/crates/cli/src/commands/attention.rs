use std::path::PathBuf;

use ocular_core::attention::{heatmap_overlay, parse_output, saliency, triptych, Direction};
use ocular_core::augment::{letterbox, normalize_pixels};
use ocular_core::models::load_checkpoint;
use ocular_core::nn::Mode;

use super::create_dir;
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Trained checkpoint.
    #[arg(long)]
    checkpoint: PathBuf,
    /// Eye-slot image; it is letterboxed to the model input.
    #[arg(long)]
    image: PathBuf,
    /// Output to explain: valence or arousal.
    #[arg(long, default_value = "valence")]
    output: String,
    /// increase, decrease, magnitude, or triptych for all three on both outputs.
    #[arg(long, default_value = "magnitude")]
    direction: String,
    /// PNG to write.
    #[arg(long, default_value = "attention.png")]
    out: PathBuf,
}

pub fn run(args: Args) -> CliResult {
    let output = parse_output(&args.output)?;
    let direction = match args.direction.to_ascii_lowercase().as_str() {
        "triptych" => None,
        d => Some(d.parse::<Direction>()?),
    };
    let (mut net, _) = load_checkpoint(&args.checkpoint)?;
    let image = image::open(&args.image)
        .map_err(|e| CliError::Usage(format!("cannot read image {}: {e}", args.image.display())))?
        .into_rgb8();
    let size = net.config().input;
    let boxed = letterbox(&image, size.width as u32, size.height as u32)?;
    let input = normalize_pixels(&boxed).tensor;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    match direction {
        Some(direction) => {
            let map = saliency(&net, &input, output, direction)?;
            heatmap_overlay(&boxed, &map, &args.out)?;
        }
        None => {
            let sheet = triptych(&net, &boxed, &input)?;
            sheet
                .save(&args.out)
                .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
        }
    }
    let batch = input.clone().reshape(&[1, size.height, size.width, 3])?;
    let pred = net.forward(&batch, Mode::Infer)?;
    println!("prediction: valence {:.4}, arousal {:.4}", pred.data()[0], pred.data()[1]);
    println!("wrote {}", args.out.display());
    Ok(())
}
