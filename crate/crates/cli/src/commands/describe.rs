use ocular_core::augment::InputSize;
use ocular_core::models::{build_architecture, ModelConfig, ModelId};

use crate::args::{parse_fraction, parse_input_size};
use crate::CliResult;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Model id: M1, M2 or M3.
    #[arg(long, default_value = "M1")]
    model: String,
    /// Input size HEIGHTxWIDTH.
    #[arg(long, default_value = "170x512", value_parser = parse_input_size)]
    input_size: InputSize,
    /// Uniform channel shrink, e.g. 1/16.
    #[arg(long, default_value = "1", value_parser = parse_fraction)]
    scale: f64,
    /// MobileNet width multiplier for M3.
    #[arg(long, default_value = "1", value_parser = parse_fraction)]
    width_multiplier: f64,
}

pub fn run(args: Args) -> CliResult {
    let config = ModelConfig {
        id: args.model.parse::<ModelId>()?,
        input: args.input_size,
        width_multiplier: args.width_multiplier,
        channel_scale: args.scale,
    };
    config.validate()?;
    let arch = build_architecture(&config)?;
    print!("{}", arch.shape_table());
    Ok(())
}
