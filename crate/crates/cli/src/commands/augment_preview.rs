use std::fmt::Write as _;
use std::path::PathBuf;

use ocular_core::augment::{
    apply_affine, apply_brightness, apply_hflip, letterbox, sample_transform, AugmentConfig, InputSize,
};
use ocular_core::seed;

use super::{create_dir, write_file};
use crate::args::parse_input_size;
use crate::config::FileConfig;
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// TOML config file; its [augment] table sets the transform ranges
    /// [default: brightness 0.5..1.5, rotation 0..5 deg, shifts 0..0.1,
    /// shear 0..0.01 rad, hflip on].
    #[arg(long)]
    config: Option<PathBuf>,
    /// Source image, typically an eye slot.
    #[arg(long)]
    image: PathBuf,
    /// Number of augmented copies.
    #[arg(long, default_value_t = 8)]
    count: usize,
    /// Input size HEIGHTxWIDTH the copies are letterboxed to [default: 170x512].
    #[arg(long, value_parser = parse_input_size)]
    input_size: Option<InputSize>,
    /// Seed for the transform draws [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: Args) -> CliResult {
    let file = FileConfig::load(args.config.as_deref())?;
    let config: AugmentConfig = file.augment.unwrap_or_default();
    config.validate()?;
    let size = match (args.input_size, &file.model.input_size) {
        (Some(s), _) => s,
        (None, Some(s)) => parse_input_size(s).map_err(CliError::Usage)?,
        (None, None) => InputSize::FULL,
    };
    let base = seed::derive(args.seed.or(file.seed).unwrap_or(0), "augment");
    let image = image::open(&args.image)
        .map_err(|e| CliError::Usage(format!("cannot read image {}: {e}", args.image.display())))?
        .into_rgb8();
    create_dir(&args.out)?;
    let save = |img: &image::RgbImage, name: &str| -> CliResult {
        let path = args.out.join(name);
        img.save(&path)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
    };
    let (w, h) = (size.width as u32, size.height as u32);
    save(&letterbox(&image, w, h)?, "before.png")?;
    let mut params = String::from("index,brightness,rotation_deg,dx_px,dy_px,shear_rad,hflip\n");
    for i in 0..args.count {
        let p = sample_transform(&config, image.width(), image.height(), seed::sample_seed(base, 1, i));
        let bright = apply_brightness(&image, p.brightness);
        let warped = apply_affine(&bright, p.rotation, p.dx, p.dy, p.shear);
        let flipped = if p.hflip { apply_hflip(&warped) } else { warped };
        save(&letterbox(&flipped, w, h)?, &format!("after_{i:02}.png"))?;
        writeln!(
            params,
            "{i},{},{},{},{},{},{}",
            p.brightness, p.rotation, p.dx, p.dy, p.shear, p.hflip
        )
        .unwrap();
    }
    write_file(&args.out.join("params.csv"), params)?;
    println!("wrote {} augmented copies to {}", args.count, args.out.display());
    Ok(())
}
