use std::path::{Path, PathBuf};

use ocular_core::augment::{AugmentConfig, InputSize};
use ocular_core::models::{load_checkpoint, ModelConfig, ModelId, Network};
use ocular_core::nn::AdamConfig;
use ocular_core::pipeline::SlotIndex;
use ocular_core::training::{
    export_loss_plot, read_history_csv, write_history_csv, write_loss_table, write_timing_csv, PreparedSet,
    TrainConfig, TrainHistory, Trainer,
};
use serde::Serialize;

use super::{create_file, list_or, read_split, required, write_file};
use crate::args::{parse_fraction, parse_input_size};
use crate::config::FileConfig;
use crate::{CliError, CliResult};

pub const HISTORY_FILE: &str = "history.csv";
pub const TIMING_FILE: &str = "timing.csv";
pub const LOSS_PLOT_FILE: &str = "loss.png";
pub const LOSS_TABLE_FILE: &str = "loss.csv";
pub const MODEL_FILE: &str = "model.txt";
pub const RESOLVED_CONFIG_FILE: &str = "resolved.toml";
pub const CHECKPOINT_DIR: &str = "checkpoints";

#[derive(Debug, clap::Args)]
pub struct Args {
    /// TOML config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Slot manifests holding every id named by the split (repeatable).
    #[arg(long = "slots")]
    slots: Vec<PathBuf>,
    /// Split manifest written by `ocular split`.
    #[arg(long)]
    split: Option<PathBuf>,
    /// Output directory for checkpoints, history and plots.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Model id: M1, M2 or M3 [default: M1].
    #[arg(long)]
    model: Option<String>,
    /// Input size HEIGHTxWIDTH [default: 170x512].
    #[arg(long, value_parser = parse_input_size)]
    input_size: Option<InputSize>,
    /// Uniform channel shrink, e.g. 1/16 [default: 1].
    #[arg(long, value_parser = parse_fraction)]
    scale: Option<f64>,
    /// MobileNet width multiplier for M3 [default: 1].
    #[arg(long, value_parser = parse_fraction)]
    width_multiplier: Option<f64>,
    /// Mini-batch size γ [default: 16].
    #[arg(long)]
    batch_size: Option<usize>,
    /// Epochs η [default: 50].
    #[arg(long)]
    epochs: Option<usize>,
    /// Adam step size α [default: 0.001].
    #[arg(long)]
    lr: Option<f64>,
    /// Adam β1 [default: 0.9].
    #[arg(long)]
    beta1: Option<f64>,
    /// Adam β2 [default: 0.999].
    #[arg(long)]
    beta2: Option<f64>,
    /// Adam ε [default: 1e-8].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Seed for initialization, shuffling and augmentation [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Keep the manifest order every epoch.
    #[arg(long)]
    no_shuffle: bool,
    /// Train on letterboxed slots without random transforms.
    #[arg(long)]
    no_augment: bool,
    /// Continue from the last checkpoint and history in --out.
    #[arg(long)]
    resume: bool,
}

#[derive(Debug, Serialize)]
struct Resolved {
    model: ModelConfig,
    train: TrainConfig,
}

fn resolve(args: &Args, file: &FileConfig) -> CliResult<(ModelConfig, TrainConfig)> {
    let id: ModelId = args
        .model
        .as_deref()
        .or(file.model.id.as_deref())
        .unwrap_or("M1")
        .parse()?;
    let input = match (args.input_size, &file.model.input_size) {
        (Some(s), _) => s,
        (None, Some(s)) => parse_input_size(s).map_err(CliError::Usage)?,
        (None, None) => InputSize::FULL,
    };
    let model = ModelConfig {
        id,
        input,
        width_multiplier: args.width_multiplier.or(file.model.width_multiplier).unwrap_or(1.0),
        channel_scale: args.scale.or(file.model.channel_scale).unwrap_or(1.0),
    };
    model.validate()?;

    let base = TrainConfig::default();
    let file_adam = file.train.adam.unwrap_or_default();
    let adam = AdamConfig {
        alpha: args.lr.unwrap_or(file_adam.alpha),
        beta1: args.beta1.unwrap_or(file_adam.beta1),
        beta2: args.beta2.unwrap_or(file_adam.beta2),
        epsilon: args.epsilon.unwrap_or(file_adam.epsilon),
    };
    let augment = if args.no_augment || file.train.augment == Some(false) {
        AugmentConfig::identity()
    } else {
        file.augment.unwrap_or_default()
    };
    let train = TrainConfig {
        batch_size: args.batch_size.or(file.train.batch_size).unwrap_or(base.batch_size),
        epochs: args.epochs.or(file.train.epochs).unwrap_or(base.epochs),
        adam,
        seed: args.seed.or(file.seed).unwrap_or(base.seed),
        shuffle: !args.no_shuffle && file.train.shuffle.unwrap_or(base.shuffle),
        augment,
    };
    train.validate()?;
    Ok((model, train))
}

fn read_history(path: &Path) -> CliResult<TrainHistory> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Usage(format!("cannot resume, {} unreadable: {e}", path.display())))?;
    Ok(read_history_csv(std::io::BufReader::new(file))?)
}

fn write_artifacts(out: &Path, name: &str, history: &TrainHistory) -> CliResult {
    write_history_csv(history, create_file(&out.join(HISTORY_FILE))?)?;
    write_timing_csv(history, create_file(&out.join(TIMING_FILE))?)?;
    write_loss_table(&[(name, history)], create_file(&out.join(LOSS_TABLE_FILE))?)?;
    Ok(())
}

pub fn run(args: Args) -> CliResult {
    let file = FileConfig::load(args.config.as_deref())?;
    let (model, config) = resolve(&args, &file)?;
    let slots = list_or(args.slots.clone(), file.paths.slots.clone());
    if slots.is_empty() {
        return Err(CliError::Usage("missing --slots (or paths.slots in the config)".into()));
    }
    let split = read_split(&required(args.split.clone(), file.paths.split.clone(), "split")?)?;
    let out = required(args.out.clone(), file.paths.out.clone(), "out")?;

    let index = SlotIndex::open(&slots)?;
    let train_set = index.load(&split.train)?;
    let val_set = index.load(&split.validation)?;
    if train_set.len() < config.batch_size {
        return Err(CliError::Usage(format!(
            "training split has {} samples, fewer than the batch size {}",
            train_set.len(),
            config.batch_size
        )));
    }

    let ckpt_dir = out.join(CHECKPOINT_DIR);
    let (mut network, resumed) = if args.resume {
        let (net, adam) = load_checkpoint(&ckpt_dir.join("last.ckpt"))?;
        if *net.config() != model {
            return Err(CliError::Usage(format!(
                "checkpoint model {:?} differs from the requested {:?}",
                net.config(),
                model
            )));
        }
        let adam = adam.ok_or_else(|| CliError::Usage("checkpoint has no optimizer state".into()))?;
        (net, Some((adam, read_history(&out.join(HISTORY_FILE))?)))
    } else {
        (Network::build(&model, config.seed)?, None)
    };

    let resolved = Resolved { model, train: config };
    let resolved_text =
        toml::to_string(&resolved).map_err(|e| CliError::Runtime(format!("cannot serialize config: {e}")))?;
    write_file(&out.join(RESOLVED_CONFIG_FILE), resolved_text)?;
    write_file(&out.join(MODEL_FILE), network.architecture().shape_table())?;
    println!(
        "model {} ({} parameters), {} training / {} validation samples",
        model.id,
        network.param_count(),
        train_set.len(),
        val_set.len()
    );

    let name = model.id.to_string();
    let val = PreparedSet::new(&val_set, model.input)?;
    let mut trainer = Trainer::new(&mut network, config)?.with_checkpoints(&ckpt_dir)?;
    if let Some((adam, history)) = resumed {
        trainer = trainer.resume(adam, history);
    }
    while trainer.history().len() < config.epochs {
        let r = trainer.run_epoch(&train_set, &val)?;
        match r.val_loss {
            Some(v) => println!("epoch {}: train loss {:.6}, validation loss {:.6}", r.epoch, r.train_loss, v),
            None => println!("epoch {}: train loss {:.6}", r.epoch, r.train_loss),
        }
        write_artifacts(&out, &name, trainer.history())?;
    }
    let history = trainer.into_history();
    write_artifacts(&out, &name, &history)?;
    export_loss_plot(&[(&name, &history)], &out.join(LOSS_PLOT_FILE))?;
    println!("history: {}", out.join(HISTORY_FILE).display());
    println!("checkpoints: {}", ckpt_dir.display());
    Ok(())
}
