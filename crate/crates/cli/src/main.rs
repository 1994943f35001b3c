//! `ocular`: command-line driver for the ocular-region affect pipeline.

mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input data; exit code 1.
    Usage(String),
    Core(ocular_core::Error),
    /// Failure while doing valid work; exit code 2.
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) | CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<ocular_core::Error> for CliError {
    fn from(e: ocular_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "ocular", version, about = "Valence/arousal regression from the ocular region of the face")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cut eye slots from annotated face images.
    Preprocess(commands::preprocess::Args),
    /// Carve a seeded validation split from slot manifests.
    Split(commands::split::Args),
    /// Train a dual valence/arousal regressor.
    Train(commands::train::Args),
    /// Score predictions: RMSE, correlation, CCC and sign agreement.
    Evaluate(commands::evaluate::Args),
    /// Render an input-gradient saliency overlay.
    Attention(commands::attention::Args),
    /// Write augmented copies of an image for visual inspection.
    AugmentPreview(commands::augment_preview::Args),
    /// Print a model's per-layer shape and parameter table.
    Describe(commands::describe::Args),
    /// Overlay the loss curves of several training runs.
    Plot(commands::plot::Args),
    /// Generate a synthetic annotated face corpus.
    Synth(commands::synth::Args),
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Preprocess(a) => commands::preprocess::run(a),
        Command::Split(a) => commands::split::run(a),
        Command::Train(a) => commands::train::run(a),
        Command::Evaluate(a) => commands::evaluate::run(a),
        Command::Attention(a) => commands::attention::run(a),
        Command::AugmentPreview(a) => commands::augment_preview::run(a),
        Command::Describe(a) => commands::describe::run(a),
        Command::Plot(a) => commands::plot::run(a),
        Command::Synth(a) => commands::synth::run(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
