use std::path::PathBuf;

use ocular_core::training::{export_loss_plot, read_history_csv, write_loss_table, TrainHistory};

use super::create_file;
use crate::args::{parse_named, Named};
use crate::{CliError, CliResult};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// History CSV written by `ocular train`, as NAME=PATH or PATH (repeatable).
    #[arg(long = "run", value_parser = parse_named, required = true)]
    runs: Vec<Named>,
    /// Loss plot PNG to write.
    #[arg(long, default_value = "loss.png")]
    out: PathBuf,
    /// Optional combined loss table CSV.
    #[arg(long)]
    table: Option<PathBuf>,
}

pub fn run(args: Args) -> CliResult {
    let mut series: Vec<(String, TrainHistory)> = Vec::new();
    for (i, run) in args.runs.iter().enumerate() {
        let file = std::fs::File::open(&run.path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", run.path.display())))?;
        let history = read_history_csv(std::io::BufReader::new(file))?;
        let name = run.name.clone().unwrap_or_else(|| format!("run{}", i + 1));
        series.push((name, history));
    }
    let refs: Vec<(&str, &TrainHistory)> = series.iter().map(|(n, h)| (n.as_str(), h)).collect();
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        super::create_dir(parent)?;
    }
    export_loss_plot(&refs, &args.out)?;
    if let Some(table) = &args.table {
        write_loss_table(&refs, create_file(table)?)?;
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
