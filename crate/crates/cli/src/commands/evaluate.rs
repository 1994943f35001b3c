use std::path::{Path, PathBuf};

use ocular_core::metrics::{evaluate_report, render_table, EvaluationReport};
use ocular_core::models::load_checkpoint;
use ocular_core::nn::Tensor;
use ocular_core::pipeline::SlotIndex;
use ocular_core::training::{predict, PreparedSet};
use serde::{Deserialize, Serialize};

use super::{create_file, list_or, read_split, write_file};
use crate::args::{parse_named, Named};
use crate::config::FileConfig;
use crate::{CliError, CliResult};

pub const REPORT_FILE: &str = "report.txt";
pub const KEY_VALUE_FILE: &str = "report.kv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Section {
    Train,
    Validation,
    Test,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// TOML config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Prediction CSV with pred_valence, pred_arousal, valence, arousal
    /// columns, as NAME=PATH or PATH (repeatable).
    #[arg(long = "predictions", value_parser = parse_named)]
    predictions: Vec<Named>,
    /// Checkpoint to run over a split section, as NAME=PATH or PATH (repeatable).
    #[arg(long = "checkpoint", value_parser = parse_named)]
    checkpoints: Vec<Named>,
    /// Slot manifests holding the section's ids (repeatable).
    #[arg(long = "slots")]
    slots: Vec<PathBuf>,
    /// Split manifest written by `ocular split`.
    #[arg(long)]
    split: Option<PathBuf>,
    /// Split section to score checkpoints on.
    #[arg(long, value_enum, default_value = "test")]
    section: Section,
    /// Directory for the report, key=value metrics and checkpoint predictions.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PredictionRow {
    #[serde(default)]
    pub id: String,
    pub pred_valence: f64,
    pub pred_arousal: f64,
    pub valence: f64,
    pub arousal: f64,
}

pub fn read_predictions(path: &Path) -> CliResult<(Vec<[f64; 2]>, Vec<[f64; 2]>)> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Usage(format!("cannot read predictions {}: {e}", path.display())))?;
    let mut pred = Vec::new();
    let mut target = Vec::new();
    for (i, row) in reader.deserialize::<PredictionRow>().enumerate() {
        let row = row.map_err(|e| CliError::Usage(format!("{} row {}: {e}", path.display(), i + 1)))?;
        pred.push([row.pred_valence, row.pred_arousal]);
        target.push([row.valence, row.arousal]);
    }
    Ok((pred, target))
}

fn write_predictions(path: &Path, ids: &[String], pred: &[[f64; 2]], target: &[[f64; 2]]) -> CliResult {
    let mut writer = csv::Writer::from_writer(create_file(path)?);
    for ((id, p), t) in ids.iter().zip(pred).zip(target) {
        writer
            .serialize(PredictionRow {
                id: id.clone(),
                pred_valence: p[0],
                pred_arousal: p[1],
                valence: t[0],
                arousal: t[1],
            })
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn default_name(named: &Named, i: usize) -> String {
    named.name.clone().unwrap_or_else(|| {
        named
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("run{}", i + 1))
    })
}

pub fn run(args: Args) -> CliResult {
    if args.predictions.is_empty() && args.checkpoints.is_empty() {
        return Err(CliError::Usage("give --predictions or --checkpoint".into()));
    }
    let file = FileConfig::load(args.config.as_deref())?;
    let mut rows: Vec<(String, EvaluationReport)> = Vec::new();

    for (i, p) in args.predictions.iter().enumerate() {
        let (pred, target) = read_predictions(&p.path)?;
        rows.push((default_name(p, i), evaluate_report(&pred, &target)?));
    }

    if !args.checkpoints.is_empty() {
        let slots = list_or(args.slots, file.paths.slots);
        if slots.is_empty() {
            return Err(CliError::Usage("--checkpoint needs --slots".into()));
        }
        let split_path = args
            .split
            .or(file.paths.split)
            .ok_or_else(|| CliError::Usage("--checkpoint needs --split".into()))?;
        let split = read_split(&split_path)?;
        let ids = match args.section {
            Section::Train => &split.train,
            Section::Validation => &split.validation,
            Section::Test => &split.test,
        };
        if ids.is_empty() {
            return Err(CliError::Usage(format!("split section {:?} is empty", args.section)));
        }
        let index = SlotIndex::open(&slots)?;
        let slots = index.load(ids)?;
        for (i, c) in args.checkpoints.iter().enumerate() {
            let (mut net, _) = load_checkpoint(&c.path)?;
            let set = PreparedSet::new(&slots, net.config().input)?;
            let pred = predict(&mut net, &Tensor::stack(&set.inputs)?)?;
            let target: Vec<[f64; 2]> = set.labels.iter().map(|l| [l.valence, l.arousal]).collect();
            let name = c.name.clone().unwrap_or_else(|| {
                if args.checkpoints.len() == 1 {
                    net.config().id.to_string()
                } else {
                    default_name(c, i)
                }
            });
            if let Some(out) = &args.out {
                write_predictions(&out.join(format!("predictions_{name}.csv")), ids, &pred, &target)?;
            }
            rows.push((name, evaluate_report(&pred, &target)?));
        }
    }

    let table_rows: Vec<(&str, &EvaluationReport)> = rows.iter().map(|(n, r)| (n.as_str(), r)).collect();
    let table = render_table(&table_rows);
    print!("{table}");
    if let Some(out) = &args.out {
        write_file(&out.join(REPORT_FILE), &table)?;
        let kv: String = rows.iter().map(|(n, r)| r.to_key_values(n)).collect();
        write_file(&out.join(KEY_VALUE_FILE), kv)?;
    }
    Ok(())
}
