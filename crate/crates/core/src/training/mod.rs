//! The epoch loop: seeded shuffling, per-sample augmentation, mini-batch
//! Adam steps on the dual MSE loss, and a validation pass after each epoch.

mod history;
mod plot;

pub use history::{read_history_csv, write_history_csv, write_loss_table, write_timing_csv, LossRecord, TrainHistory};
pub use plot::{export_loss_plot, render_loss_plot};

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{augment_pipeline, prepare_eval, AugmentConfig, InputSize};
use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::eyeslot::EyeSlot;
use crate::models::{save_checkpoint, Network};
use crate::nn::{mse_dual_loss, Adam, AdamConfig, Mode, Tensor};
use crate::seed;

const PREDICT_CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub adam: AdamConfig,
    pub seed: u64,
    pub shuffle: bool,
    pub augment: AugmentConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 16,
            epochs: 50,
            adam: AdamConfig::default(),
            seed: 0,
            shuffle: true,
            augment: AugmentConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 2 {
            return Err(Error::InvalidArgument(format!(
                "batch size {} is below 2, which batch norm needs",
                self.batch_size
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        self.augment.validate()
    }
}

fn label_tensor(labels: &[Label]) -> Tensor {
    let data = labels.iter().flat_map(|l| [l.valence, l.arousal]).collect();
    Tensor::new(vec![labels.len(), 2], data).expect("two values per label")
}

fn input_size(network: &Network) -> InputSize {
    let s = network.input_shape();
    InputSize {
        height: s[0],
        width: s[1],
    }
}

/// Letterboxed, normalized inputs and their targets, ready for inference.
#[derive(Debug, Clone)]
pub struct PreparedSet {
    pub inputs: Vec<Tensor>,
    pub labels: Vec<Label>,
}

impl PreparedSet {
    pub fn new(slots: &[EyeSlot], size: InputSize) -> Result<Self> {
        let prepared: Vec<_> = slots.par_iter().map(|s| prepare_eval(s, size)).collect::<Result<_>>()?;
        let (inputs, labels) = prepared.into_iter().map(|(x, l)| (x.tensor, l)).unzip();
        Ok(Self { inputs, labels })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Inference-mode forward pass over `[n, h, w, 3]` inputs.
pub fn predict(network: &mut Network, inputs: &Tensor) -> Result<Vec<[f64; 2]>> {
    let n = inputs.shape().first().copied().unwrap_or(0);
    let mut out = Vec::with_capacity(n);
    for start in (0..n).step_by(PREDICT_CHUNK) {
        let y = network.forward(&inputs.slice_batch(start, (start + PREDICT_CHUNK).min(n)), Mode::Infer)?;
        out.extend(y.data().chunks(2).map(|r| [r[0], r[1]]));
    }
    network.clear_caches();
    Ok(out)
}

/// Mean dual MSE over a prepared set, batch norm in inference mode.
pub fn evaluate_loss(network: &mut Network, set: &PreparedSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("loss of an empty set".into()));
    }
    let preds = predict(network, &Tensor::stack(&set.inputs)?)?;
    let flat: Vec<f64> = preds.iter().flatten().copied().collect();
    let pred = Tensor::new(vec![preds.len(), 2], flat)?;
    Ok(mse_dual_loss(&pred, &label_tensor(&set.labels))?.0)
}

/// Owns the optimizer and history for one run over a borrowed network.
pub struct Trainer<'a> {
    pub network: &'a mut Network,
    pub optimizer: Adam,
    pub config: TrainConfig,
    history: TrainHistory,
    best: Option<f64>,
    checkpoint_dir: Option<PathBuf>,
}

impl<'a> Trainer<'a> {
    pub fn new(network: &'a mut Network, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            network,
            optimizer: Adam::new(config.adam),
            config,
            history: TrainHistory::default(),
            best: None,
            checkpoint_dir: None,
        })
    }

    /// Writes `last.ckpt` after every epoch and `best.ckpt` whenever the
    /// validation loss (training loss without a validation set) improves.
    pub fn with_checkpoints(mut self, dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.checkpoint_dir = Some(dir.to_path_buf());
        Ok(self)
    }

    /// Continues a run from a checkpointed optimizer and the history of the
    /// epochs already completed.
    pub fn resume(mut self, optimizer: Adam, history: TrainHistory) -> Self {
        self.best = history
            .records
            .iter()
            .map(|r| r.val_loss.unwrap_or(r.train_loss))
            .reduce(f64::min);
        self.optimizer = optimizer;
        self.history = history;
        self
    }

    pub fn history(&self) -> &TrainHistory {
        &self.history
    }

    pub fn into_history(self) -> TrainHistory {
        self.history
    }

    /// One batch of augmented samples `order[..]`, drawn with the seeds of
    /// `epoch`.
    fn batch(&self, train: &[EyeSlot], indices: &[usize], epoch: usize) -> Result<(Tensor, Tensor)> {
        let size = input_size(self.network);
        let base = seed::derive(self.config.seed, "augment");
        let samples: Vec<_> = indices
            .par_iter()
            .map(|&i| augment_pipeline(&train[i], &self.config.augment, size, seed::sample_seed(base, epoch, i)))
            .collect::<Result<_>>()?;
        let (inputs, labels): (Vec<_>, Vec<_>) = samples.into_iter().map(|(x, l)| (x.tensor, l)).unzip();
        Ok((Tensor::stack(&inputs)?, label_tensor(&labels)))
    }

    /// Runs the next epoch. Every full batch gets one optimizer step; the
    /// final partial batch is dropped.
    pub fn run_epoch(&mut self, train: &[EyeSlot], val: &PreparedSet) -> Result<LossRecord> {
        let gamma = self.config.batch_size;
        if train.len() < gamma {
            return Err(Error::InvalidArgument(format!(
                "training set of {} samples is smaller than the batch size {gamma}",
                train.len()
            )));
        }
        let epoch = self.history.records.len() + 1;
        let started = Instant::now();
        let mut order: Vec<usize> = (0..train.len()).collect();
        if self.config.shuffle {
            let mut rng = seed::rng(seed::sample_seed(seed::derive(self.config.seed, "shuffle"), epoch, 0));
            order.shuffle(&mut rng);
        }
        let steps = train.len() / gamma;
        let mut total = 0.0;
        for b in 0..steps {
            let (x, y) = self.batch(train, &order[b * gamma..(b + 1) * gamma], epoch)?;
            let pred = self.network.forward(&x, Mode::Train)?;
            let (loss, grad) = mse_dual_loss(&pred, &y)?;
            if !loss.is_finite() || !grad.data().iter().all(|g| g.is_finite()) {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    batch: b,
                    layer_norms: self.network.layer_norms(),
                });
            }
            self.network.backward(&grad)?;
            self.optimizer.step(&mut self.network.params_mut())?;
            total += loss;
            log::debug!("epoch {epoch} batch {b}: loss {loss}");
        }
        self.network.clear_caches();
        let val_loss = if val.is_empty() {
            None
        } else {
            Some(evaluate_loss(self.network, val)?)
        };
        let record = LossRecord {
            epoch,
            train_loss: total / steps as f64,
            val_loss,
            steps,
        };
        self.history.records.push(record);
        self.history.epoch_seconds.push(started.elapsed().as_secs_f64());
        self.checkpoint(&record)?;
        log::info!(
            "epoch {epoch}: train loss {:.6}{}",
            record.train_loss,
            val_loss.map(|v| format!(", val loss {v:.6}")).unwrap_or_default()
        );
        Ok(record)
    }

    fn checkpoint(&mut self, record: &LossRecord) -> Result<()> {
        let Some(dir) = &self.checkpoint_dir else {
            return Ok(());
        };
        save_checkpoint(&dir.join("last.ckpt"), self.network, Some(&self.optimizer))?;
        let score = record.val_loss.unwrap_or(record.train_loss);
        if self.best.map_or(true, |b| score < b) {
            self.best = Some(score);
            save_checkpoint(&dir.join("best.ckpt"), self.network, Some(&self.optimizer))?;
        }
        Ok(())
    }

    /// Runs the remaining epochs up to `config.epochs`.
    pub fn fit(&mut self, train: &[EyeSlot], val: &[EyeSlot]) -> Result<&TrainHistory> {
        let val = PreparedSet::new(val, input_size(self.network))?;
        while self.history.records.len() < self.config.epochs {
            self.run_epoch(train, &val)?;
        }
        Ok(&self.history)
    }
}

/// Trains `network` in place with a fresh optimizer.
pub fn train(
    network: &mut Network,
    train_set: &[EyeSlot],
    val_set: &[EyeSlot],
    config: &TrainConfig,
    checkpoint_dir: Option<&Path>,
) -> Result<TrainHistory> {
    if train_set.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    let mut trainer = Trainer::new(network, *config)?;
    if let Some(dir) = checkpoint_dir {
        trainer = trainer.with_checkpoints(dir)?;
    }
    trainer.fit(train_set, val_set)?;
    Ok(trainer.into_history())
}
