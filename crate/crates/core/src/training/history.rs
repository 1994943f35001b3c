use std::io::{Read, Write};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRecord {
    /// 1-based.
    pub epoch: usize,
    /// Mean of the batch losses seen during the epoch.
    pub train_loss: f64,
    pub val_loss: Option<f64>,
    /// Optimizer steps taken.
    pub steps: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub records: Vec<LossRecord>,
    pub epoch_seconds: Vec<f64>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// `epoch,train_loss,val_loss,steps`, values in shortest round-trip form.
/// Wall-clock times are kept out so reruns produce identical files.
pub fn write_history_csv<W: Write>(history: &TrainHistory, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["epoch", "train_loss", "val_loss", "steps"]).map_err(csv_err)?;
    for r in &history.records {
        w.write_record([
            r.epoch.to_string(),
            r.train_loss.to_string(),
            opt(r.val_loss),
            r.steps.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_history_csv<R: Read>(reader: R) -> Result<TrainHistory> {
    let mut r = csv::Reader::from_reader(reader);
    let mut history = TrainHistory::default();
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let field = |k: usize| row.get(k).unwrap_or("");
        let num = |k: usize| -> Result<f64> {
            field(k)
                .parse()
                .map_err(|_| Error::Parse(format!("history row {}: bad number {:?}", i + 1, field(k))))
        };
        let int = |k: usize| -> Result<usize> {
            field(k)
                .parse()
                .map_err(|_| Error::Parse(format!("history row {}: bad integer {:?}", i + 1, field(k))))
        };
        history.records.push(LossRecord {
            epoch: int(0)?,
            train_loss: num(1)?,
            val_loss: if field(2).is_empty() { None } else { Some(num(2)?) },
            steps: int(3)?,
        });
    }
    Ok(history)
}

/// `epoch,seconds`.
pub fn write_timing_csv<W: Write>(history: &TrainHistory, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["epoch", "seconds"]).map_err(csv_err)?;
    for (i, s) in history.epoch_seconds.iter().enumerate() {
        w.write_record([(i + 1).to_string(), s.to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

/// Long-format table of several runs: `model,epoch,train_loss,val_loss`.
pub fn write_loss_table<W: Write>(series: &[(&str, &TrainHistory)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["model", "epoch", "train_loss", "val_loss"]).map_err(csv_err)?;
    for (name, h) in series {
        for r in &h.records {
            w.write_record([name.to_string(), r.epoch.to_string(), r.train_loss.to_string(), opt(r.val_loss)])
                .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let h = TrainHistory {
            records: vec![
                LossRecord {
                    epoch: 1,
                    train_loss: 0.1 + 0.2,
                    val_loss: Some(1.0 / 3.0),
                    steps: 4,
                },
                LossRecord {
                    epoch: 2,
                    train_loss: 1e-17,
                    val_loss: None,
                    steps: 4,
                },
            ],
            epoch_seconds: vec![],
        };
        let mut buf = Vec::new();
        write_history_csv(&h, &mut buf).unwrap();
        assert_eq!(read_history_csv(buf.as_slice()).unwrap(), h);
    }
}
