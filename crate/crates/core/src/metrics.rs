//! Regression metrics for (valence, arousal) predictions.
//!
//! Moments inside CCC and Pearson use population (1/n) normalization, so
//! `|ccc| <= |pearson|` holds for the same data. `sign(0) = 0` in SAGR: a
//! zero prediction only agrees with a zero target.

use std::fmt::Write as _;

use crate::error::{Error, Result};

fn check(pred: &[f64], target: &[f64]) -> Result<()> {
    if pred.len() != target.len() {
        return Err(Error::shape("metric inputs", &[pred.len()], &[target.len()]));
    }
    if pred.is_empty() {
        return Err(Error::InvalidArgument("metric of an empty sequence".into()));
    }
    if pred.iter().chain(target).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("metric input".into()));
    }
    Ok(())
}

struct Moments {
    mean_p: f64,
    mean_t: f64,
    var_p: f64,
    var_t: f64,
    cov: f64,
}

fn moments(pred: &[f64], target: &[f64]) -> Moments {
    let n = pred.len() as f64;
    let mean_p = pred.iter().sum::<f64>() / n;
    let mean_t = target.iter().sum::<f64>() / n;
    let (mut var_p, mut var_t, mut cov) = (0.0, 0.0, 0.0);
    for (p, t) in pred.iter().zip(target) {
        let (dp, dt) = (p - mean_p, t - mean_t);
        var_p += dp * dp;
        var_t += dt * dt;
        cov += dp * dt;
    }
    Moments {
        mean_p,
        mean_t,
        var_p: var_p / n,
        var_t: var_t / n,
        cov: cov / n,
    }
}

pub fn rmse(pred: &[f64], target: &[f64]) -> Result<f64> {
    check(pred, target)?;
    let sse: f64 = pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((sse / pred.len() as f64).sqrt())
}

pub fn pearson(pred: &[f64], target: &[f64]) -> Result<f64> {
    check(pred, target)?;
    let m = moments(pred, target);
    if m.var_p == 0.0 || m.var_t == 0.0 {
        return Err(Error::UndefinedMetric(
            "undefined correlation: a sequence has zero variance".into(),
        ));
    }
    Ok((m.cov / (m.var_p.sqrt() * m.var_t.sqrt())).clamp(-1.0, 1.0))
}

/// Lin's concordance correlation coefficient.
pub fn ccc(pred: &[f64], target: &[f64]) -> Result<f64> {
    check(pred, target)?;
    let m = moments(pred, target);
    let denom = m.var_p + m.var_t + (m.mean_p - m.mean_t).powi(2);
    if denom == 0.0 {
        return if pred == target {
            Ok(1.0)
        } else {
            Err(Error::UndefinedMetric("concordance of constant sequences".into()))
        };
    }
    Ok(2.0 * m.cov / denom)
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Fraction of positions where prediction and target share a sign.
pub fn sagr(pred: &[f64], target: &[f64]) -> Result<f64> {
    check(pred, target)?;
    let agree = pred
        .iter()
        .zip(target)
        .filter(|(p, t)| sign(**p) == sign(**t))
        .count();
    Ok(agree as f64 / pred.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputMetrics {
    pub rmse: f64,
    pub corr: f64,
    pub ccc: f64,
    pub sagr: f64,
}

impl OutputMetrics {
    pub fn compute(pred: &[f64], target: &[f64]) -> Result<Self> {
        Ok(Self {
            rmse: rmse(pred, target)?,
            corr: pearson(pred, target)?,
            ccc: ccc(pred, target)?,
            sagr: sagr(pred, target)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationReport {
    pub valence: OutputMetrics,
    pub arousal: OutputMetrics,
}

/// Metrics for column 0 (valence) and column 1 (arousal).
pub fn evaluate_report(predictions: &[[f64; 2]], targets: &[[f64; 2]]) -> Result<EvaluationReport> {
    if predictions.len() != targets.len() {
        return Err(Error::shape("evaluate", &[predictions.len(), 2], &[targets.len(), 2]));
    }
    let col = |rows: &[[f64; 2]], k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
    Ok(EvaluationReport {
        valence: OutputMetrics::compute(&col(predictions, 0), &col(targets, 0))?,
        arousal: OutputMetrics::compute(&col(predictions, 1), &col(targets, 1))?,
    })
}

const METRIC_NAMES: [&str; 4] = ["RMSE", "CORR", "CCC", "SAGR"];

impl EvaluationReport {
    /// Cells in table order: RMSE V, RMSE A, CORR V, CORR A, CCC V, CCC A, SAGR V, SAGR A.
    pub fn cells(&self) -> [f64; 8] {
        let (v, a) = (&self.valence, &self.arousal);
        [v.rmse, a.rmse, v.corr, a.corr, v.ccc, a.ccc, v.sagr, a.sagr]
    }

    pub fn to_key_values(&self, model: &str) -> String {
        let mut out = String::new();
        for (name, m) in [("valence", &self.valence), ("arousal", &self.arousal)] {
            for (metric, v) in ["rmse", "corr", "ccc", "sagr"].iter().zip([m.rmse, m.corr, m.ccc, m.sagr]) {
                writeln!(out, "{model}.{name}.{metric}={v}").unwrap();
            }
        }
        out
    }
}

/// Aligned plain-text table: one row per model, a V and an A column under
/// each metric.
pub fn render_table(rows: &[(&str, &EvaluationReport)]) -> String {
    let label_w = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(5);
    let cell = 7;
    let mut out = String::new();
    write!(out, "{:label_w$} |", "").unwrap();
    for name in METRIC_NAMES {
        write!(out, " {:^w$}", name, w = 2 * cell + 1).unwrap();
    }
    out.push('\n');
    write!(out, "{:label_w$} |", "").unwrap();
    for _ in METRIC_NAMES {
        write!(out, " {:>cell$} {:>cell$}", "V", "A").unwrap();
    }
    out.push('\n');
    writeln!(out, "{}", "-".repeat(label_w + 2 + 4 * (2 * cell + 2))).unwrap();
    for (name, report) in rows {
        write!(out, "{name:label_w$} |").unwrap();
        for v in report.cells() {
            write!(out, " {v:>cell$.3}").unwrap();
        }
        out.push('\n');
    }
    out
}
