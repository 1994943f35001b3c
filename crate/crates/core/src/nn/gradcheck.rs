//! Central finite-difference checks of analytic gradients.
//!
//! The probe loss is `L = Σ r_i y_i` for a fixed random `r`, so the seed
//! gradient fed to `backward` is `r` itself. Relative error is
//! `|a - n| / max(|a|, |n|, floor)`; the floor keeps entries whose true
//! gradient is zero from dividing round-off by round-off, so entries below
//! it in magnitude are effectively held to an absolute tolerance.
//!
//! ReLU and max pooling are only piecewise differentiable. A probe whose
//! `+h` or `-h` evaluation switches any ReLU or max-pool branch relative to
//! the unperturbed pass straddles a kink, where the central difference does
//! not estimate the derivative; such probes are counted as `skipped`
//! instead of compared.

use rand::seq::index::sample;
use rand::Rng as _;

use super::{Layer, Mode, Param, Tensor};
use crate::error::Result;
use crate::models::Network;
use crate::seed;

pub const STEP: f64 = 1e-5;
pub const FLOOR: f64 = 1e-4;

/// Anything with a forward/backward pair and trainable parameters.
pub trait Differentiable {
    fn forward_mode(&mut self, x: &Tensor, mode: Mode) -> Result<Tensor>;
    fn backward_grad(&mut self, grad: &Tensor) -> Result<Tensor>;
    fn parameters_mut(&mut self) -> Vec<&mut Param>;
    fn fingerprints(&self) -> Vec<u64>;
}

impl Differentiable for Layer {
    fn forward_mode(&mut self, x: &Tensor, mode: Mode) -> Result<Tensor> {
        self.forward(x, mode)
    }
    fn backward_grad(&mut self, grad: &Tensor) -> Result<Tensor> {
        self.backward(grad)
    }
    fn parameters_mut(&mut self) -> Vec<&mut Param> {
        self.params_mut()
    }
    fn fingerprints(&self) -> Vec<u64> {
        self.branch_fingerprint().into_iter().collect()
    }
}

impl Differentiable for Network {
    fn forward_mode(&mut self, x: &Tensor, mode: Mode) -> Result<Tensor> {
        self.forward(x, mode)
    }
    fn backward_grad(&mut self, grad: &Tensor) -> Result<Tensor> {
        self.backward(grad)
    }
    fn parameters_mut(&mut self) -> Vec<&mut Param> {
        self.params_mut()
    }
    fn fingerprints(&self) -> Vec<u64> {
        self.branch_fingerprints()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    pub skipped: usize,
    pub max_rel_error: f64,
    /// Where the largest error occurred, e.g. `param 3[17]` or `input[5]`.
    pub worst: String,
}

impl GradCheckReport {
    fn record(&mut self, what: impl FnOnce() -> String, analytic: f64, numeric: f64) {
        self.checked += 1;
        let err = relative_error(analytic, numeric);
        if err > self.max_rel_error || self.worst.is_empty() {
            self.max_rel_error = err;
            self.worst = format!("{} analytic {analytic:e} numeric {numeric:e}", what());
        }
    }
}

pub fn relative_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(FLOOR)
}

fn probe_loss<D: Differentiable>(model: &mut D, x: &Tensor, r: &Tensor, mode: Mode) -> Result<(f64, Vec<u64>)> {
    let y = model.forward_mode(x, mode)?;
    Ok((y.data().iter().zip(r.data()).map(|(a, b)| a * b).sum(), model.fingerprints()))
}

fn pick(len: usize, max: usize, rng: &mut seed::Rng) -> Vec<usize> {
    if len <= max {
        (0..len).collect()
    } else {
        let mut v = sample(rng, len, max).into_vec();
        v.sort_unstable();
        v
    }
}

/// Compares analytic and numeric gradients (step [`STEP`]) for up to
/// `per_tensor` entries of every parameter tensor and `4 * per_tensor`
/// entries of the input.
pub fn check<D: Differentiable>(model: &mut D, x: &Tensor, mode: Mode, per_tensor: usize, seed: u64) -> Result<GradCheckReport> {
    check_with_step(model, x, mode, per_tensor, seed, STEP)
}

pub fn check_with_step<D: Differentiable>(
    model: &mut D,
    x: &Tensor,
    mode: Mode,
    per_tensor: usize,
    seed: u64,
    step: f64,
) -> Result<GradCheckReport> {
    let mut rng = seed::rng(seed::derive(seed, "gradcheck"));
    let y = model.forward_mode(x, mode)?;
    let r = Tensor::from_fn(y.shape(), |_| rng.gen_range(-1.0..1.0));
    let branches = model.fingerprints();
    let dx = model.backward_grad(&r)?;
    let param_grads: Vec<Tensor> = model.parameters_mut().iter().map(|p| p.grad.clone()).collect();

    let mut report = GradCheckReport {
        checked: 0,
        skipped: 0,
        max_rel_error: 0.0,
        worst: String::new(),
    };
    for (pi, grad) in param_grads.iter().enumerate() {
        for k in pick(grad.len(), per_tensor, &mut rng) {
            let original = model.parameters_mut()[pi].value.data()[k];
            model.parameters_mut()[pi].value.data_mut()[k] = original + step;
            let plus = probe_loss(model, x, &r, mode)?;
            model.parameters_mut()[pi].value.data_mut()[k] = original - step;
            let minus = probe_loss(model, x, &r, mode)?;
            model.parameters_mut()[pi].value.data_mut()[k] = original;
            if plus.1 != branches || minus.1 != branches {
                report.skipped += 1;
                continue;
            }
            report.record(|| format!("param {pi}[{k}]"), grad.data()[k], (plus.0 - minus.0) / (2.0 * step));
        }
    }
    let mut xp = x.clone();
    for k in pick(x.len(), per_tensor.max(1) * 4, &mut rng) {
        let original = x.data()[k];
        xp.data_mut()[k] = original + step;
        let plus = probe_loss(model, &xp, &r, mode)?;
        xp.data_mut()[k] = original - step;
        let minus = probe_loss(model, &xp, &r, mode)?;
        xp.data_mut()[k] = original;
        if plus.1 != branches || minus.1 != branches {
            report.skipped += 1;
            continue;
        }
        report.record(|| format!("input[{k}]"), dx.data()[k], (plus.0 - minus.0) / (2.0 * step));
    }
    Ok(report)
}
