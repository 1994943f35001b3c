use super::{missing_cache, Mode, Param};
use crate::error::{Error, Result};
use crate::nn::Tensor;

/// Per-channel batch normalization over every axis except the last.
///
/// Training mode normalizes with the batch statistics and folds them into the
/// running estimates as `running = momentum * running + (1 - momentum) * batch`
/// (the variance estimate uses the unbiased batch variance). Inference mode
/// uses the running estimates only.
#[derive(Debug, Clone)]
pub struct BatchNorm {
    pub gamma: Param,
    pub beta: Param,
    pub running_mean: Tensor,
    pub running_var: Tensor,
    pub momentum: f64,
    pub epsilon: f64,
    cache: Option<Cache>,
}

#[derive(Debug, Clone)]
struct Cache {
    x_hat: Vec<f64>,
    inv_std: Vec<f64>,
    mode: Mode,
    shape: Vec<usize>,
}

impl BatchNorm {
    pub fn new(channels: usize, momentum: f64, epsilon: f64) -> Self {
        Self {
            gamma: Param::new(Tensor::filled(&[channels], 1.0)),
            beta: Param::new(Tensor::zeros(&[channels])),
            running_mean: Tensor::zeros(&[channels]),
            running_var: Tensor::filled(&[channels], 1.0),
            momentum,
            epsilon,
            cache: None,
        }
    }

    fn channels(&self) -> usize {
        self.gamma.value.len()
    }

    pub fn forward(&mut self, x: &Tensor, mode: Mode) -> Result<Tensor> {
        let c = self.channels();
        if x.shape().last() != Some(&c) || x.shape().len() < 2 {
            return Err(Error::shape("batch norm channels", x.shape(), &[c]));
        }
        let rows = x.len() / c;
        let xd = x.data();

        let (mean, inv_std) = match mode {
            Mode::Train => {
                if x.batch() < 2 {
                    return Err(Error::InvalidArgument(
                        "batch norm in training mode needs a batch of at least 2".into(),
                    ));
                }
                // Shifted accumulation: exact for constant channels.
                let shift = &xd[..c];
                let mut sum = vec![0.0; c];
                let mut sum_sq = vec![0.0; c];
                for row in xd.chunks_exact(c) {
                    for ch in 0..c {
                        let d = row[ch] - shift[ch];
                        sum[ch] += d;
                        sum_sq[ch] += d * d;
                    }
                }
                let m = rows as f64;
                let mut mean = vec![0.0; c];
                let mut inv_std = vec![0.0; c];
                for ch in 0..c {
                    let md = sum[ch] / m;
                    let var = (sum_sq[ch] / m - md * md).max(0.0);
                    mean[ch] = shift[ch] + md;
                    inv_std[ch] = 1.0 / (var + self.epsilon).sqrt();
                    let unbiased = var * m / (m - 1.0).max(1.0);
                    let rm = &mut self.running_mean.data_mut()[ch];
                    *rm = self.momentum * *rm + (1.0 - self.momentum) * mean[ch];
                    let rv = &mut self.running_var.data_mut()[ch];
                    *rv = self.momentum * *rv + (1.0 - self.momentum) * unbiased;
                }
                (mean, inv_std)
            }
            Mode::Infer => (
                self.running_mean.data().to_vec(),
                self.running_var
                    .data()
                    .iter()
                    .map(|v| 1.0 / (v + self.epsilon).sqrt())
                    .collect(),
            ),
        };

        let g = self.gamma.value.data();
        let b = self.beta.value.data();
        let mut x_hat = vec![0.0; xd.len()];
        let mut out = vec![0.0; xd.len()];
        for (i, v) in xd.iter().enumerate() {
            let ch = i % c;
            let h = (v - mean[ch]) * inv_std[ch];
            x_hat[i] = h;
            out[i] = g[ch] * h + b[ch];
        }
        self.cache = Some(Cache {
            x_hat,
            inv_std,
            mode,
            shape: x.shape().to_vec(),
        });
        Tensor::new(x.shape().to_vec(), out)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        let cache = self.cache.as_ref().ok_or_else(|| missing_cache("batch norm"))?;
        if grad.shape() != cache.shape.as_slice() {
            return Err(Error::shape("batch norm backward", grad.shape(), &cache.shape));
        }
        let c = self.channels();
        let gd = grad.data();
        let gamma = self.gamma.value.data();
        let mut dgamma = vec![0.0; c];
        let mut dbeta = vec![0.0; c];
        for (i, g) in gd.iter().enumerate() {
            dgamma[i % c] += g * cache.x_hat[i];
            dbeta[i % c] += g;
        }
        let mut gx = vec![0.0; gd.len()];
        match cache.mode {
            Mode::Infer => {
                for (i, g) in gd.iter().enumerate() {
                    let ch = i % c;
                    gx[i] = g * gamma[ch] * cache.inv_std[ch];
                }
            }
            Mode::Train => {
                // dx = inv_std / m * (m * dxh - sum(dxh) - x_hat * sum(dxh * x_hat)),
                // where dxh = gamma * g; the sums equal gamma * dbeta and gamma * dgamma.
                let m = (gd.len() / c) as f64;
                for (i, g) in gd.iter().enumerate() {
                    let ch = i % c;
                    let dxh = g * gamma[ch];
                    gx[i] = cache.inv_std[ch] / m
                        * (m * dxh
                            - gamma[ch] * dbeta[ch]
                            - cache.x_hat[i] * gamma[ch] * dgamma[ch]);
                }
            }
        }
        self.gamma.grad = Tensor::new(vec![c], dgamma)?;
        self.beta.grad = Tensor::new(vec![c], dbeta)?;
        Tensor::new(cache.shape.clone(), gx)
    }

    pub fn clear_cache(&mut self) {
        self.cache = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bn(c: usize) -> BatchNorm {
        BatchNorm::new(c, 0.99, 1e-3)
    }

    #[test]
    fn train_output_is_standardized() {
        let x = Tensor::from_fn(&[4, 3, 3, 2], |i| ((i * 7919) % 31) as f64 * 0.3 - 2.0);
        let y = bn(2).forward(&x, Mode::Train).unwrap();
        for ch in 0..2 {
            let vals: Vec<f64> = y.data().iter().skip(ch).step_by(2).copied().collect();
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            let v = vals.iter().map(|a| (a - m).powi(2)).sum::<f64>() / vals.len() as f64;
            assert!(m.abs() < 1e-6);
            // epsilon shrinks the variance slightly below 1
            assert!((v - 1.0).abs() < 1e-3, "{v}");
        }
    }

    #[test]
    fn standardized_batch_passes_through() {
        let x = Tensor::new(vec![4, 1], vec![-1.0, 1.0, -1.0, 1.0]).unwrap();
        let y = bn(1).forward(&x, Mode::Train).unwrap();
        let s = 1.0 / (1.0f64 + 1e-3).sqrt();
        for (a, b) in x.data().iter().zip(y.data()) {
            assert!((a * s - b).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_channel_outputs_beta() {
        let mut layer = bn(2);
        layer.beta.value = Tensor::new(vec![2], vec![0.25, -3.0]).unwrap();
        let x = Tensor::from_fn(&[3, 2, 2, 2], |i| if i % 2 == 0 { 0.1 } else { 7.3 });
        let y = layer.forward(&x, Mode::Train).unwrap();
        for (i, v) in y.data().iter().enumerate() {
            assert_eq!(*v, [0.25, -3.0][i % 2]);
        }
    }

    #[test]
    fn single_sample_rejected_in_training() {
        assert!(bn(1).forward(&Tensor::zeros(&[1, 2, 2, 1]), Mode::Train).is_err());
        assert!(bn(1).forward(&Tensor::zeros(&[1, 2, 2, 1]), Mode::Infer).is_ok());
    }

    #[test]
    fn running_stats_update() {
        let mut layer = bn(1);
        let x = Tensor::new(vec![2, 1], vec![1.0, 3.0]).unwrap();
        layer.forward(&x, Mode::Train).unwrap();
        assert!((layer.running_mean.data()[0] - 0.02).abs() < 1e-15);
        // unbiased variance of {1, 3} is 2
        assert!((layer.running_var.data()[0] - (0.99 + 0.01 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn inference_is_deterministic_affine() {
        let mut layer = bn(2);
        layer.running_mean = Tensor::new(vec![2], vec![0.5, -0.5]).unwrap();
        layer.running_var = Tensor::new(vec![2], vec![4.0, 0.25]).unwrap();
        let x = Tensor::from_fn(&[2, 2, 2, 2], |i| i as f64 * 0.1);
        let a = layer.forward(&x, Mode::Infer).unwrap();
        let b = layer.forward(&x, Mode::Infer).unwrap();
        assert_eq!(a, b);
    }
}
