//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use ocular_core::nn::Tensor;

/// Direct nested-loop "same"-padded cross-correlation over NHWC input and
/// `[k, k, in, out]` weights.
pub fn naive_conv2d(x: &Tensor, w: &Tensor, b: &Tensor, stride: usize) -> Tensor {
    let s = x.shape();
    let (n, h, wd, cin) = (s[0], s[1], s[2], s[3]);
    let k = w.shape()[0];
    let cout = w.shape()[3];
    let oh = (h + stride - 1) / stride;
    let ow = (wd + stride - 1) / stride;
    let pad_h = ((oh - 1) * stride + k).saturating_sub(h) / 2;
    let pad_w = ((ow - 1) * stride + k).saturating_sub(wd) / 2;
    let xd = x.data();
    let wdata = w.data();
    let mut out = vec![0.0; n * oh * ow * cout];
    for bi in 0..n {
        for oy in 0..oh {
            for ox in 0..ow {
                for co in 0..cout {
                    let mut acc = b.data()[co];
                    for ky in 0..k {
                        for kx in 0..k {
                            let iy = (oy * stride + ky) as isize - pad_h as isize;
                            let ix = (ox * stride + kx) as isize - pad_w as isize;
                            if iy < 0 || ix < 0 || iy >= h as isize || ix >= wd as isize {
                                continue;
                            }
                            for ci in 0..cin {
                                let xv = xd[((bi * h + iy as usize) * wd + ix as usize) * cin + ci];
                                let wv = wdata[((ky * k + kx) * cin + ci) * cout + co];
                                acc += xv * wv;
                            }
                        }
                    }
                    out[((bi * oh + oy) * ow + ox) * cout + co] = acc;
                }
            }
        }
    }
    Tensor::new(vec![n, oh, ow, cout], out).unwrap()
}

/// Direct nested-loop depthwise convolution with `[k, k, c]` weights.
pub fn naive_depthwise(x: &Tensor, w: &Tensor, b: &Tensor, stride: usize) -> Tensor {
    let s = x.shape();
    let (n, h, wd, c) = (s[0], s[1], s[2], s[3]);
    let k = w.shape()[0];
    let oh = (h + stride - 1) / stride;
    let ow = (wd + stride - 1) / stride;
    let pad_h = ((oh - 1) * stride + k).saturating_sub(h) / 2;
    let pad_w = ((ow - 1) * stride + k).saturating_sub(wd) / 2;
    let mut out = vec![0.0; n * oh * ow * c];
    for bi in 0..n {
        for oy in 0..oh {
            for ox in 0..ow {
                for ch in 0..c {
                    let mut acc = b.data()[ch];
                    for ky in 0..k {
                        for kx in 0..k {
                            let iy = (oy * stride + ky) as isize - pad_h as isize;
                            let ix = (ox * stride + kx) as isize - pad_w as isize;
                            if iy < 0 || ix < 0 || iy >= h as isize || ix >= wd as isize {
                                continue;
                            }
                            acc += x.data()[((bi * h + iy as usize) * wd + ix as usize) * c + ch]
                                * w.data()[(ky * k + kx) * c + ch];
                        }
                    }
                    out[((bi * oh + oy) * ow + ox) * c + ch] = acc;
                }
            }
        }
    }
    Tensor::new(vec![n, oh, ow, c], out).unwrap()
}

/// Textbook scalar Adam.
pub struct ScalarAdam {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: f64,
    v: f64,
    t: i32,
}

impl ScalarAdam {
    pub fn new(alpha: f64, beta1: f64, beta2: f64, eps: f64) -> Self {
        Self { alpha, beta1, beta2, eps, m: 0.0, v: 0.0, t: 0 }
    }

    pub fn step(&mut self, x: f64, g: f64) -> f64 {
        self.t += 1;
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * g;
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * g * g;
        let mh = self.m / (1.0 - self.beta1.powi(self.t));
        let vh = self.v / (1.0 - self.beta2.powi(self.t));
        x - self.alpha * mh / (vh.sqrt() + self.eps)
    }
}

fn mean(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for v in x {
        s += v;
    }
    s / x.len() as f64
}

pub fn oracle_rmse(p: &[f64], t: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        s += (p[i] - t[i]).powi(2);
    }
    (s / p.len() as f64).sqrt()
}

/// Two-pass sample correlation: Σ(dp·dt) / sqrt(Σdp² · Σdt²).
pub fn oracle_pearson(p: &[f64], t: &[f64]) -> f64 {
    let (mp, mt) = (mean(p), mean(t));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..p.len() {
        sxy += (p[i] - mp) * (t[i] - mt);
        sxx += (p[i] - mp).powi(2);
        syy += (t[i] - mt).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn oracle_ccc(p: &[f64], t: &[f64]) -> f64 {
    let n = p.len() as f64;
    let (mp, mt) = (mean(p), mean(t));
    let (mut cov, mut vp, mut vt) = (0.0, 0.0, 0.0);
    for i in 0..p.len() {
        cov += (p[i] - mp) * (t[i] - mt);
        vp += (p[i] - mp).powi(2);
        vt += (t[i] - mt).powi(2);
    }
    2.0 * (cov / n) / (vp / n + vt / n + (mp - mt).powi(2))
}

pub fn oracle_sagr(p: &[f64], t: &[f64]) -> f64 {
    let sgn = |v: f64| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 };
    let mut agree = 0;
    for i in 0..p.len() {
        if sgn(p[i]) == sgn(t[i]) {
            agree += 1;
        }
    }
    agree as f64 / p.len() as f64
}
