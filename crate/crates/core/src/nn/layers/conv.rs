use super::{missing_cache, Mode, Param};
use crate::error::{Error, Result};
use crate::nn::Tensor;

/// "Same" padding: output extent `ceil(n / stride)` and the number of zero
/// rows added before the input (the remainder goes after).
pub fn same_padding(n: usize, kernel: usize, stride: usize) -> (usize, usize) {
    let out = n.div_ceil(stride);
    let total = ((out - 1) * stride + kernel).saturating_sub(n);
    (out, total / 2)
}

/// Cross-correlation with `[k, k, in, out]` weights, "same" padding.
#[derive(Debug, Clone)]
pub struct Conv2d {
    pub weight: Param,
    pub bias: Param,
    pub stride: usize,
    input: Option<Tensor>,
}

impl Conv2d {
    pub fn new(weight: Tensor, bias: Tensor, stride: usize) -> Result<Self> {
        let s = weight.shape();
        if s.len() != 4 || s[0] != s[1] || bias.shape() != [s[3]] {
            return Err(Error::shape("conv2d parameters", s, bias.shape()));
        }
        Ok(Self {
            weight: Param::new(weight),
            bias: Param::new(bias),
            stride,
            input: None,
        })
    }

    fn dims(&self) -> (usize, usize, usize) {
        let s = self.weight.value.shape();
        (s[0], s[2], s[3])
    }

    pub fn forward(&mut self, x: &Tensor, _mode: Mode) -> Result<Tensor> {
        let (n, h, w, c) = x.dims4()?;
        let (k, cin, cout) = self.dims();
        if c != cin {
            return Err(Error::shape("conv2d input channels", x.shape(), self.weight.value.shape()));
        }
        let (oh, pt) = same_padding(h, k, self.stride);
        let (ow, pl) = same_padding(w, k, self.stride);
        let mut out = vec![0.0; n * oh * ow * cout];
        let xd = x.data();
        let wd = self.weight.value.data();
        let bd = self.bias.value.data();
        for b in 0..n {
            for oy in 0..oh {
                for ox in 0..ow {
                    let o_base = ((b * oh + oy) * ow + ox) * cout;
                    let orow = &mut out[o_base..o_base + cout];
                    orow.copy_from_slice(bd);
                    for ky in 0..k {
                        let iy = (oy * self.stride + ky) as isize - pt as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for kx in 0..k {
                            let ix = (ox * self.stride + kx) as isize - pl as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let x_base = ((b * h + iy as usize) * w + ix as usize) * cin;
                            let w_base = (ky * k + kx) * cin * cout;
                            for i in 0..cin {
                                let xv = xd[x_base + i];
                                if xv == 0.0 {
                                    continue;
                                }
                                let wrow = &wd[w_base + i * cout..w_base + (i + 1) * cout];
                                for (o, wv) in orow.iter_mut().zip(wrow) {
                                    *o += xv * wv;
                                }
                            }
                        }
                    }
                }
            }
        }
        self.input = Some(x.clone());
        Tensor::new(vec![n, oh, ow, cout], out)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        let x = self.input.as_ref().ok_or_else(|| missing_cache("conv2d"))?;
        let (n, h, w, cin) = x.dims4()?;
        let (k, _, cout) = self.dims();
        let (oh, pt) = same_padding(h, k, self.stride);
        let (ow, pl) = same_padding(w, k, self.stride);
        if grad.shape() != [n, oh, ow, cout] {
            return Err(Error::shape("conv2d backward", grad.shape(), &[n, oh, ow, cout]));
        }
        let xd = x.data();
        let gd = grad.data();
        let wd = self.weight.value.data();
        let mut gx = vec![0.0; xd.len()];
        let mut gw = vec![0.0; wd.len()];
        let mut gb = vec![0.0; cout];
        for b in 0..n {
            for oy in 0..oh {
                for ox in 0..ow {
                    let g_base = ((b * oh + oy) * ow + ox) * cout;
                    let grow = &gd[g_base..g_base + cout];
                    for (acc, g) in gb.iter_mut().zip(grow) {
                        *acc += g;
                    }
                    for ky in 0..k {
                        let iy = (oy * self.stride + ky) as isize - pt as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for kx in 0..k {
                            let ix = (ox * self.stride + kx) as isize - pl as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let x_base = ((b * h + iy as usize) * w + ix as usize) * cin;
                            let w_base = (ky * k + kx) * cin * cout;
                            for i in 0..cin {
                                let xv = xd[x_base + i];
                                let wr = w_base + i * cout..w_base + (i + 1) * cout;
                                let mut s = 0.0;
                                for ((gwv, wv), g) in gw[wr.clone()].iter_mut().zip(&wd[wr]).zip(grow) {
                                    *gwv += xv * g;
                                    s += wv * g;
                                }
                                gx[x_base + i] += s;
                            }
                        }
                    }
                }
            }
        }
        self.weight.grad = Tensor::new(self.weight.value.shape().to_vec(), gw)?;
        self.bias.grad = Tensor::new(vec![cout], gb)?;
        Tensor::new(x.shape().to_vec(), gx)
    }

    pub fn clear_cache(&mut self) {
        self.input = None;
    }
}

/// Per-channel 3×3 convolution with `[k, k, c]` weights, "same" padding.
#[derive(Debug, Clone)]
pub struct DepthwiseConv2d {
    pub weight: Param,
    pub bias: Param,
    pub stride: usize,
    input: Option<Tensor>,
}

impl DepthwiseConv2d {
    pub fn new(weight: Tensor, bias: Tensor, stride: usize) -> Result<Self> {
        let s = weight.shape();
        if s.len() != 3 || s[0] != s[1] || bias.shape() != [s[2]] {
            return Err(Error::shape("depthwise parameters", s, bias.shape()));
        }
        Ok(Self {
            weight: Param::new(weight),
            bias: Param::new(bias),
            stride,
            input: None,
        })
    }

    pub fn forward(&mut self, x: &Tensor, _mode: Mode) -> Result<Tensor> {
        let (n, h, w, c) = x.dims4()?;
        let ws = self.weight.value.shape();
        let k = ws[0];
        if ws[2] != c {
            return Err(Error::shape("depthwise kernel count", x.shape(), ws));
        }
        let (oh, pt) = same_padding(h, k, self.stride);
        let (ow, pl) = same_padding(w, k, self.stride);
        let xd = x.data();
        let wd = self.weight.value.data();
        let mut out = vec![0.0; n * oh * ow * c];
        for b in 0..n {
            for oy in 0..oh {
                for ox in 0..ow {
                    let o_base = ((b * oh + oy) * ow + ox) * c;
                    let orow = &mut out[o_base..o_base + c];
                    orow.copy_from_slice(self.bias.value.data());
                    for ky in 0..k {
                        let iy = (oy * self.stride + ky) as isize - pt as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for kx in 0..k {
                            let ix = (ox * self.stride + kx) as isize - pl as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let x_base = ((b * h + iy as usize) * w + ix as usize) * c;
                            let w_base = (ky * k + kx) * c;
                            for ((o, xv), wv) in orow
                                .iter_mut()
                                .zip(&xd[x_base..x_base + c])
                                .zip(&wd[w_base..w_base + c])
                            {
                                *o += xv * wv;
                            }
                        }
                    }
                }
            }
        }
        self.input = Some(x.clone());
        Tensor::new(vec![n, oh, ow, c], out)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        let x = self.input.as_ref().ok_or_else(|| missing_cache("depthwise"))?;
        let (n, h, w, c) = x.dims4()?;
        let k = self.weight.value.shape()[0];
        let (oh, pt) = same_padding(h, k, self.stride);
        let (ow, pl) = same_padding(w, k, self.stride);
        if grad.shape() != [n, oh, ow, c] {
            return Err(Error::shape("depthwise backward", grad.shape(), &[n, oh, ow, c]));
        }
        let xd = x.data();
        let gd = grad.data();
        let wd = self.weight.value.data();
        let mut gx = vec![0.0; xd.len()];
        let mut gw = vec![0.0; wd.len()];
        let mut gb = vec![0.0; c];
        for b in 0..n {
            for oy in 0..oh {
                for ox in 0..ow {
                    let g_base = ((b * oh + oy) * ow + ox) * c;
                    let grow = &gd[g_base..g_base + c];
                    for (acc, g) in gb.iter_mut().zip(grow) {
                        *acc += g;
                    }
                    for ky in 0..k {
                        let iy = (oy * self.stride + ky) as isize - pt as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for kx in 0..k {
                            let ix = (ox * self.stride + kx) as isize - pl as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let x_base = ((b * h + iy as usize) * w + ix as usize) * c;
                            let w_base = (ky * k + kx) * c;
                            for ch in 0..c {
                                let g = grow[ch];
                                gw[w_base + ch] += xd[x_base + ch] * g;
                                gx[x_base + ch] += wd[w_base + ch] * g;
                            }
                        }
                    }
                }
            }
        }
        self.weight.grad = Tensor::new(self.weight.value.shape().to_vec(), gw)?;
        self.bias.grad = Tensor::new(vec![c], gb)?;
        Tensor::new(x.shape().to_vec(), gx)
    }

    pub fn clear_cache(&mut self) {
        self.input = None;
    }
}
