use super::{missing_cache, Mode, Param};
use crate::error::{Error, Result};
use crate::nn::Tensor;

/// Fully connected layer, `y = x W + b` with `W: [in, out]`.
#[derive(Debug, Clone)]
pub struct Dense {
    pub weight: Param,
    pub bias: Param,
    input: Option<Tensor>,
}

impl Dense {
    pub fn new(weight: Tensor, bias: Tensor) -> Result<Self> {
        let s = weight.shape();
        if s.len() != 2 || bias.shape() != [s[1]] {
            return Err(Error::shape("dense parameters", s, bias.shape()));
        }
        Ok(Self {
            weight: Param::new(weight),
            bias: Param::new(bias),
            input: None,
        })
    }

    pub fn forward(&mut self, x: &Tensor, _mode: Mode) -> Result<Tensor> {
        let (n, fin) = x.dims2()?;
        let ws = self.weight.value.shape();
        let (win, fout) = (ws[0], ws[1]);
        if fin != win {
            return Err(Error::shape("dense input", x.shape(), ws));
        }
        let wd = self.weight.value.data();
        let mut out = Vec::with_capacity(n * fout);
        for row in x.data().chunks_exact(fin) {
            let mut acc = self.bias.value.data().to_vec();
            for (i, xv) in row.iter().enumerate() {
                if *xv == 0.0 {
                    continue;
                }
                for (a, w) in acc.iter_mut().zip(&wd[i * fout..(i + 1) * fout]) {
                    *a += xv * w;
                }
            }
            out.extend(acc);
        }
        self.input = Some(x.clone());
        Tensor::new(vec![n, fout], out)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        let x = self.input.as_ref().ok_or_else(|| missing_cache("dense"))?;
        let (n, fin) = x.dims2()?;
        let fout = self.weight.value.shape()[1];
        if grad.shape() != [n, fout] {
            return Err(Error::shape("dense backward", grad.shape(), &[n, fout]));
        }
        let wd = self.weight.value.data();
        let mut gw = vec![0.0; fin * fout];
        let mut gb = vec![0.0; fout];
        let mut gx = vec![0.0; n * fin];
        for (b, (xrow, grow)) in x
            .data()
            .chunks_exact(fin)
            .zip(grad.data().chunks_exact(fout))
            .enumerate()
        {
            for (acc, g) in gb.iter_mut().zip(grow) {
                *acc += g;
            }
            for i in 0..fin {
                let wrow = &wd[i * fout..(i + 1) * fout];
                let gwrow = &mut gw[i * fout..(i + 1) * fout];
                let mut s = 0.0;
                for ((gwv, wv), g) in gwrow.iter_mut().zip(wrow).zip(grow) {
                    *gwv += xrow[i] * g;
                    s += wv * g;
                }
                gx[b * fin + i] = s;
            }
        }
        self.weight.grad = Tensor::new(vec![fin, fout], gw)?;
        self.bias.grad = Tensor::new(vec![fout], gb)?;
        Tensor::new(vec![n, fin], gx)
    }

    pub fn clear_cache(&mut self) {
        self.input = None;
    }
}
