use super::{missing_cache, Mode};
use crate::error::{Error, Result};
use crate::nn::Tensor;

#[derive(Debug, Clone, Default)]
pub struct Relu {
    mask: Option<Vec<bool>>,
}

impl Relu {
    pub fn forward(&mut self, x: &Tensor, _mode: Mode) -> Result<Tensor> {
        self.mask = Some(x.data().iter().map(|v| *v > 0.0).collect());
        Ok(x.map(|v| v.max(0.0)))
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        let mask = self.mask.as_ref().ok_or_else(|| missing_cache("relu"))?;
        if mask.len() != grad.len() {
            return Err(Error::shape("relu backward", grad.shape(), &[mask.len()]));
        }
        let data = grad
            .data()
            .iter()
            .zip(mask)
            .map(|(g, m)| if *m { *g } else { 0.0 })
            .collect();
        Tensor::new(grad.shape().to_vec(), data)
    }

    pub fn clear_cache(&mut self) {
        self.mask = None;
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }
}

/// Output extent of a 2×2/stride-2 pool: odd extents floor, and an extent of
/// one passes through unchanged (the window is clipped to the single row).
pub fn pooled_extent(n: usize) -> usize {
    if n >= 2 {
        n / 2
    } else {
        n
    }
}

#[derive(Debug, Clone, Default)]
pub struct MaxPool2 {
    cache: Option<(Vec<usize>, Vec<usize>)>,
}

impl MaxPool2 {
    pub fn forward(&mut self, x: &Tensor, _mode: Mode) -> Result<Tensor> {
        let (n, h, w, c) = x.dims4()?;
        let (oh, ow) = (pooled_extent(h), pooled_extent(w));
        let xd = x.data();
        let mut out = Vec::with_capacity(n * oh * ow * c);
        let mut argmax = Vec::with_capacity(n * oh * ow * c);
        for b in 0..n {
            for oy in 0..oh {
                for ox in 0..ow {
                    for ch in 0..c {
                        let mut best = f64::NEG_INFINITY;
                        let mut best_i = 0;
                        for iy in 2 * oy..(2 * oy + 2).min(h) {
                            for ix in 2 * ox..(2 * ox + 2).min(w) {
                                let i = ((b * h + iy) * w + ix) * c + ch;
                                if xd[i] > best {
                                    best = xd[i];
                                    best_i = i;
                                }
                            }
                        }
                        out.push(best);
                        argmax.push(best_i);
                    }
                }
            }
        }
        self.cache = Some((argmax, x.shape().to_vec()));
        Tensor::new(vec![n, oh, ow, c], out)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        let (argmax, shape) = self.cache.as_ref().ok_or_else(|| missing_cache("max pool"))?;
        if argmax.len() != grad.len() {
            return Err(Error::shape("max pool backward", grad.shape(), &[argmax.len()]));
        }
        let mut gx = Tensor::zeros(shape);
        for (g, i) in grad.data().iter().zip(argmax) {
            gx.data_mut()[*i] += g;
        }
        Ok(gx)
    }

    pub fn clear_cache(&mut self) {
        self.cache = None;
    }

    pub fn argmax(&self) -> Option<&[usize]> {
        self.cache.as_ref().map(|(a, _)| a.as_slice())
    }
}

#[derive(Debug, Clone, Default)]
pub struct GlobalAvgPool {
    shape: Option<Vec<usize>>,
}

impl GlobalAvgPool {
    pub fn forward(&mut self, x: &Tensor, _mode: Mode) -> Result<Tensor> {
        let (n, h, w, c) = x.dims4()?;
        let area = (h * w) as f64;
        let mut out = vec![0.0; n * c];
        for (b, sample) in x.data().chunks_exact(h * w * c).enumerate() {
            for px in sample.chunks_exact(c) {
                for (o, v) in out[b * c..(b + 1) * c].iter_mut().zip(px) {
                    *o += v;
                }
            }
        }
        for v in out.iter_mut() {
            *v /= area;
        }
        self.shape = Some(x.shape().to_vec());
        Tensor::new(vec![n, c], out)
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        let shape = self.shape.as_ref().ok_or_else(|| missing_cache("global avg pool"))?;
        let (n, h, w, c) = (shape[0], shape[1], shape[2], shape[3]);
        if grad.shape() != [n, c] {
            return Err(Error::shape("global avg pool backward", grad.shape(), &[n, c]));
        }
        let area = (h * w) as f64;
        let gd = grad.data();
        Ok(Tensor::from_fn(shape, |i| {
            let b = i / (h * w * c);
            gd[b * c + i % c] / area
        }))
    }

    pub fn clear_cache(&mut self) {
        self.shape = None;
    }
}

#[derive(Debug, Clone, Default)]
pub struct Flatten {
    shape: Option<Vec<usize>>,
}

impl Flatten {
    pub fn forward(&mut self, x: &Tensor, _mode: Mode) -> Result<Tensor> {
        let n = x.batch();
        self.shape = Some(x.shape().to_vec());
        x.clone().reshape(&[n, x.len() / n.max(1)])
    }

    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        let shape = self.shape.as_ref().ok_or_else(|| missing_cache("flatten"))?;
        grad.clone().reshape(shape)
    }

    pub fn clear_cache(&mut self) {
        self.shape = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relu_values_and_gradient() {
        let mut r = Relu::default();
        let y = r.forward(&Tensor::new(vec![2], vec![-1.0, 2.0]).unwrap(), Mode::Train).unwrap();
        assert_eq!(y.data(), &[0.0, 2.0]);
        let g = r.backward(&Tensor::new(vec![2], vec![5.0, 7.0]).unwrap()).unwrap();
        assert_eq!(g.data(), &[0.0, 7.0]);
    }

    #[test]
    fn maxpool_basic() {
        let mut p = MaxPool2::default();
        let x = Tensor::new(vec![1, 2, 2, 1], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = p.forward(&x, Mode::Train).unwrap();
        assert_eq!(y.shape(), &[1, 1, 1, 1]);
        assert_eq!(y.data(), &[4.0]);
        let g = p.backward(&Tensor::filled(&[1, 1, 1, 1], 1.0)).unwrap();
        assert_eq!(g.data(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn maxpool_extents() {
        assert_eq!(pooled_extent(170), 85);
        assert_eq!(pooled_extent(85), 42);
        assert_eq!(pooled_extent(3), 1);
        assert_eq!(pooled_extent(1), 1);
        let mut p = MaxPool2::default();
        let x = Tensor::from_fn(&[1, 1, 5, 1], |i| i as f64);
        let y = p.forward(&x, Mode::Train).unwrap();
        assert_eq!(y.shape(), &[1, 1, 2, 1]);
        assert_eq!(y.data(), &[1.0, 3.0]);
    }

    #[test]
    fn global_avg_of_constant() {
        let mut p = GlobalAvgPool::default();
        let x = Tensor::from_fn(&[2, 3, 4, 2], |i| if i % 2 == 0 { 1.5 } else { -2.0 });
        let y = p.forward(&x, Mode::Train).unwrap();
        assert_eq!(y.shape(), &[2, 2]);
        assert_eq!(y.data(), &[1.5, -2.0, 1.5, -2.0]);
    }

    #[test]
    fn flatten_is_row_major() {
        let mut f = Flatten::default();
        let x = Tensor::from_fn(&[2, 2, 2, 3], |i| i as f64);
        let y = f.forward(&x, Mode::Train).unwrap();
        assert_eq!(y.shape(), &[2, 12]);
        assert_eq!(y.data(), x.data());
        assert_eq!(f.backward(&y).unwrap(), x);
    }
}
