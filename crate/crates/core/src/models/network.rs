use super::{build_architecture, Architecture, ModelConfig};
use crate::error::{Error, Result};
use crate::nn::{Layer, Mode, Param, Tensor};
use crate::seed;

/// An architecture with allocated parameters.
#[derive(Debug, Clone)]
pub struct Network {
    arch: Architecture,
    layers: Vec<Layer>,
}

impl Network {
    /// Builds and initializes `config`; the same seed always yields the same
    /// initial parameters.
    pub fn build(config: &ModelConfig, seed: u64) -> Result<Self> {
        Self::from_architecture(build_architecture(config)?, seed)
    }

    pub fn from_architecture(arch: Architecture, seed: u64) -> Result<Self> {
        let mut rng = seed::rng(seed::derive(seed, "init"));
        let layers = arch
            .layers
            .iter()
            .zip(&arch.shapes)
            .map(|(spec, shape)| Layer::init(spec, shape, &mut rng))
            .collect::<Result<_>>()?;
        Ok(Self { arch, layers })
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn config(&self) -> &ModelConfig {
        &self.arch.config
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|p| p.value.len()).sum()
    }

    /// Expected `[height, width, channels]` of one input sample.
    pub fn input_shape(&self) -> &[usize] {
        &self.arch.shapes[0]
    }

    pub fn forward(&mut self, x: &Tensor, mode: Mode) -> Result<Tensor> {
        if x.shape().len() != 4 || x.shape()[1..] != *self.input_shape() {
            let mut want = vec![0];
            want.extend_from_slice(self.input_shape());
            return Err(Error::shape("network input", x.shape(), &want));
        }
        let mut h = x.clone();
        for layer in &mut self.layers {
            h = layer.forward(&h, mode)?;
        }
        Ok(h)
    }

    /// Back-propagates `grad` (shaped like the last output), filling every
    /// parameter gradient, and returns the gradient with respect to the input.
    pub fn backward(&mut self, grad: &Tensor) -> Result<Tensor> {
        let mut g = grad.clone();
        for layer in self.layers.iter_mut().rev() {
            g = layer.backward(&g)?;
        }
        Ok(g)
    }

    pub fn params(&self) -> Vec<&Param> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param> {
        self.layers.iter_mut().flat_map(|l| l.params_mut()).collect()
    }

    pub fn buffers(&self) -> Vec<&Tensor> {
        self.layers.iter().flat_map(|l| l.buffers()).collect()
    }

    pub fn buffers_mut(&mut self) -> Vec<&mut Tensor> {
        self.layers.iter_mut().flat_map(|l| l.buffers_mut()).collect()
    }

    /// `(layer name, L2 norm of its parameters)` for each parameterized layer.
    pub fn layer_norms(&self) -> Vec<(String, f64)> {
        self.layers
            .iter()
            .zip(&self.arch.layers)
            .enumerate()
            .filter(|(_, (l, _))| !l.params().is_empty())
            .map(|(i, (l, spec))| {
                let sq: f64 = l.params().iter().map(|p| p.value.norm().powi(2)).sum();
                (format!("{i}:{}", spec.name()), sq.sqrt())
            })
            .collect()
    }

    /// Branch fingerprints of every piecewise-linear layer, in order.
    pub fn branch_fingerprints(&self) -> Vec<u64> {
        self.layers.iter().filter_map(|l| l.branch_fingerprint()).collect()
    }

    pub fn clear_caches(&mut self) {
        for l in &mut self.layers {
            l.clear_cache();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelId;

    #[test]
    fn desk_models_output_two_units() {
        for id in [ModelId::M1, ModelId::M2, ModelId::M3] {
            let mut net = Network::build(&ModelConfig::desk(id), 1).unwrap();
            let x = Tensor::from_fn(&[3, 24, 64, 3], |i| ((i * 31) % 17) as f64 / 17.0);
            let y = net.forward(&x, Mode::Train).unwrap();
            assert_eq!(y.shape(), &[3, 2], "{id}");
            assert_eq!(net.param_count(), net.architecture().param_count());
        }
    }

    #[test]
    fn same_seed_same_init() {
        let a = Network::build(&ModelConfig::desk(ModelId::M3), 9).unwrap();
        let b = Network::build(&ModelConfig::desk(ModelId::M3), 9).unwrap();
        let c = Network::build(&ModelConfig::desk(ModelId::M3), 10).unwrap();
        let vals = |n: &Network| n.params().iter().flat_map(|p| p.value.data().to_vec()).collect::<Vec<_>>();
        assert_eq!(vals(&a), vals(&b));
        assert_ne!(vals(&a), vals(&c));
    }

    #[test]
    fn wrong_input_shape() {
        let mut net = Network::build(&ModelConfig::desk(ModelId::M1), 1).unwrap();
        assert!(net.forward(&Tensor::zeros(&[1, 24, 63, 3]), Mode::Infer).is_err());
    }
}
