//! Binary checkpoint container.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! magic        8 bytes   "OCAFCKPT"
//! version      u32       currently 1
//! manifest_len u32
//! manifest     UTF-8 JSON: {"config": ModelConfig, "layers": [LayerSpec],
//!                           "params": [[dims]], "buffers": [[dims]]}
//! params       f64 × Σ prod(dims), each parameter tensor in manifest order
//! buffers      f64 × Σ prod(dims) (batch-norm running mean, running var)
//! has_adam     u8        0 or 1
//! if has_adam:
//!   step       u64
//!   alpha, beta1, beta2, epsilon   f64 × 4
//!   n_moments  u32       0 before the first step, else the parameter count
//!   m          f64 tensors, shapes as params
//!   v          f64 tensors, shapes as params
//! ```
//!
//! A file must end exactly after the last field.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_architecture, ModelConfig, Network};
use crate::error::{Error, Result};
use crate::nn::{Adam, AdamConfig, LayerSpec, Tensor};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"OCAFCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Manifest {
    config: ModelConfig,
    layers: Vec<LayerSpec>,
    params: Vec<Vec<usize>>,
    buffers: Vec<Vec<usize>>,
}

fn io_err(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Checkpoint("truncated checkpoint".into())
    } else {
        Error::Checkpoint(e.to_string())
    }
}

fn put_tensor<W: Write>(w: &mut W, t: &Tensor) -> Result<()> {
    let mut buf = Vec::with_capacity(t.len() * 8);
    for v in t.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err)
}

fn get_tensor<R: Read>(r: &mut R, shape: &[usize]) -> Result<Tensor> {
    let n: usize = shape.iter().product();
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf).map_err(io_err)?;
    let data = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Tensor::new(shape.to_vec(), data)
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(u32::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(get_u64(r)?))
}

pub fn write_checkpoint<W: Write>(mut w: W, net: &Network, adam: Option<&Adam>) -> Result<()> {
    let arch = net.architecture();
    let manifest = Manifest {
        config: arch.config,
        layers: arch.layers.clone(),
        params: net.params().iter().map(|p| p.value.shape().to_vec()).collect(),
        buffers: net.buffers().iter().map(|b| b.shape().to_vec()).collect(),
    };
    let json = serde_json::to_vec(&manifest).map_err(|e| Error::Checkpoint(e.to_string()))?;
    w.write_all(CHECKPOINT_MAGIC).map_err(io_err)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(json.len() as u32).to_le_bytes()).map_err(io_err)?;
    w.write_all(&json).map_err(io_err)?;
    for p in net.params() {
        put_tensor(&mut w, &p.value)?;
    }
    for b in net.buffers() {
        put_tensor(&mut w, b)?;
    }
    match adam {
        None => w.write_all(&[0]).map_err(io_err)?,
        Some(a) => {
            w.write_all(&[1]).map_err(io_err)?;
            w.write_all(&a.step_count().to_le_bytes()).map_err(io_err)?;
            let c = a.config;
            for v in [c.alpha, c.beta1, c.beta2, c.epsilon] {
                w.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
            w.write_all(&(a.first_moments().len() as u32).to_le_bytes())
                .map_err(io_err)?;
            for t in a.first_moments().iter().chain(a.second_moments()) {
                put_tensor(&mut w, t)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<(Network, Option<Adam>)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("not a checkpoint (bad magic bytes)".into()));
    }
    let version = get_u32(&mut r)?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported checkpoint version {version} (expected {CHECKPOINT_VERSION})"
        )));
    }
    let len = get_u32(&mut r)? as usize;
    let mut json = vec![0u8; len];
    r.read_exact(&mut json).map_err(io_err)?;
    let manifest: Manifest =
        serde_json::from_slice(&json).map_err(|e| Error::Checkpoint(format!("bad manifest: {e}")))?;

    let arch = build_architecture(&manifest.config)?;
    if arch.layers != manifest.layers {
        return Err(Error::Checkpoint(
            "layer list does not match the architecture for this config".into(),
        ));
    }
    let mut net = Network::from_architecture(arch, 0)?;
    {
        let mut params = net.params_mut();
        if params.len() != manifest.params.len() {
            return Err(Error::Checkpoint("parameter count mismatch".into()));
        }
        for (p, shape) in params.iter_mut().zip(&manifest.params) {
            if p.value.shape() != shape.as_slice() {
                return Err(Error::Checkpoint(format!(
                    "parameter shape {:?} does not match {:?}",
                    shape,
                    p.value.shape()
                )));
            }
            p.value = get_tensor(&mut r, shape)?;
        }
    }
    {
        let mut buffers = net.buffers_mut();
        if buffers.len() != manifest.buffers.len() {
            return Err(Error::Checkpoint("buffer count mismatch".into()));
        }
        for (b, shape) in buffers.iter_mut().zip(&manifest.buffers) {
            if b.shape() != shape.as_slice() {
                return Err(Error::Checkpoint("buffer shape mismatch".into()));
            }
            **b = get_tensor(&mut r, shape)?;
        }
    }

    let mut flag = [0u8; 1];
    r.read_exact(&mut flag).map_err(io_err)?;
    let adam = match flag[0] {
        0 => None,
        1 => {
            let t = get_u64(&mut r)?;
            let config = AdamConfig {
                alpha: get_f64(&mut r)?,
                beta1: get_f64(&mut r)?,
                beta2: get_f64(&mut r)?,
                epsilon: get_f64(&mut r)?,
            };
            let n = get_u32(&mut r)? as usize;
            if n != 0 && n != manifest.params.len() {
                return Err(Error::Checkpoint("optimizer state does not match parameters".into()));
            }
            let shapes = &manifest.params[..n];
            let m = shapes.iter().map(|s| get_tensor(&mut r, s)).collect::<Result<Vec<_>>>()?;
            let v = shapes.iter().map(|s| get_tensor(&mut r, s)).collect::<Result<Vec<_>>>()?;
            Some(Adam::from_state(config, t, m, v)?)
        }
        other => return Err(Error::Checkpoint(format!("bad optimizer flag {other}"))),
    };

    let mut rest = [0u8; 1];
    match r.read(&mut rest) {
        Ok(0) => Ok((net, adam)),
        Ok(_) => Err(Error::Checkpoint("trailing bytes after checkpoint".into())),
        Err(e) => Err(io_err(e)),
    }
}

pub fn save_checkpoint(path: &Path, net: &Network, adam: Option<&Adam>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_checkpoint(std::io::BufWriter::new(file), net, adam)
}

pub fn load_checkpoint(path: &Path) -> Result<(Network, Option<Adam>)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ModelId;

    fn bytes(net: &Network, adam: Option<&Adam>) -> Vec<u8> {
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, net, adam).unwrap();
        buf
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let net = Network::build(&ModelConfig::desk(ModelId::M1), 3).unwrap();
        let buf = bytes(&net, None);
        let (back, adam) = read_checkpoint(&buf[..]).unwrap();
        assert!(adam.is_none());
        for (a, b) in net.params().iter().zip(back.params()) {
            let bits = |t: &Tensor| t.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a.value), bits(&b.value));
        }
        assert_eq!(net.architecture(), back.architecture());
    }

    #[test]
    fn bad_magic_and_version() {
        let net = Network::build(&ModelConfig::desk(ModelId::M3), 3).unwrap();
        let mut buf = bytes(&net, None);
        buf[0] = b'X';
        let err = read_checkpoint(&buf[..]).unwrap_err();
        assert!(err.to_string().contains("magic"));
        let mut buf = bytes(&net, None);
        buf[8] = 9;
        assert!(read_checkpoint(&buf[..]).unwrap_err().to_string().contains("version"));
    }

    #[test]
    fn truncation_detected() {
        let net = Network::build(&ModelConfig::desk(ModelId::M3), 3).unwrap();
        let buf = bytes(&net, Some(&Adam::new(AdamConfig::default())));
        for cut in [4, 20, buf.len() / 2, buf.len() - 1] {
            let err = read_checkpoint(&buf[..cut]).unwrap_err();
            assert!(err.to_string().contains("truncated"), "cut {cut}: {err}");
        }
        let mut long = buf.clone();
        long.push(0);
        assert!(read_checkpoint(&long[..]).is_err());
    }
}
