//! Vanilla input-gradient saliency for the two regression outputs, and
//! heatmap rendering.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use image::{Rgb, RgbImage};

use crate::error::{Error, Result};
use crate::models::Network;
use crate::nn::{Mode, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Pixels whose brightening raises the output.
    Increase,
    /// Pixels whose brightening lowers the output.
    Decrease,
    /// Pixels with any influence on the output.
    Magnitude,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Increase, Direction::Decrease, Direction::Magnitude];
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "increase" => Ok(Direction::Increase),
            "decrease" => Ok(Direction::Decrease),
            "magnitude" | "maintain" => Ok(Direction::Magnitude),
            other => Err(Error::InvalidArgument(format!(
                "unknown direction {other:?} (expected increase, decrease or magnitude)"
            ))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Increase => "increase",
            Direction::Decrease => "decrease",
            Direction::Magnitude => "magnitude",
        })
    }
}

/// Parses `valence`/`arousal` or `0`/`1` into an output index.
pub fn parse_output(s: &str) -> Result<usize> {
    match s.to_ascii_lowercase().as_str() {
        "valence" | "0" => Ok(0),
        "arousal" | "1" => Ok(1),
        other => Err(Error::InvalidArgument(format!(
            "unknown output {other:?} (expected valence or arousal)"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    pub height: usize,
    pub width: usize,
    pub output: usize,
    pub direction: Direction,
    /// Per-pixel channel reduction of the input gradient, before scaling.
    pub raw: Vec<f64>,
    /// `raw` min-max scaled to [0, 1]; all zeros when `raw` is all zeros.
    pub values: Vec<f64>,
}

impl SaliencyMap {
    pub fn at(&self, y: usize, x: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

/// Min-max scaling to [0, 1]. An all-zero map is returned unchanged and a
/// constant nonzero map becomes all ones.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || (lo == 0.0 && hi == 0.0) {
        return values.to_vec();
    }
    if hi == lo {
        return vec![1.0; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Gradient of output `output` with respect to a single `[h, w, 3]` (or
/// `[1, h, w, 3]`) input, with batch norm in inference mode.
///
/// `Magnitude` reduces each pixel to the largest absolute channel gradient.
/// `Increase` and `Decrease` seed the output with +1 and -1 and keep the
/// largest positive channel gradient, so the two maps split the magnitude
/// map by sign.
pub fn saliency(network: &Network, input: &Tensor, output: usize, direction: Direction) -> Result<SaliencyMap> {
    if output > 1 {
        return Err(Error::InvalidArgument(format!("output index {output} is not 0 or 1")));
    }
    let x = match input.shape().len() {
        3 => {
            let mut shape = vec![1];
            shape.extend_from_slice(input.shape());
            input.clone().reshape(&shape)?
        }
        4 if input.shape()[0] == 1 => input.clone(),
        _ => return Err(Error::shape("saliency input", input.shape(), &[1, 0, 0, 3])),
    };
    let mut net = network.clone();
    let y = net.forward(&x, Mode::Infer)?;
    let mut seed = Tensor::zeros(y.shape());
    seed.data_mut()[output] = if direction == Direction::Decrease { -1.0 } else { 1.0 };
    let grad = net.backward(&seed)?;
    let (_, h, w, c) = grad.dims4()?;
    let raw: Vec<f64> = grad
        .data()
        .chunks(c)
        .map(|px| match direction {
            Direction::Magnitude => px.iter().fold(0.0f64, |m, g| m.max(g.abs())),
            _ => px.iter().fold(0.0f64, |m, g| m.max(*g)),
        })
        .collect();
    Ok(SaliencyMap {
        height: h,
        width: w,
        output,
        direction,
        values: normalize(&raw),
        raw,
    })
}

/// Piecewise-linear blue, cyan, yellow, red ramp.
pub fn colormap(v: f64) -> [f64; 3] {
    const STOPS: [[f64; 3]; 4] = [[0.0, 0.0, 255.0], [0.0, 255.0, 255.0], [255.0, 255.0, 0.0], [255.0, 0.0, 0.0]];
    let t = v.clamp(0.0, 1.0) * 3.0;
    let i = (t.floor() as usize).min(2);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    [0, 1, 2].map(|k| a[k] + (b[k] - a[k]) * f)
}

pub fn grayscale(image: &RgbImage) -> RgbImage {
    RgbImage::from_fn(image.width(), image.height(), |x, y| {
        let [r, g, b] = image.get_pixel(x, y).0.map(f64::from);
        let l = crate::imageops::quantize(0.299 * r + 0.587 * g + 0.114 * b);
        Rgb([l, l, l])
    })
}

/// Blends the colored map over the grayscale image, using each map value as
/// its own opacity.
pub fn render_overlay(image: &RgbImage, map: &SaliencyMap) -> Result<RgbImage> {
    if image.width() as usize != map.width || image.height() as usize != map.height {
        return Err(Error::shape(
            "heatmap overlay",
            &[image.height() as usize, image.width() as usize],
            &[map.height, map.width],
        ));
    }
    let gray = grayscale(image);
    Ok(RgbImage::from_fn(image.width(), image.height(), |x, y| {
        let a = map.at(y as usize, x as usize);
        let base = gray.get_pixel(x, y).0;
        if a == 0.0 {
            return Rgb(base);
        }
        let color = colormap(a);
        Rgb([0, 1, 2].map(|k| crate::imageops::quantize((1.0 - a) * f64::from(base[k]) + a * color[k])))
    }))
}

pub fn heatmap_overlay(image: &RgbImage, map: &SaliencyMap, path: &Path) -> Result<()> {
    let out = render_overlay(image, map)?;
    out.save(path).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        source: e,
    })
}

const PANEL_GAP: u32 = 2;

/// Two rows (valence, arousal) by three columns (increase, decrease,
/// magnitude) of overlays for one input.
pub fn triptych(network: &Network, image: &RgbImage, input: &Tensor) -> Result<RgbImage> {
    let (w, h) = (image.width(), image.height());
    let mut canvas = RgbImage::from_pixel(3 * w + 2 * PANEL_GAP, 2 * h + PANEL_GAP, Rgb([255, 255, 255]));
    for output in 0..2 {
        for (col, direction) in Direction::ALL.into_iter().enumerate() {
            let map = saliency(network, input, output, direction)?;
            let panel = render_overlay(image, &map)?;
            let (ox, oy) = (col as u32 * (w + PANEL_GAP), output as u32 * (h + PANEL_GAP));
            image::imageops::replace(&mut canvas, &panel, ox as i64, oy as i64);
        }
    }
    Ok(canvas)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_cases() {
        assert_eq!(normalize(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(normalize(&[2.0, 2.0]), vec![1.0, 1.0]);
        let n = normalize(&[1.0, 3.0, 2.0]);
        assert_eq!(n, vec![0.0, 1.0, 0.5]);
        assert_eq!(normalize(&n), n);
    }

    #[test]
    fn colormap_ends() {
        assert_eq!(colormap(0.0), [0.0, 0.0, 255.0]);
        assert_eq!(colormap(1.0), [255.0, 0.0, 0.0]);
    }

    #[test]
    fn parse_names() {
        assert_eq!(parse_output("Arousal").unwrap(), 1);
        assert!(parse_output("dominance").is_err());
        assert_eq!("maintain".parse::<Direction>().unwrap(), Direction::Magnitude);
    }
}
