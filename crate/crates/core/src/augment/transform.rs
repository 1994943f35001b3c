use image::{Rgb, RgbImage};
use rand::Rng as _;

use super::config::{AugmentConfig, Interval, TransformParams};
use crate::error::{Error, Result};
use crate::imageops::{resize_bilinear, warp, Affine2};
use crate::nn::Tensor;
use crate::seed;

/// Draws one parameter set. Magnitudes are uniform over their interval and
/// rotation, shifts and shear each get an independent fair sign.
pub fn sample_transform(config: &AugmentConfig, width: u32, height: u32, seed: u64) -> TransformParams {
    let mut rng = seed::rng(seed);
    let signed = |r: &Interval, rng: &mut seed::Rng| {
        let mag = r.lerp(rng.gen::<f64>());
        if rng.gen::<bool>() {
            mag
        } else {
            -mag
        }
    };
    let brightness = config.brightness_range.lerp(rng.gen::<f64>());
    let rotation = signed(&config.rotation_range, &mut rng);
    let dx = signed(&config.width_shift_range, &mut rng) * width as f64;
    let dy = signed(&config.height_shift_range, &mut rng) * height as f64;
    let shear = signed(&config.shear_range, &mut rng);
    let flip_draw = rng.gen::<f64>();
    TransformParams {
        brightness,
        rotation,
        dx,
        dy,
        shear,
        hflip: config.hflip && flip_draw < 0.5,
    }
}

/// Rotation about the image center, then horizontal shear about the center,
/// then translation, sampled bilinearly with black fill.
pub fn apply_affine(image: &RgbImage, rotation: f64, dx: f64, dy: f64, shear: f64) -> RgbImage {
    if rotation == 0.0 && dx == 0.0 && dy == 0.0 && shear == 0.0 {
        return image.clone();
    }
    let cx = (image.width() as f64 - 1.0) / 2.0;
    let cy = (image.height() as f64 - 1.0) / 2.0;
    let forward = Affine2::translation(dx, dy)
        .then_after(&Affine2::shear_x_about(shear.tan(), cy))
        .then_after(&Affine2::rotation_about(rotation, cx, cy));
    let inverse = forward.inverse().expect("rotation/shear/translation is invertible");
    warp(image, image.width(), image.height(), &inverse)
}

pub fn apply_hflip(image: &RgbImage) -> RgbImage {
    image::imageops::flip_horizontal(image)
}

/// Placement of the resized content inside the letterbox frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LetterboxLayout {
    pub scale: f64,
    pub content_width: u32,
    pub content_height: u32,
    pub offset_x: u32,
    pub offset_y: u32,
}

pub fn letterbox_layout(w: u32, h: u32, target_w: u32, target_h: u32) -> Result<LetterboxLayout> {
    if w == 0 || h == 0 || target_w == 0 || target_h == 0 {
        return Err(Error::InvalidArgument(format!(
            "letterbox needs non-zero sizes, got {w}x{h} -> {target_w}x{target_h}"
        )));
    }
    let scale = (target_w as f64 / w as f64).min(target_h as f64 / h as f64);
    let cw = ((w as f64 * scale).round() as u32).clamp(1, target_w);
    let ch = ((h as f64 * scale).round() as u32).clamp(1, target_h);
    Ok(LetterboxLayout {
        scale,
        content_width: cw,
        content_height: ch,
        offset_x: (target_w - cw) / 2,
        offset_y: (target_h - ch) / 2,
    })
}

/// Aspect-preserving resize into a black `target_w × target_h` frame.
pub fn letterbox(image: &RgbImage, target_w: u32, target_h: u32) -> Result<RgbImage> {
    let layout = letterbox_layout(image.width(), image.height(), target_w, target_h)?;
    let content = resize_bilinear(image, layout.content_width, layout.content_height);
    let mut out = RgbImage::from_pixel(target_w, target_h, Rgb([0, 0, 0]));
    image::imageops::replace(
        &mut out,
        &content,
        layout.offset_x as i64,
        layout.offset_y as i64,
    );
    Ok(out)
}

/// A model-ready `[height, width, 3]` tensor with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedInput {
    pub tensor: Tensor,
}

pub fn normalize_pixels(image: &RgbImage) -> NormalizedInput {
    let (w, h) = image.dimensions();
    let data = image.as_raw().iter().map(|v| *v as f64 / 255.0).collect();
    NormalizedInput {
        tensor: Tensor::new(vec![h as usize, w as usize, 3], data).expect("raw buffer matches dims"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: u32, h: u32) -> RgbImage {
        RgbImage::from_fn(w, h, |x, y| Rgb([(x * 7 % 256) as u8, (y * 11 % 256) as u8, 128]))
    }

    #[test]
    fn collapsed_config_is_identity() {
        let p = sample_transform(&AugmentConfig::identity(), 100, 40, 99);
        assert_eq!(p, TransformParams::IDENTITY);
    }

    #[test]
    fn sampling_is_deterministic() {
        let c = AugmentConfig::default();
        assert_eq!(sample_transform(&c, 100, 40, 5), sample_transform(&c, 100, 40, 5));
        assert_ne!(sample_transform(&c, 100, 40, 5), sample_transform(&c, 100, 40, 6));
    }

    #[test]
    fn monte_carlo_ranges() {
        let c = AugmentConfig::default();
        let n = 10_000;
        let (mut lo, mut hi, mut flips) = (f64::MAX, f64::MIN, 0usize);
        for s in 0..n {
            let p = sample_transform(&c, 100, 50, s as u64);
            lo = lo.min(p.brightness);
            hi = hi.max(p.brightness);
            flips += p.hflip as usize;
            assert!(p.rotation.abs() <= 5.0);
            assert!(p.shear.abs() <= 0.01);
            assert!(p.dx.abs() <= 10.0 + 1e-12 && p.dy.abs() <= 5.0 + 1e-12);
        }
        assert!(lo >= 0.5 && hi <= 1.5);
        let freq = flips as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.02, "flip frequency {freq}");
    }

    #[test]
    fn zero_affine_is_identity() {
        let img = ramp(30, 12);
        assert_eq!(apply_affine(&img, 0.0, 0.0, 0.0, 0.0), img);
    }

    #[test]
    fn pure_translation() {
        let img = ramp(30, 12);
        let out = apply_affine(&img, 0.0, 10.0, 0.0, 0.0);
        for y in 0..12 {
            for x in 0..30 {
                let p = *out.get_pixel(x, y);
                if x < 10 {
                    assert_eq!(p, Rgb([0, 0, 0]));
                } else {
                    assert_eq!(p, *img.get_pixel(x - 10, y));
                }
            }
        }
    }

    #[test]
    fn rotation_round_trip_interior() {
        let img = RgbImage::from_fn(80, 40, |x, y| {
            let v = 128.0 + 100.0 * ((x as f64) / 9.0).sin() * ((y as f64) / 7.0).cos();
            Rgb([v as u8, (255 - v as u8), 90])
        });
        let back = apply_affine(&apply_affine(&img, 5.0, 0.0, 0.0, 0.0), -5.0, 0.0, 0.0, 0.0);
        let (mut sum, mut n) = (0.0, 0.0);
        for y in 8..32 {
            for x in 8..72 {
                for c in 0..3 {
                    sum += (img.get_pixel(x, y)[c] as f64 - back.get_pixel(x, y)[c] as f64).abs();
                    n += 1.0;
                }
            }
        }
        assert!(sum / n < 0.02 * 255.0, "mean abs diff {}", sum / n);
    }

    #[test]
    fn hflip_cases() {
        let img = ramp(9, 4);
        assert_eq!(apply_hflip(&apply_hflip(&img)), img);
        let sym = RgbImage::from_fn(6, 3, |x, _| Rgb([(x.min(5 - x) * 40) as u8; 3]));
        assert_eq!(apply_hflip(&sym), sym);
        let pair = RgbImage::from_fn(2, 1, |x, _| Rgb([x as u8 * 200, 1, 2]));
        let flipped = apply_hflip(&pair);
        assert_eq!(*flipped.get_pixel(0, 0), *pair.get_pixel(1, 0));
        assert_eq!(*flipped.get_pixel(1, 0), *pair.get_pixel(0, 0));
    }

    #[test]
    fn letterbox_examples() {
        let l = letterbox_layout(100, 50, 512, 170).unwrap();
        assert_eq!(l.scale, 3.4);
        assert_eq!((l.content_width, l.content_height), (340, 170));
        assert_eq!((l.offset_x, l.offset_y), (86, 0));

        let img = ramp(512, 170);
        assert_eq!(letterbox(&img, 512, 170).unwrap(), img);

        let l = letterbox_layout(512, 100, 512, 170).unwrap();
        assert_eq!((l.content_width, l.content_height), (512, 100));
        assert_eq!((l.offset_x, l.offset_y), (0, 35));
        let out = letterbox(&ramp(512, 100), 512, 170).unwrap();
        assert_eq!(*out.get_pixel(3, 34), Rgb([0, 0, 0]));
        assert_eq!(*out.get_pixel(3, 135), Rgb([0, 0, 0]));
        assert_eq!(*out.get_pixel(3, 35), *ramp(512, 100).get_pixel(3, 0));

        assert!(letterbox_layout(0, 5, 10, 10).is_err());
    }

    #[test]
    fn normalization_values() {
        let img = RgbImage::from_fn(3, 1, |x, _| Rgb([[255, 0, 128][x as usize]; 3]));
        let t = normalize_pixels(&img).tensor;
        assert_eq!(t.shape(), &[1, 3, 3]);
        assert_eq!(t.data()[0], 1.0);
        assert_eq!(t.data()[3], 0.0);
        assert_eq!(t.data()[6], 128.0 / 255.0);
    }
}
