use image::RgbImage;

use crate::imageops::quantize;

/// RGB in [0, 1] to (hue in [0, 1), lightness, saturation).
pub fn rgb_to_hls(rgb: [f64; 3]) -> [f64; 3] {
    let [r, g, b] = rgb;
    let maxc = r.max(g).max(b);
    let minc = r.min(g).min(b);
    let l = (maxc + minc) / 2.0;
    if maxc == minc {
        return [0.0, l, 0.0];
    }
    let d = maxc - minc;
    let s = if l <= 0.5 {
        d / (maxc + minc)
    } else {
        d / (2.0 - maxc - minc)
    };
    let rc = (maxc - r) / d;
    let gc = (maxc - g) / d;
    let bc = (maxc - b) / d;
    let h = if r == maxc {
        bc - gc
    } else if g == maxc {
        2.0 + rc - bc
    } else {
        4.0 + gc - rc
    };
    [(h / 6.0).rem_euclid(1.0), l, s]
}

pub fn hls_to_rgb(hls: [f64; 3]) -> [f64; 3] {
    let [h, l, s] = hls;
    if s == 0.0 {
        return [l, l, l];
    }
    let m2 = if l <= 0.5 { l * (1.0 + s) } else { l + s - l * s };
    let m1 = 2.0 * l - m2;
    [
        hue_channel(m1, m2, h + 1.0 / 3.0),
        hue_channel(m1, m2, h),
        hue_channel(m1, m2, h - 1.0 / 3.0),
    ]
}

fn hue_channel(m1: f64, m2: f64, h: f64) -> f64 {
    let h = h.rem_euclid(1.0);
    if h < 1.0 / 6.0 {
        m1 + (m2 - m1) * h * 6.0
    } else if h < 0.5 {
        m2
    } else if h < 2.0 / 3.0 {
        m1 + (m2 - m1) * (2.0 / 3.0 - h) * 6.0
    } else {
        m1
    }
}

/// Multiplies HLS lightness by `factor`, clamped to [0, 1]. Input and output in [0, 1].
pub fn scale_lightness(rgb: [f64; 3], factor: f64) -> [f64; 3] {
    let [h, l, s] = rgb_to_hls(rgb);
    hls_to_rgb([h, (l * factor).clamp(0.0, 1.0), s])
}

pub fn apply_brightness(image: &RgbImage, factor: f64) -> RgbImage {
    let mut out = image.clone();
    if factor == 1.0 {
        return out;
    }
    for p in out.pixels_mut() {
        let rgb = [p[0], p[1], p[2]].map(|v| v as f64 / 255.0);
        let scaled = scale_lightness(rgb, factor);
        p.0 = scaled.map(|v| quantize(v * 255.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    #[test]
    fn gray_lightness_scales() {
        let out = scale_lightness([0.5, 0.5, 0.5], 1.5);
        assert_eq!(rgb_to_hls(out)[1], 0.75);
        assert_eq!(out, [0.75; 3]);
    }

    #[test]
    fn round_trip_is_close() {
        for rgb in [[0.1, 0.7, 0.3], [0.9, 0.2, 0.2], [0.3, 0.3, 0.8], [1.0, 1.0, 0.0]] {
            let back = hls_to_rgb(rgb_to_hls(rgb));
            for (a, b) in rgb.iter().zip(back.iter()) {
                assert!((a - b).abs() < 1e-12, "{rgb:?} -> {back:?}");
            }
        }
    }

    #[test]
    fn black_stays_black() {
        let img = RgbImage::from_pixel(3, 2, Rgb([0, 0, 0]));
        for f in [0.5, 1.0, 1.5] {
            assert_eq!(apply_brightness(&img, f), img);
        }
    }

    #[test]
    fn unit_factor_within_one_step() {
        let img = RgbImage::from_fn(16, 16, |x, y| Rgb([(x * 16) as u8, (y * 16) as u8, 77]));
        // bypass the fast path: go through the HLS round trip explicitly
        let mut rt = img.clone();
        for p in rt.pixels_mut() {
            let rgb = [p[0], p[1], p[2]].map(|v| v as f64 / 255.0);
            p.0 = scale_lightness(rgb, 1.0).map(|v| quantize(v * 255.0));
        }
        for (a, b) in img.pixels().zip(rt.pixels()) {
            for c in 0..3 {
                assert!((a[c] as i32 - b[c] as i32).abs() <= 1);
            }
        }
        assert_eq!(apply_brightness(&img, 1.0), img);
    }

    #[test]
    fn lightness_clamps() {
        let out = scale_lightness([0.9, 0.9, 0.9], 1.5);
        assert_eq!(out, [1.0; 3]);
    }
}
