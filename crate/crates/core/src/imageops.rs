//! Raster helpers shared by eye-slot extraction and augmentation.
//!
//! Pixel `(i, j)` has its center at continuous coordinate `(i, j)`.

use image::{Rgb, RgbImage};

/// 2-D affine map `[a b c; d e f]` acting on column vectors `(x, y, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2 {
    pub m: [f64; 6],
}

impl Affine2 {
    pub const IDENTITY: Affine2 = Affine2 {
        m: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
    };

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self {
            m: [1.0, 0.0, dx, 0.0, 1.0, dy],
        }
    }

    /// Rotation by `degrees` about `(cx, cy)`; positive angles turn +x towards +y.
    pub fn rotation_about(degrees: f64, cx: f64, cy: f64) -> Self {
        let (s, c) = degrees.to_radians().sin_cos();
        Self {
            m: [c, -s, cx - c * cx + s * cy, s, c, cy - s * cx - c * cy],
        }
    }

    /// Horizontal shear `x' = x + k (y - cy)`.
    pub fn shear_x_about(k: f64, cy: f64) -> Self {
        Self {
            m: [1.0, k, -k * cy, 0.0, 1.0, 0.0],
        }
    }

    /// `self` applied after `first`.
    pub fn then_after(&self, first: &Affine2) -> Affine2 {
        let [a, b, c, d, e, f] = self.m;
        let [p, q, r, s, t, u] = first.m;
        Affine2 {
            m: [
                a * p + b * s,
                a * q + b * t,
                a * r + b * u + c,
                d * p + e * s,
                d * q + e * t,
                d * r + e * u + f,
            ],
        }
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let [a, b, c, d, e, f] = self.m;
        (a * x + b * y + c, d * x + e * y + f)
    }

    pub fn inverse(&self) -> Option<Affine2> {
        let [a, b, c, d, e, f] = self.m;
        let det = a * e - b * d;
        if det.abs() < 1e-15 {
            return None;
        }
        let ia = e / det;
        let ib = -b / det;
        let id = -d / det;
        let ie = a / det;
        Some(Affine2 {
            m: [ia, ib, -(ia * c + ib * f), id, ie, -(id * c + ie * f)],
        })
    }
}

fn texel(img: &RgbImage, x: i64, y: i64) -> Option<[f64; 3]> {
    if x < 0 || y < 0 || x >= img.width() as i64 || y >= img.height() as i64 {
        return None;
    }
    let p = img.get_pixel(x as u32, y as u32).0;
    Some([p[0] as f64, p[1] as f64, p[2] as f64])
}

/// Bilinear sample; taps outside the image contribute black.
pub fn sample_bilinear_black(img: &RgbImage, x: f64, y: f64) -> [f64; 3] {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (x0, y0) = (x0 as i64, y0 as i64);
    let mut out = [0.0; 3];
    for (dx, dy, w) in [
        (0, 0, (1.0 - fx) * (1.0 - fy)),
        (1, 0, fx * (1.0 - fy)),
        (0, 1, (1.0 - fx) * fy),
        (1, 1, fx * fy),
    ] {
        if w == 0.0 {
            continue;
        }
        if let Some(t) = texel(img, x0 + dx, y0 + dy) {
            for c in 0..3 {
                out[c] += w * t[c];
            }
        }
    }
    out
}

/// Bilinear sample with edge replication.
pub fn sample_bilinear_clamped(img: &RgbImage, x: f64, y: f64) -> [f64; 3] {
    let max_x = (img.width() - 1) as f64;
    let max_y = (img.height() - 1) as f64;
    sample_bilinear_black(img, x.clamp(0.0, max_x), y.clamp(0.0, max_y))
}

pub fn quantize(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn to_rgb(v: [f64; 3]) -> Rgb<u8> {
    Rgb([quantize(v[0]), quantize(v[1]), quantize(v[2])])
}

/// Builds an `out_w × out_h` image by sampling `src` at `dst_to_src(x, y)`.
pub fn warp(src: &RgbImage, out_w: u32, out_h: u32, dst_to_src: &Affine2) -> RgbImage {
    RgbImage::from_fn(out_w, out_h, |x, y| {
        let (sx, sy) = dst_to_src.apply(x as f64, y as f64);
        to_rgb(sample_bilinear_black(src, sx, sy))
    })
}

/// Bilinear resize with half-pixel centers and edge replication.
pub fn resize_bilinear(src: &RgbImage, out_w: u32, out_h: u32) -> RgbImage {
    if src.dimensions() == (out_w, out_h) {
        return src.clone();
    }
    let sx = src.width() as f64 / out_w as f64;
    let sy = src.height() as f64 / out_h as f64;
    RgbImage::from_fn(out_w, out_h, |x, y| {
        let fx = (x as f64 + 0.5) * sx - 0.5;
        let fy = (y as f64 + 0.5) * sy - 0.5;
        to_rgb(sample_bilinear_clamped(src, fx, fy))
    })
}
