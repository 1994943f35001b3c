//! Procedurally drawn faces with exact 68-point landmarks.
//!
//! Faces are defined in a unit frame (origin at the face center, one unit
//! is half the face width, y down) and placed with a center, scale and
//! in-plane rotation. Arousal raises the brows and opens the eyes; valence
//! tilts the inner brow ends, tints the irises and curves the mouth, so the
//! ocular region carries signal about both labels.

use std::f64::consts::PI;
use std::path::Path;

use image::{Rgb, RgbImage};
use rand::Rng as _;

use crate::dataset::{write_annotations, AnnotationRecord, Label};
use crate::error::{Error, Result};
use crate::eyeslot::{extract_eye_slot, EyeSlot, Landmarks68, Point, SlotOutcome, NUM_LANDMARKS};
use crate::seed;

const EYE_CX: f64 = 0.42;
const EYE_CY: f64 = -0.22;
const EYE_HALF_W: f64 = 0.18;
const BROW_Y: f64 = -0.45;
const MOUTH_CY: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceSpec {
    pub center: Point,
    /// Pixels per face unit.
    pub scale: f64,
    /// In-plane rotation in degrees, positive clockwise on screen.
    pub angle: f64,
    pub label: Label,
    /// Horizontal stretch of the face frame; values below 1 narrow it.
    pub squeeze_x: f64,
}

impl FaceSpec {
    pub fn upright(center: Point, scale: f64, label: Label) -> Self {
        Self {
            center,
            scale,
            angle: 0.0,
            label,
            squeeze_x: 1.0,
        }
    }

    fn eye_half_h(&self) -> f64 {
        0.07 + 0.035 * self.label.arousal.clamp(-1.0, 1.0)
    }

    fn to_image(&self, u: f64, v: f64) -> Point {
        let p = Point::new(
            self.center.x + u * self.squeeze_x * self.scale,
            self.center.y + v * self.scale,
        );
        p.rotate_about(self.center, self.angle)
    }

    fn to_face(&self, p: Point) -> (f64, f64) {
        let q = p.rotate_about(self.center, -self.angle);
        (
            (q.x - self.center.x) / (self.squeeze_x * self.scale),
            (q.y - self.center.y) / self.scale,
        )
    }
}

/// Brow polyline (five points, image-left to image-right) in face units.
fn brow(spec: &FaceSpec, right_side: bool) -> [(f64, f64); 5] {
    let a = spec.label.arousal.clamp(-1.0, 1.0);
    let v = spec.label.valence.clamp(-1.0, 1.0);
    std::array::from_fn(|k| {
        let t = k as f64 / 4.0;
        let x = if right_side { -0.75 + 0.6 * t } else { 0.15 + 0.6 * t };
        let inner = if right_side { t } else { 1.0 - t };
        let y = BROW_Y - 0.08 * (PI * t).sin() - 0.08 * a - 0.06 * v * inner;
        (x, y)
    })
}

fn mouth_y(spec: &FaceSpec, u: f64, half_w: f64) -> f64 {
    MOUTH_CY - 0.08 * spec.label.valence.clamp(-1.0, 1.0) * (u / half_w).powi(2)
}

/// Landmarks of the face described by `spec`, in iBUG order.
pub fn face_points(spec: &FaceSpec) -> [Point; NUM_LANDMARKS] {
    let mut unit = Vec::with_capacity(NUM_LANDMARKS);
    for i in 0..17 {
        let a = PI * i as f64 / 16.0;
        unit.push((-0.95 * a.cos(), -0.05 + 1.1 * a.sin()));
    }
    unit.extend(brow(spec, true));
    unit.extend(brow(spec, false));
    for k in 0..4 {
        unit.push((0.0, -0.3 + 0.15 * k as f64));
    }
    for k in 0..5 {
        let x = -0.2 + 0.1 * k as f64;
        unit.push((x, 0.25 + 0.05 * (1.0 - (x / 0.2).powi(2))));
    }
    let h = spec.eye_half_h();
    for cx in [-EYE_CX, EYE_CX] {
        for k in 0..6 {
            let phi = PI * k as f64 / 3.0;
            unit.push((cx - EYE_HALF_W * phi.cos(), EYE_CY - h * phi.sin()));
        }
    }
    for (count, hw, hh) in [(12, 0.4, 0.15), (8, 0.25, 0.06)] {
        for k in 0..count {
            let phi = 2.0 * PI * k as f64 / count as f64;
            let u = -hw * phi.cos();
            unit.push((u, mouth_y(spec, u, 0.4) - hh * phi.sin()));
        }
    }
    debug_assert_eq!(unit.len(), NUM_LANDMARKS);
    std::array::from_fn(|i| spec.to_image(unit[i].0, unit[i].1))
}

pub fn face_landmarks(spec: &FaceSpec) -> Landmarks68 {
    Landmarks68::new(face_points(spec)).expect("finite synthetic landmarks")
}

fn segment_distance((px, py): (f64, f64), (ax, ay): (f64, f64), (bx, by): (f64, f64)) -> f64 {
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
    };
    (px - ax - t * dx).hypot(py - ay - t * dy)
}

fn face_color(spec: &FaceSpec, u: f64, v: f64) -> Option<[f64; 3]> {
    let h = spec.eye_half_h();
    for cx in [-EYE_CX, EYE_CX] {
        let (du, dv) = (u - cx, v - EYE_CY);
        if (du / EYE_HALF_W).powi(2) + (dv / h).powi(2) <= 1.0 {
            let r = du.hypot(dv);
            if r < 0.03 {
                return Some([15.0, 15.0, 20.0]);
            }
            if r < 0.075 {
                let t = (spec.label.valence.clamp(-1.0, 1.0) + 1.0) / 2.0;
                return Some([60.0 + 80.0 * t, 90.0 + 40.0 * t, 160.0 - 100.0 * t]);
            }
            return Some([245.0, 245.0, 240.0]);
        }
    }
    for right in [true, false] {
        let b = brow(spec, right);
        if b.windows(2).any(|w| segment_distance((u, v), w[0], w[1]) < 0.035) {
            return Some([70.0, 45.0, 30.0]);
        }
    }
    if segment_distance((u, v), (0.0, -0.3), (0.0, 0.15)) < 0.02 {
        return Some([190.0, 140.0, 115.0]);
    }
    if (u / 0.4).abs() <= 1.0 && ((v - mouth_y(spec, u, 0.4)) / 0.08).abs() <= 1.0 - (u / 0.4).powi(2) {
        return Some([170.0, 50.0, 60.0]);
    }
    if (u / 0.95).powi(2) + ((v - 0.05) / 1.2).powi(2) <= 1.0 {
        return Some([225.0, 180.0, 150.0]);
    }
    None
}

/// Draws the face over a noisy background. The same arguments always give
/// the same image.
pub fn render_face(width: u32, height: u32, spec: &FaceSpec, seed: u64) -> RgbImage {
    let mut rng = seed::rng(seed::derive(seed, "render"));
    let base: [f64; 3] = [rng.gen_range(40.0..120.0), rng.gen_range(60.0..140.0), rng.gen_range(80.0..160.0)];
    RgbImage::from_fn(width, height, |x, y| {
        let (u, v) = spec.to_face(Point::new(x as f64 + 0.5, y as f64 + 0.5));
        let c = face_color(spec, u, v).unwrap_or(base);
        let n: f64 = rng.gen_range(-6.0..6.0);
        Rgb(c.map(|k| crate::imageops::quantize(k + n)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSpec {
    pub count: usize,
    pub width: u32,
    pub height: u32,
    /// Faces are rotated uniformly within ±`max_angle` degrees.
    pub max_angle: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            count: 32,
            width: 160,
            height: 160,
            max_angle: 15.0,
            seed: 0,
        }
    }
}

/// A random face spec with a uniform label in [-1, 1]².
pub fn random_face(spec: &CorpusSpec, index: usize) -> FaceSpec {
    let mut rng = seed::rng(seed::sample_seed(seed::derive(spec.seed, "face"), 0, index));
    let (w, h) = (spec.width as f64, spec.height as f64);
    let scale = rng.gen_range(0.26..0.32) * w.min(h);
    FaceSpec {
        center: Point::new(w / 2.0 + rng.gen_range(-0.05..0.05) * w, h / 2.0 + rng.gen_range(-0.05..0.05) * h),
        scale,
        angle: if spec.max_angle > 0.0 {
            rng.gen_range(-spec.max_angle..=spec.max_angle)
        } else {
            0.0
        },
        label: Label {
            valence: rng.gen_range(-1.0..=1.0),
            arousal: rng.gen_range(-1.0..=1.0),
        },
        squeeze_x: 1.0,
    }
}

/// Writes `images/face_NNNN.png` and `annotations.csv` under `dir`.
pub fn write_face_corpus(dir: &Path, faces: &[FaceSpec], width: u32, height: u32, seed: u64) -> Result<Vec<AnnotationRecord>> {
    let images = dir.join("images");
    std::fs::create_dir_all(&images).map_err(|e| Error::io(&images, e))?;
    let mut records = Vec::with_capacity(faces.len());
    for (i, face) in faces.iter().enumerate() {
        let name = format!("images/face_{i:04}.png");
        let path = dir.join(&name);
        let img = render_face(width, height, face, seed::sample_seed(seed, 0, i));
        img.save(&path).map_err(|e| Error::Image { path: path.clone(), source: e })?;
        records.push(AnnotationRecord {
            image_path: name.into(),
            landmarks: face_landmarks(face),
            label: face.label,
        });
    }
    let csv_path = dir.join("annotations.csv");
    let file = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_annotations(std::io::BufWriter::new(file), &records)?;
    Ok(records)
}

pub fn generate_corpus(dir: &Path, spec: &CorpusSpec) -> Result<Vec<AnnotationRecord>> {
    let faces: Vec<FaceSpec> = (0..spec.count).map(|i| random_face(spec, i)).collect();
    write_face_corpus(dir, &faces, spec.width, spec.height, spec.seed)
}

/// Eye slots cut from `spec.count` random faces, in memory. Faces whose
/// slot is rejected are skipped, so fewer slots may come back.
pub fn synthetic_slots(spec: &CorpusSpec) -> Vec<EyeSlot> {
    (0..spec.count)
        .filter_map(|i| {
            let face = random_face(spec, i);
            let img = render_face(spec.width, spec.height, &face, seed::sample_seed(spec.seed, 0, i));
            match extract_eye_slot(&img, &face_landmarks(&face), face.label) {
                SlotOutcome::Accepted(slot, _) => Some(slot),
                SlotOutcome::Rejected { .. } => None,
            }
        })
        .collect()
}
