use super::landmarks::{centroid, groups, Landmarks68, Point};
use crate::error::{Error, Result};

pub const WIDTH_EXPANSION: f64 = 1.10;
pub const HEIGHT_EXPANSION: f64 = 1.25;

/// An oriented rectangle: `width` runs along the direction `theta` degrees
/// from the image x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedBox {
    pub center: Point,
    pub width: f64,
    pub height: f64,
    pub theta: f64,
}

/// Eyebrows (10), eyes (12) and the single nose-bridge point nearest the
/// segment joining the eye centroids: 23 points in total.
pub fn ocular_points(landmarks: &Landmarks68) -> Vec<Point> {
    let mut out = Vec::with_capacity(23);
    out.extend_from_slice(landmarks.group(groups::RIGHT_EYEBROW));
    out.extend_from_slice(landmarks.group(groups::LEFT_EYEBROW));
    out.extend_from_slice(landmarks.group(groups::RIGHT_EYE));
    out.extend_from_slice(landmarks.group(groups::LEFT_EYE));

    let a = centroid(landmarks.group(groups::RIGHT_EYE));
    let b = centroid(landmarks.group(groups::LEFT_EYE));
    let nose = landmarks
        .group(groups::NOSE_BRIDGE)
        .iter()
        .copied()
        .min_by(|p, q| {
            distance_to_segment(*p, a, b).total_cmp(&distance_to_segment(*q, a, b))
        })
        .expect("nose bridge group is non-empty");
    out.push(nose);
    out
}

fn distance_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(Point::new(a.x + t * dx, a.y + t * dy))
}

fn normalize_angle(mut deg: f64) -> f64 {
    while deg > 90.0 {
        deg -= 180.0;
    }
    while deg <= -90.0 {
        deg += 180.0;
    }
    deg
}

/// Angle in degrees of the line through the two eye centroids.
pub fn eye_axis_angle(landmarks: &Landmarks68) -> f64 {
    let a = centroid(landmarks.group(groups::RIGHT_EYE));
    let b = centroid(landmarks.group(groups::LEFT_EYE));
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    if dx == 0.0 && dy == 0.0 {
        log::warn!("eye centroids coincide; using theta = 0");
        return 0.0;
    }
    normalize_angle(dy.atan2(dx).to_degrees())
}

/// Minimal box around `points` in the frame rotated by `-theta`, before
/// expansion. Width/height are measured along and across the eye axis.
pub fn raw_box(points: &[Point], theta: f64) -> Result<RotatedBox> {
    if points.len() < 2 {
        return Err(Error::DegenerateRegion);
    }
    let pivot = centroid(points);
    let (mut x0, mut y0) = (f64::INFINITY, f64::INFINITY);
    let (mut x1, mut y1) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        let q = p.rotate_about(pivot, -theta);
        x0 = x0.min(q.x);
        x1 = x1.max(q.x);
        y0 = y0.min(q.y);
        y1 = y1.max(q.y);
    }
    let (width, height) = (x1 - x0, y1 - y0);
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::DegenerateRegion);
    }
    let center = Point::new((x0 + x1) / 2.0, (y0 + y1) / 2.0).rotate_about(pivot, theta);
    Ok(RotatedBox {
        center,
        width,
        height,
        theta,
    })
}

/// The raw box scaled by 1.10 horizontally and 1.25 vertically about its center.
pub fn fit_expanded_box(points: &[Point], theta: f64) -> Result<RotatedBox> {
    let raw = raw_box(points, theta)?;
    Ok(RotatedBox {
        width: raw.width * WIDTH_EXPANSION,
        height: raw.height * HEIGHT_EXPANSION,
        ..raw
    })
}
