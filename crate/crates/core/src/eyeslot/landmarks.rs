use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NUM_LANDMARKS: usize = 68;

/// A 2-D point in pixel coordinates (x right, y down).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Rotates this point by `degrees` about `center`.
    pub fn rotate_about(self, center: Point, degrees: f64) -> Point {
        let (s, c) = degrees.to_radians().sin_cos();
        let dx = self.x - center.x;
        let dy = self.y - center.y;
        Point::new(center.x + c * dx - s * dy, center.y + s * dx + c * dy)
    }
}

/// Named index ranges of the iBUG 68-point convention (0-based).
///
/// "Right" and "left" refer to the subject, so the right eye appears on the
/// image's left side in a frontal photograph.
pub mod groups {
    use std::ops::Range;

    pub const JAW: Range<usize> = 0..17;
    pub const RIGHT_EYEBROW: Range<usize> = 17..22;
    pub const LEFT_EYEBROW: Range<usize> = 22..27;
    pub const NOSE_BRIDGE: Range<usize> = 27..31;
    pub const NOSE_LOWER: Range<usize> = 31..36;
    pub const RIGHT_EYE: Range<usize> = 36..42;
    pub const LEFT_EYE: Range<usize> = 42..48;
    pub const MOUTH: Range<usize> = 48..68;
}

/// 68 facial landmarks in iBUG order.
#[derive(Debug, Clone, PartialEq)]
pub struct Landmarks68 {
    points: [Point; NUM_LANDMARKS],
}

impl Landmarks68 {
    pub fn new(points: [Point; NUM_LANDMARKS]) -> Result<Self> {
        if let Some(i) = points
            .iter()
            .position(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::NonFinite(format!("landmark {i}")));
        }
        Ok(Self { points })
    }

    /// Builds landmarks from 136 scalars, x then y per point.
    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        if coords.len() != 2 * NUM_LANDMARKS {
            return Err(Error::Parse(format!(
                "expected {} landmark coordinates, got {}",
                2 * NUM_LANDMARKS,
                coords.len()
            )));
        }
        let mut points = [Point::default(); NUM_LANDMARKS];
        for (p, xy) in points.iter_mut().zip(coords.chunks_exact(2)) {
            *p = Point::new(xy[0], xy[1]);
        }
        Self::new(points)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| [p.x, p.y]).collect()
    }

    pub fn points(&self) -> &[Point; NUM_LANDMARKS] {
        &self.points
    }

    pub fn group(&self, range: std::ops::Range<usize>) -> &[Point] {
        &self.points[range]
    }

    /// Applies `f` to every point.
    pub fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        let mut points = self.points;
        for p in points.iter_mut() {
            *p = f(*p);
        }
        Self { points }
    }
}

pub fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Point::new(sx / n, sy / n)
}
