use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[low, high]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub const fn new(low: f64, high: f64) -> Self {
        Self { low, high }
    }

    pub const fn point(v: f64) -> Self {
        Self { low: v, high: v }
    }

    pub fn lerp(&self, u: f64) -> f64 {
        self.low + u * (self.high - self.low)
    }

    pub fn contains(&self, v: f64) -> bool {
        (self.low..=self.high).contains(&v)
    }
}

/// Ranges for each random transform. Field names follow the usual
/// image-generator vocabulary; units are noted per field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    /// Multiplier on HLS lightness.
    pub brightness_range: Interval,
    /// Degrees; magnitude, sign drawn separately.
    pub rotation_range: Interval,
    /// Fraction of slot width; magnitude.
    pub width_shift_range: Interval,
    /// Fraction of slot height; magnitude.
    pub height_shift_range: Interval,
    /// Radians of horizontal shear; magnitude.
    pub shear_range: Interval,
    pub hflip: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            brightness_range: Interval::new(0.5, 1.5),
            rotation_range: Interval::new(0.0, 5.0),
            width_shift_range: Interval::new(0.0, 0.10),
            height_shift_range: Interval::new(0.0, 0.10),
            shear_range: Interval::new(0.0, 0.01),
            hflip: true,
        }
    }
}

impl AugmentConfig {
    /// Every transform pinned to its neutral value.
    pub fn identity() -> Self {
        Self {
            brightness_range: Interval::point(1.0),
            rotation_range: Interval::point(0.0),
            width_shift_range: Interval::point(0.0),
            height_shift_range: Interval::point(0.0),
            shear_range: Interval::point(0.0),
            hflip: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("brightness_range", self.brightness_range),
            ("rotation_range", self.rotation_range),
            ("width_shift_range", self.width_shift_range),
            ("height_shift_range", self.height_shift_range),
            ("shear_range", self.shear_range),
        ];
        for (name, r) in named {
            if !(r.low.is_finite() && r.high.is_finite() && r.low <= r.high) {
                return Err(Error::InvalidArgument(format!(
                    "{name}: need finite low <= high, got [{}, {}]",
                    r.low, r.high
                )));
            }
        }
        if self.brightness_range.low < 0.0 {
            return Err(Error::InvalidArgument("brightness_range must be non-negative".into()));
        }
        for (name, r) in &named[1..] {
            if r.low < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name}: magnitudes must be non-negative"
                )));
            }
        }
        Ok(())
    }
}

/// One concrete draw of every transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformParams {
    pub brightness: f64,
    /// Degrees, signed.
    pub rotation: f64,
    /// Pixels, signed.
    pub dx: f64,
    pub dy: f64,
    /// Radians, signed.
    pub shear: f64,
    pub hflip: bool,
}

impl TransformParams {
    pub const IDENTITY: TransformParams = TransformParams {
        brightness: 1.0,
        rotation: 0.0,
        dx: 0.0,
        dy: 0.0,
        shear: 0.0,
        hflip: false,
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_table() {
        let c = AugmentConfig::default();
        assert_eq!(c.brightness_range, Interval::new(0.5, 1.5));
        assert_eq!(c.rotation_range, Interval::new(0.0, 5.0));
        assert_eq!(c.width_shift_range, Interval::new(0.0, 0.10));
        assert_eq!(c.height_shift_range, Interval::new(0.0, 0.10));
        assert_eq!(c.shear_range, Interval::new(0.0, 0.01));
        assert!(c.hflip);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn inverted_range_rejected() {
        let c = AugmentConfig {
            rotation_range: Interval::new(5.0, 1.0),
            ..AugmentConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
