//! Ocular-region ("eye slot") extraction from 68-point landmarks.
//!
//! The eye axis angle θ is the direction of the segment joining the two eye
//! centroids, in degrees, positive when the subject's left eye (image right)
//! sits lower in the image. Since image y points down, positive θ is a
//! visually clockwise tilt. θ is normalized to (-90, 90].

mod extract;
mod geometry;
mod landmarks;

pub use extract::{eligibility, extract_eye_slot, Eligibility, EyeSlot, SlotGeometry, SlotOutcome};
pub use geometry::{
    eye_axis_angle, fit_expanded_box, ocular_points, raw_box, RotatedBox, HEIGHT_EXPANSION,
    WIDTH_EXPANSION,
};
pub use landmarks::{centroid, groups, Landmarks68, Point, NUM_LANDMARKS};

/// Rejection reasons reported by eligibility and extraction.
pub mod reasons {
    pub use crate::dataset::REASON_LABEL_OUT_OF_RANGE as LABEL_OUT_OF_RANGE;
    pub const PORTRAIT_ASPECT: &str = "portrait aspect";
    pub const NON_POSITIVE_SIZE: &str = "non-positive size";
    pub const EMPTY_CROP: &str = "empty crop";
    pub const CLIPPED_CROP: &str = "crop mostly outside image";
    pub const DEGENERATE_REGION: &str = "degenerate ocular region";
}
