use image::RgbImage;

use super::geometry::{eye_axis_angle, fit_expanded_box, ocular_points, RotatedBox};
use super::landmarks::Landmarks68;
use super::reasons;
use crate::dataset::Label;
use crate::imageops::{warp, Affine2};

/// A de-rotated ocular crop paired with its affect label.
#[derive(Debug, Clone, PartialEq)]
pub struct EyeSlot {
    pub image: RgbImage,
    pub label: Label,
}

/// Where a slot came from: the expanded box and the pixel rectangle
/// `(x0, y0, width, height)` cut from the de-rotated image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotGeometry {
    pub bbox: RotatedBox,
    pub crop: (i64, i64, u32, u32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SlotOutcome {
    Accepted(EyeSlot, SlotGeometry),
    Rejected {
        reason: &'static str,
        bbox: Option<RotatedBox>,
    },
}

impl SlotOutcome {
    pub fn reason(&self) -> Option<&'static str> {
        match self {
            SlotOutcome::Accepted(..) => None,
            SlotOutcome::Rejected { reason, .. } => Some(reason),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eligibility {
    Accept,
    Reject(&'static str),
}

/// Accepts iff the label is in range, both sides are positive and the slot is
/// not taller than it is wide. The label is checked first.
pub fn eligibility(width: f64, height: f64, label: Label) -> Eligibility {
    if !label.in_range() {
        Eligibility::Reject(reasons::LABEL_OUT_OF_RANGE)
    } else if !(width > 0.0 && height > 0.0) {
        Eligibility::Reject(reasons::NON_POSITIVE_SIZE)
    } else if height > width {
        Eligibility::Reject(reasons::PORTRAIT_ASPECT)
    } else {
        Eligibility::Accept
    }
}

/// Rotates `image` by -θ about the expanded box center and crops the box.
///
/// The crop rectangle is clamped to the image; a crop that keeps less than
/// half of its area after clamping is rejected. Pixels whose source falls
/// outside the original image are black.
pub fn extract_eye_slot(image: &RgbImage, landmarks: &Landmarks68, label: Label) -> SlotOutcome {
    if !label.in_range() {
        return SlotOutcome::Rejected {
            reason: reasons::LABEL_OUT_OF_RANGE,
            bbox: None,
        };
    }
    let theta = eye_axis_angle(landmarks);
    let bbox = match fit_expanded_box(&ocular_points(landmarks), theta) {
        Ok(b) => b,
        Err(_) => {
            return SlotOutcome::Rejected {
                reason: reasons::DEGENERATE_REGION,
                bbox: None,
            }
        }
    };
    let reject = |reason| SlotOutcome::Rejected {
        reason,
        bbox: Some(bbox),
    };

    let ux0 = (bbox.center.x - bbox.width / 2.0).round() as i64;
    let ux1 = (bbox.center.x + bbox.width / 2.0).round() as i64;
    let uy0 = (bbox.center.y - bbox.height / 2.0).round() as i64;
    let uy1 = (bbox.center.y + bbox.height / 2.0).round() as i64;
    let (iw, ih) = (image.width() as i64, image.height() as i64);
    let (x0, x1) = (ux0.clamp(0, iw), ux1.clamp(0, iw));
    let (y0, y1) = (uy0.clamp(0, ih), uy1.clamp(0, ih));
    let (w, h) = (x1 - x0, y1 - y0);
    let full = (ux1 - ux0) * (uy1 - uy0);

    if full > 0 && (w <= 0 || h <= 0) {
        return reject(reasons::EMPTY_CROP);
    }
    if full > 0 && 2 * w * h < full {
        return reject(reasons::CLIPPED_CROP);
    }
    if let Eligibility::Reject(reason) = eligibility(w as f64, h as f64, label) {
        return reject(reason);
    }

    let to_source = Affine2::rotation_about(bbox.theta, bbox.center.x, bbox.center.y)
        .then_after(&Affine2::translation(x0 as f64, y0 as f64));
    let slot = warp(image, w as u32, h as u32, &to_source);
    SlotOutcome::Accepted(
        EyeSlot { image: slot, label },
        SlotGeometry {
            bbox,
            crop: (x0, y0, w as u32, h as u32),
        },
    )
}
