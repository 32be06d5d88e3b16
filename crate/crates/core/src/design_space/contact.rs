//! Climb-or-jam test at an overhang contact.
//!
//! Frame: `x` in the direction of travel, `y` up, counter-clockwise moments
//! positive. The front module must fold upward about its rotation axis `A`,
//! which needs a counter-clockwise moment from the contact force.

use crate::design_space::geom::Vec2;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSign {
    /// Some admissible contact force turns the module counter-clockwise.
    Positive,
    /// Every admissible contact force gives a clockwise or zero moment.
    NonPositive,
}

impl MomentSign {
    pub fn is_climb(self) -> bool {
        self == MomentSign::Positive
    }

    pub fn verdict(self) -> &'static str {
        match self {
            MomentSign::Positive => "climb",
            MomentSign::NonPositive => "jam",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverhangContact {
    pub point: Vec2,
    /// Unit contact normal, pointing from the obstacle into the wheel.
    pub normal: Vec2,
    /// Rotation axis `A` of the module.
    pub axis: Vec2,
    pub friction: f64,
}

impl OverhangContact {
    const UNIT_TOLERANCE: f64 = 1e-9;

    pub fn new(point: Vec2, normal: Vec2, axis: Vec2, friction: f64) -> Result<Self> {
        if !(friction.is_finite() && friction >= 0.0) {
            return Err(Error::InvalidInput(format!("friction coefficient must be non-negative, got {friction}")));
        }
        if (normal.norm() - 1.0).abs() > Self::UNIT_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "contact normal must be unit length, got |n| = {}",
                normal.norm()
            )));
        }
        Ok(Self { point, normal, axis, friction })
    }

    /// Builds a contact whose normal passes through `wheel_point` (the
    /// centre of the circle carrying the contact).
    pub fn toward(point: Vec2, wheel_point: Vec2, axis: Vec2, friction: f64) -> Result<Self> {
        let normal = (wheel_point - point)
            .normalized()
            .ok_or_else(|| Error::DegenerateGeometry("contact point is the circle centre".into()))?;
        Self::new(point, normal, axis, friction)
    }

    /// Moments about `A` of unit forces along the normal and the two edges
    /// of the friction cone, in that order.
    pub fn ray_moments(&self) -> Result<[f64; 3]> {
        let arm = self.point - self.axis;
        if arm.norm() == 0.0 {
            return Err(Error::DegenerateGeometry("contact point coincides with the module axis".into()));
        }
        let half_angle = self.friction.atan();
        Ok([
            arm.cross(self.normal),
            arm.cross(self.normal.rotated(half_angle)),
            arm.cross(self.normal.rotated(-half_angle)),
        ])
    }
}

/// Moment is linear in the force, so checking the cone's extreme rays is
/// enough.
pub fn moment_sign(contact: &OverhangContact) -> Result<MomentSign> {
    let moments = contact.ray_moments()?;
    Ok(if moments.iter().any(|m| *m > 0.0) { MomentSign::Positive } else { MomentSign::NonPositive })
}
