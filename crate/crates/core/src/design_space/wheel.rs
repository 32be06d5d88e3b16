//! Arc-blended wheel geometry.
//!
//! The wheel periphery is the outer envelope of `n_c` child circles of radius
//! `r_c` whose centres sit evenly on a parent circle of radius `r_p`. Child
//! `k` is centred at polar angle `k * 2pi / n_c`.

use std::f64::consts::{PI, TAU};

use crate::design_space::geom::{wrap_pi, Vec2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WheelSpec {
    /// Parent circle radius, mm.
    pub parent_radius: f64,
    /// Child circle radius, mm.
    pub child_radius: f64,
    /// Number of child circles.
    pub child_count: u32,
}

impl WheelSpec {
    pub fn new(parent_radius: f64, child_radius: f64, child_count: u32) -> Result<Self> {
        if !(parent_radius.is_finite() && parent_radius > 0.0) {
            return Err(Error::InvalidInput(format!("parent radius must be positive, got {parent_radius}")));
        }
        if !(child_radius.is_finite() && child_radius > 0.0) {
            return Err(Error::InvalidInput(format!("child radius must be positive, got {child_radius}")));
        }
        if child_count < 3 {
            return Err(Error::InvalidInput(format!("a wheel needs at least 3 child circles, got {child_count}")));
        }
        Ok(Self { parent_radius, child_radius, child_count })
    }

    /// Angle between neighbouring child centres.
    pub fn spacing(&self) -> f64 {
        TAU / f64::from(self.child_count)
    }

    pub fn outer_radius(&self) -> f64 {
        self.parent_radius + self.child_radius
    }

    /// Smallest child count for which the child circles leave no parent
    /// circle exposed.
    pub fn min_child_count(&self) -> u32 {
        super::bounds::nc_lower_bound(self.parent_radius, self.child_radius)
    }

    pub fn is_non_disjoint(&self) -> bool {
        self.child_count >= self.min_child_count()
    }

    /// Peak-to-trough oscillation of the hub height while rolling on flat
    /// ground.
    pub fn transverse_amplitude(&self) -> f64 {
        transverse_amplitude(self)
    }

    pub fn transverse_frequency(&self) -> u32 {
        transverse_frequency(self)
    }
}

pub fn transverse_amplitude(wheel: &WheelSpec) -> f64 {
    wheel.parent_radius * (1.0 - (PI / f64::from(wheel.child_count)).cos())
}

/// Alterations per wheel revolution: one per child circle.
pub fn transverse_frequency(wheel: &WheelSpec) -> u32 {
    wheel.child_count
}

/// Hub height above flat ground at a given roll angle.
///
/// The roll angle is reduced into the child sector `[-pi/n_c, pi/n_c]`; the
/// result is the angle of the supporting child centre from the downward
/// vertical.
pub fn rolling_height(wheel: &WheelSpec, roll_angle: f64) -> f64 {
    let delta = wheel.spacing();
    let phi = roll_angle - delta * (roll_angle / delta).round();
    wheel.child_radius + wheel.parent_radius * phi.cos()
}

/// One circular-arc piece of the periphery. Angles are radians measured at
/// `center`, traversed counter-clockwise from `start_angle` to `end_angle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSegment {
    pub center: Vec2,
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
}

impl ArcSegment {
    pub fn point_at(&self, angle: f64) -> Vec2 {
        self.center + Vec2::from_polar(self.radius, angle)
    }

    pub fn start(&self) -> Vec2 {
        self.point_at(self.start_angle)
    }

    pub fn end(&self) -> Vec2 {
        self.point_at(self.end_angle)
    }

    pub fn sweep(&self) -> f64 {
        self.end_angle - self.start_angle
    }

    pub fn contains_angle(&self, angle: f64) -> bool {
        let rel = (angle - self.start_angle).rem_euclid(TAU);
        rel <= self.sweep() + 1e-12
    }

    /// Largest distance from the origin to any point on the arc.
    pub fn max_distance_from_origin(&self) -> f64 {
        let c = self.center.norm();
        if c > 0.0 && self.contains_angle(self.center.angle()) {
            c + self.radius
        } else {
            self.start().norm().max(self.end().norm())
        }
    }
}

/// Closed outer boundary of an arc-blended wheel, one arc per child circle,
/// ordered counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct WheelProfile {
    pub wheel: WheelSpec,
    pub arcs: Vec<ArcSegment>,
}

impl WheelProfile {
    /// Angular period of the boundary.
    pub fn period(&self) -> f64 {
        self.wheel.spacing()
    }

    /// Arc junctions, i.e. the outer intersection points of neighbouring
    /// child circles. Vertex `k` is the start of arc `k`.
    pub fn vertices(&self) -> Vec<Vec2> {
        self.arcs.iter().map(ArcSegment::start).collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.arcs.iter().map(ArcSegment::max_distance_from_origin).fold(0.0, f64::max)
    }

    /// Distance from the wheel centre to the boundary along polar angle
    /// `theta`.
    pub fn radius_at(&self, theta: f64) -> f64 {
        boundary_radius(&self.wheel, theta)
    }

    /// Boundary sampled at a fixed polar-angle step, starting at angle 0.
    pub fn sample(&self, angular_step: f64) -> Vec<Vec2> {
        let count = ((TAU / angular_step).round() as usize).max(3);
        (0..count)
            .map(|i| {
                let theta = TAU * i as f64 / count as f64;
                Vec2::from_polar(self.radius_at(theta), theta)
            })
            .collect()
    }

    pub fn rotated(&self, angle: f64) -> WheelProfile {
        let arcs = self
            .arcs
            .iter()
            .map(|a| ArcSegment {
                center: a.center.rotated(angle),
                radius: a.radius,
                start_angle: a.start_angle + angle,
                end_angle: a.end_angle + angle,
            })
            .collect();
        WheelProfile { wheel: self.wheel, arcs }
    }
}

/// Outer intersection distance of two neighbouring child circles, measured
/// from the wheel centre along their bisector.
fn junction_radius(wheel: &WheelSpec) -> f64 {
    let half = wheel.spacing() / 2.0;
    let (rp, rc) = (wheel.parent_radius, wheel.child_radius);
    let chord = rp * half.sin();
    rp * half.cos() + (rc * rc - chord * chord).max(0.0).sqrt()
}

fn boundary_radius(wheel: &WheelSpec, theta: f64) -> f64 {
    let delta = wheel.spacing();
    let local = wrap_pi(theta - delta * (theta / delta).round());
    let (rp, rc) = (wheel.parent_radius, wheel.child_radius);
    let off = rp * local.sin();
    rp * local.cos() + (rc * rc - off * off).max(0.0).sqrt()
}

pub fn wheel_profile(wheel: &WheelSpec) -> Result<WheelProfile> {
    let required = wheel.min_child_count();
    if wheel.child_count < required {
        return Err(Error::DisjointChildCircles { child_count: wheel.child_count, required });
    }
    let delta = wheel.spacing();
    let half = delta / 2.0;
    let junction = junction_radius(wheel);
    // Half-sweep of each arc, seen from its child centre.
    let local = Vec2::from_polar(junction, half) - Vec2::new(wheel.parent_radius, 0.0);
    let half_sweep = local.angle();

    let arcs = (0..wheel.child_count)
        .map(|k| {
            let theta = delta * f64::from(k);
            ArcSegment {
                center: Vec2::from_polar(wheel.parent_radius, theta),
                radius: wheel.child_radius,
                start_angle: theta - half_sweep,
                end_angle: theta + half_sweep,
            }
        })
        .collect();
    Ok(WheelProfile { wheel: *wheel, arcs })
}
