//! Upper bound on the child-circle count from the overhang geometry.
//!
//! Placement, in the absolute frame (`x` forward, `y` up, ground `y = 0`):
//!
//! * the riser face the climbing wheel presses against is the line `x = 0`;
//! * the lower tip of the overhang sits at `(-o, riser - nosing_thickness)`;
//! * the rear wheel of the front module stands on the ground `l_m` behind
//!   the climbing wheel (axle to axle), its axle at height `r_p + r_c`. That
//!   axle is the module's rotation axis `A`.
//!
//! Relative to the climbing wheel's centre, child `0` (centre angle `phi1`
//! from the horizontal) touches the riser face and child `p` touches the
//! tip at angle `phi2` clockwise from its outward radial line. The tip also
//! sits level with the top of child `p - 1`. The closure equations are
//!
//! ```text
//! r_p cos(phi1) + r_c - o  = r_p cos(phi1 + p d) + r_c cos(phi1 + p d - phi2)
//! r_p sin(phi1 + (p-1) d) + r_c = r_p sin(phi1 + p d) + r_c sin(phi1 + p d - phi2)
//! ```
//!
//! with `d = 2 pi / n`. `phi4` is the angle of the contact normal with the
//! horizontal and `phi3` the angle of the line from `A` to the tip; the
//! normal reaction turns the module counter-clockwise iff `phi4 <= phi3`.

use std::f64::consts::TAU;

use crate::design_space::bounds::nc_lower_bound;
use crate::design_space::contact::OverhangContact;
use crate::design_space::geom::{wrap_pi, Vec2};
use crate::design_space::stair::{ModuleGeometry, StairSpec};
use crate::error::{Error, Result};

/// One solution of the closure equations, with the derived angles and the
/// absolute positions needed to build an [`OverhangContact`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverhangConfiguration {
    pub child_count: u32,
    /// Child steps between the riser-touching child and the tip-touching one.
    pub steps: u32,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
    pub wheel_center: Vec2,
    pub contact_circle_center: Vec2,
    pub tip: Vec2,
    pub axis: Vec2,
}

impl OverhangConfiguration {
    pub fn normal_turns_module(&self) -> bool {
        self.phi4 <= self.phi3
    }

    pub fn contact(&self, friction: f64) -> Result<OverhangContact> {
        OverhangContact::toward(self.tip, self.contact_circle_center, self.axis, friction)
    }
}

/// Exhaustive feasibility search over child counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilitySearch {
    /// Grid points over `phi1` per step count.
    pub grid_points: usize,
    /// Relative tolerance on the closure equations.
    pub tolerance: f64,
    /// Largest child count examined.
    pub max_child_count: u32,
    /// Enforce `phi4 <= phi3`. Disabling it models unlimited friction.
    pub require_moment: bool,
}

impl Default for FeasibilitySearch {
    fn default() -> Self {
        Self { grid_points: 1000, tolerance: 1e-6, max_child_count: 64, require_moment: true }
    }
}

struct Problem<'a> {
    rp: f64,
    rc: f64,
    n: u32,
    delta: f64,
    stair: &'a StairSpec,
    module: &'a ModuleGeometry,
}

impl Problem<'_> {
    /// Tip position relative to the wheel centre for a given `phi1`.
    fn tip(&self, phi1: f64, steps: u32) -> Vec2 {
        let x = self.rp * phi1.cos() + self.rc - self.stair.overhang;
        let y = self.rp * (phi1 + f64::from(steps - 1) * self.delta).sin() + self.rc;
        Vec2::new(x, y)
    }

    fn child_center(&self, phi1: f64, steps: u32) -> Vec2 {
        Vec2::from_polar(self.rp, phi1 + f64::from(steps) * self.delta)
    }

    fn closure_gap(&self, phi1: f64, steps: u32) -> f64 {
        let d = self.tip(phi1, steps) - self.child_center(phi1, steps);
        d.dot(d) - self.rc * self.rc
    }

    fn phi2_max(&self) -> f64 {
        let half = self.delta / 2.0;
        half + (self.rp * half.sin() / self.rc).min(1.0).asin()
    }

    fn within(&self, lhs: f64, rhs: f64, tol: f64) -> bool {
        (lhs - rhs).abs() <= tol * rhs.abs().max(1.0)
    }

    fn build(&self, phi1: f64, steps: u32, tol: f64) -> Option<OverhangConfiguration> {
        let (rp, rc, d) = (self.rp, self.rc, self.delta);
        let center = self.child_center(phi1, steps);
        let tip_rel = self.tip(phi1, steps);
        let a = phi1 + f64::from(steps) * d;
        let phi2 = wrap_pi(a - (tip_rel - center).angle());

        let eps = 1e-12;
        if !(-d / 2.0 < phi1 && phi1 <= d / 2.0 + eps) {
            return None;
        }
        if !(-eps <= phi2 && phi2 <= self.phi2_max() + eps) {
            return None;
        }
        // Neighbours of the riser-touching child stay behind the riser face.
        if rp * (phi1 + d).cos() > rp * phi1.cos() + eps || rp * (phi1 - d).cos() > rp * phi1.cos() + eps {
            return None;
        }
        let lhs3 = rp * phi1.cos() + rc - self.stair.overhang;
        let rhs3 = rp * a.cos() + rc * (a - phi2).cos();
        let lhs5 = rp * (a - d).sin() + rc;
        let rhs5 = rp * a.sin() + rc * (a - phi2).sin();
        if !self.within(lhs3, rhs3, tol) || !self.within(lhs5, rhs5, tol) {
            return None;
        }

        let tip = Vec2::new(-self.stair.overhang, self.stair.tip_height());
        let wheel_center = tip - tip_rel;
        let axle_height = rp + rc;
        let rise = wheel_center.y - axle_height;
        let length = self.module.module_length;
        if rise.abs() > length {
            return None;
        }
        let axis = Vec2::new(wheel_center.x - (length * length - rise * rise).sqrt(), axle_height);
        let phi3 = (tip - axis).angle();
        let phi4 = a - phi2;
        Some(OverhangConfiguration {
            child_count: self.n,
            steps,
            phi1,
            phi2,
            phi3,
            phi4,
            wheel_center,
            contact_circle_center: wheel_center + center,
            tip,
            axis,
        })
    }
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl FeasibilitySearch {
    /// Every configuration satisfying the closure equations and variable
    /// ranges, ignoring the moment condition.
    pub fn configurations(
        &self,
        parent_radius: f64,
        child_radius: f64,
        child_count: u32,
        stair: &StairSpec,
        module: &ModuleGeometry,
    ) -> Vec<OverhangConfiguration> {
        let problem = Problem {
            rp: parent_radius,
            rc: child_radius,
            n: child_count,
            delta: TAU / f64::from(child_count),
            stair,
            module,
        };
        let d = problem.delta;
        let n_grid = self.grid_points.max(2);
        let max_steps = child_count.div_ceil(4);
        let mut out = Vec::new();
        for steps in 1..=max_steps {
            let gap = |phi1: f64| problem.closure_gap(phi1, steps);
            let grid = (0..n_grid).map(|i| -d / 2.0 + d * (i + 1) as f64 / n_grid as f64);
            let mut prev: Option<(f64, f64)> = None;
            for phi1 in grid {
                let g = gap(phi1);
                let root = match prev {
                    _ if g == 0.0 => Some(phi1),
                    Some((p, gp)) if gp != 0.0 && (gp < 0.0) != (g < 0.0) => Some(bisect(p, phi1, gap)),
                    _ => None,
                };
                if let Some(cfg) = root.and_then(|r| problem.build(r, steps, self.tolerance)) {
                    out.push(cfg);
                }
                prev = Some((phi1, g));
            }
        }
        out
    }

    /// A configuration witnessing feasibility of `child_count`, if any.
    pub fn witness(
        &self,
        parent_radius: f64,
        child_radius: f64,
        child_count: u32,
        stair: &StairSpec,
        module: &ModuleGeometry,
    ) -> Option<OverhangConfiguration> {
        self.configurations(parent_radius, child_radius, child_count, stair, module)
            .into_iter()
            .find(|c| !self.require_moment || c.normal_turns_module())
    }

    /// Child counts in `range` that admit a feasible configuration.
    pub fn feasible_counts(
        &self,
        parent_radius: f64,
        child_radius: f64,
        range: std::ops::RangeInclusive<u32>,
        stair: &StairSpec,
        module: &ModuleGeometry,
    ) -> Vec<u32> {
        range.filter(|&n| n >= 3 && self.witness(parent_radius, child_radius, n, stair, module).is_some()).collect()
    }

    pub fn upper_bound(
        &self,
        parent_radius: f64,
        child_radius: f64,
        stair: &StairSpec,
        module: &ModuleGeometry,
    ) -> Result<u32> {
        check_radii(parent_radius, child_radius)?;
        let lower = nc_lower_bound(parent_radius, child_radius);
        self.feasible_counts(parent_radius, child_radius, lower..=self.max_child_count, stair, module)
            .last()
            .copied()
            .ok_or(Error::NoFeasibleN { lower, searched_to: self.max_child_count })
    }
}

fn check_radii(parent_radius: f64, child_radius: f64) -> Result<()> {
    if parent_radius.is_finite() && parent_radius > 0.0 && child_radius.is_finite() && child_radius > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("radii must be positive, got r_p = {parent_radius}, r_c = {child_radius}")))
    }
}

/// Largest child count whose overhang contact still turns the module
/// counter-clockwise, using the default search settings.
pub fn nc_upper_bound(
    parent_radius: f64,
    child_radius: f64,
    stair: &StairSpec,
    module: &ModuleGeometry,
) -> Result<u32> {
    FeasibilitySearch::default().upper_bound(parent_radius, child_radius, stair, module)
}

/// The same placement for a plain circular wheel of radius `radius`: the
/// wheel presses against the riser face and meets the overhang either at the
/// tip (normal through the wheel centre) or, when the overhang is longer
/// than the radius, on the flat underside (normal straight down).
pub fn circular_wheel_configuration(
    radius: f64,
    stair: &StairSpec,
    module: &ModuleGeometry,
) -> Result<(OverhangContact, Vec2)> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput(format!("wheel radius must be positive, got {radius}")));
    }
    let tip = Vec2::new(-stair.overhang, stair.tip_height());
    let (center, contact_point) = if stair.overhang < radius {
        let dx = radius - stair.overhang;
        let center = Vec2::new(-radius, tip.y - (radius * radius - dx * dx).sqrt());
        (center, tip)
    } else {
        let center = Vec2::new(-radius, tip.y - radius);
        (center, Vec2::new(-radius, tip.y))
    };
    let rise = center.y - radius;
    let length = module.module_length;
    if rise.abs() > length {
        return Err(Error::DegenerateGeometry("module is shorter than the wheel rise".into()));
    }
    let axis = Vec2::new(center.x - (length * length - rise * rise).sqrt(), radius);
    let contact = OverhangContact::toward(contact_point, center, axis, stair.friction)?;
    Ok((contact, center))
}
