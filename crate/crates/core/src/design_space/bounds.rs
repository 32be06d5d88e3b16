use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::design_space::overhang::FeasibilitySearch;
use crate::design_space::stair::{ModuleGeometry, StairSpec};
use crate::error::{Error, Result};

/// Fixed module-length bounds, mm. They come from tip-over and traction
/// limits of the module and are used as constants.
pub const MODULE_LENGTH_BOUNDS: (f64, f64) = (210.96, 352.37);

/// Parent-radius range: the outer radius must reach the largest overhang,
/// and the outer diameter must stay within three quarters of the smallest
/// riser.
pub fn rp_bounds(child_radius: f64, o_max: f64, riser_min: f64) -> Result<(f64, f64)> {
    for (name, v) in [("child radius", child_radius), ("o_max", o_max), ("riser_min", riser_min)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be non-negative, got {v}")));
        }
    }
    let lower = o_max - child_radius;
    let upper = 0.375 * riser_min - child_radius;
    if lower > upper {
        return Err(Error::InfeasibleBounds { lower, upper });
    }
    Ok((lower, upper))
}

/// Smallest child count whose circles, laid side by side, cover the parent
/// circumference.
pub fn nc_lower_bound(parent_radius: f64, child_radius: f64) -> u32 {
    (PI * parent_radius / child_radius).ceil() as u32
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignBounds {
    pub rp_min: f64,
    pub rp_max: f64,
    pub lm_min: f64,
    pub lm_max: f64,
    pub nc_min: u32,
    pub nc_max: u32,
}

/// Everything needed to assemble [`DesignBounds`].
#[derive(Debug, Clone, Copy)]
pub struct BoundsInputs {
    pub child_radius: f64,
    pub o_max: f64,
    pub riser_min: f64,
    pub module_length_bounds: (f64, f64),
    /// Parent radius at which the child-count range is evaluated (the
    /// largest parent radius under study).
    pub design_parent_radius: f64,
    /// Stair used for the overhang check, normally the lowest riser with the
    /// largest overhang.
    pub stair: StairSpec,
    pub module: ModuleGeometry,
    pub search: FeasibilitySearch,
}

pub fn design_bounds(inputs: &BoundsInputs) -> Result<DesignBounds> {
    let (rp_min, rp_max) = rp_bounds(inputs.child_radius, inputs.o_max, inputs.riser_min)?;
    let (lm_min, lm_max) = inputs.module_length_bounds;
    if lm_min > lm_max {
        return Err(Error::InfeasibleBounds { lower: lm_min, upper: lm_max });
    }
    let nc_min = nc_lower_bound(inputs.design_parent_radius, inputs.child_radius);
    let nc_max =
        inputs.search.upper_bound(inputs.design_parent_radius, inputs.child_radius, &inputs.stair, &inputs.module)?;
    Ok(DesignBounds { rp_min, rp_max, lm_min, lm_max, nc_min, nc_max })
}

impl DesignBounds {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("parameter,min,max,unit\n");
        let _ = writeln!(s, "parent_radius,{:.6},{:.6},mm", self.rp_min, self.rp_max);
        let _ = writeln!(s, "module_length,{:.6},{:.6},mm", self.lm_min, self.lm_max);
        let _ = writeln!(s, "child_count,{},{},count", self.nc_min, self.nc_max);
        s
    }

    /// Plain-text block. A `reference_rp_min` different from the computed
    /// lower bound is called out explicitly.
    pub fn to_text(&self, reference_rp_min: Option<f64>) -> String {
        let mut s = String::from("Design bounds\n");
        let _ = writeln!(s, "  parent radius r_p : {:.2} mm .. {:.2} mm", self.rp_min, self.rp_max);
        let _ = writeln!(s, "  module length l_m : {:.2} mm .. {:.2} mm", self.lm_min, self.lm_max);
        let _ = writeln!(s, "  child count n_c   : {} .. {}", self.nc_min, self.nc_max);
        if let Some(reference) = reference_rp_min {
            let dev = self.rp_min - reference;
            if dev.abs() > 1e-9 {
                let _ = writeln!(
                    s,
                    "  note: r_p lower bound {:.2} mm = o_max - r_c deviates from the reference value {:.2} mm by {:+.2} mm",
                    self.rp_min, reference, dev
                );
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parent_radius_bounds() {
        let (lo, hi) = rp_bounds(10.0, 31.75, 177.8).unwrap();
        assert!((hi - 56.675).abs() < 1e-12);
        assert!((lo - 21.75).abs() < 1e-12);
        let (lo, hi) = rp_bounds(0.0, 10.0, 26.667).unwrap();
        assert!((lo - 10.0).abs() < 1e-3 && (hi - 10.0).abs() < 1e-3);
    }

    #[test]
    fn infeasible_parent_radius() {
        assert!(matches!(rp_bounds(10.0, 80.0, 177.8), Err(Error::InfeasibleBounds { .. })));
    }

    #[test]
    fn child_count_lower_bound() {
        assert_eq!(nc_lower_bound(50.0, 10.0), 16);
        assert_eq!(nc_lower_bound(40.0, 10.0), 13);
        assert_eq!(nc_lower_bound(7.0, 7.0), 4);
    }

    #[test]
    fn lower_bound_monotone() {
        let mut prev = 0;
        for i in 0..400 {
            let rp = 5.0 + 0.25 * f64::from(i);
            let n = nc_lower_bound(rp, 10.0);
            assert!(n >= prev);
            prev = n;
        }
        let mut prev = u32::MAX;
        for i in 0..400 {
            let rc = 2.0 + 0.1 * f64::from(i);
            let n = nc_lower_bound(50.0, rc);
            assert!(n <= prev);
            prev = n;
        }
    }

    #[test]
    fn text_flags_reference_deviation() {
        let b = DesignBounds { rp_min: 21.75, rp_max: 56.675, lm_min: 210.96, lm_max: 352.37, nc_min: 16, nc_max: 20 };
        let t = b.to_text(Some(21.25));
        assert!(t.contains("deviates"), "{t}");
        assert!(t.contains("+0.50 mm"));
        assert!(!b.to_text(Some(21.75)).contains("deviates"));
        assert!(b.to_csv().contains("child_count,16,20,count"));
    }
}
