use crate::error::{Error, Result};

/// Maximum nosing projection allowed by the International Building Code, mm.
pub const IBC_MAX_OVERHANG: f64 = 31.75;

/// One stair geometry used as a noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StairSpec {
    /// Riser height, mm.
    pub riser: f64,
    /// Tread depth, mm.
    pub tread: f64,
    /// Nosing projection beyond the riser face, mm.
    pub overhang: f64,
    /// Coulomb friction coefficient between wheel and nosing.
    pub friction: f64,
    /// Vertical thickness of the nosing. The lower tip of the overhang sits
    /// this far below the next tread surface.
    pub nosing_thickness: f64,
}

impl StairSpec {
    pub fn new(riser: f64, tread: f64, overhang: f64, friction: f64, nosing_thickness: f64) -> Result<Self> {
        let stair = Self { riser, tread, overhang, friction, nosing_thickness };
        let problems = stair.problems(None);
        if problems.is_empty() {
            Ok(stair)
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Like [`StairSpec::new`] but also enforces `overhang <= o_max`.
    pub fn new_ibc(
        riser: f64,
        tread: f64,
        overhang: f64,
        friction: f64,
        nosing_thickness: f64,
        o_max: f64,
    ) -> Result<Self> {
        let stair = Self { riser, tread, overhang, friction, nosing_thickness };
        let problems = stair.problems(Some(o_max));
        if problems.is_empty() {
            Ok(stair)
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Every violated invariant, as human-readable messages.
    pub fn problems(&self, o_max: Option<f64>) -> Vec<String> {
        let mut out = Vec::new();
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !positive(self.riser) {
            out.push(format!("riser must be positive, got {}", self.riser));
        }
        if !positive(self.tread) {
            out.push(format!("tread must be positive, got {}", self.tread));
        }
        if !nonneg(self.overhang) {
            out.push(format!("overhang must be non-negative, got {}", self.overhang));
        }
        if !nonneg(self.friction) {
            out.push(format!("friction coefficient must be non-negative, got {}", self.friction));
        }
        if !nonneg(self.nosing_thickness) || self.nosing_thickness >= self.riser {
            out.push(format!("nosing thickness must lie in [0, riser), got {}", self.nosing_thickness));
        }
        if let Some(o_max) = o_max {
            if self.overhang > o_max {
                out.push(format!("overhang {} exceeds the allowed maximum {o_max}", self.overhang));
            }
        }
        out
    }

    /// Height of the lower overhang tip above the tread below it.
    pub fn tip_height(&self) -> f64 {
        self.riser - self.nosing_thickness
    }
}

/// Torsion spring constants at the two module joints, N·mm/deg. `plus`
/// opposes counter-clockwise moments, `minus` clockwise ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointStiffness {
    pub k1_plus: f64,
    pub k1_minus: f64,
    pub k2_plus: f64,
    pub k2_minus: f64,
}

impl Default for JointStiffness {
    fn default() -> Self {
        Self { k1_plus: 74.47, k1_minus: 67.56, k2_plus: 48.89, k2_minus: 57.61 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuleGeometry {
    /// Axle-to-axle module length, mm.
    pub module_length: f64,
    /// Ground clearance of the module link, mm.
    pub clearance: f64,
    pub stiffness: JointStiffness,
}

impl ModuleGeometry {
    pub const DEFAULT_CLEARANCE: f64 = 100.0;

    pub fn new(module_length: f64) -> Result<Self> {
        Self::with_constants(module_length, Self::DEFAULT_CLEARANCE, JointStiffness::default())
    }

    pub fn with_constants(module_length: f64, clearance: f64, stiffness: JointStiffness) -> Result<Self> {
        let mut problems = Vec::new();
        if !(module_length.is_finite() && module_length > 0.0) {
            problems.push(format!("module length must be positive, got {module_length}"));
        }
        if !(clearance.is_finite() && clearance >= 0.0) {
            problems.push(format!("clearance must be non-negative, got {clearance}"));
        }
        let k = stiffness;
        if [k.k1_plus, k.k1_minus, k.k2_plus, k.k2_minus].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            problems.push("spring constants must be non-negative".to_string());
        }
        if problems.is_empty() {
            Ok(Self { module_length, clearance, stiffness })
        } else {
            Err(Error::Validation(problems))
        }
    }
}
