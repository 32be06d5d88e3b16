//! Wheel and stair geometry: arc-blended profiles, transverse-alteration
//! metrics, control-factor bounds and the overhang climb test.

pub mod bounds;
pub mod contact;
pub mod export;
pub mod geom;
pub mod overhang;
pub mod stair;
pub mod wheel;

pub use bounds::{design_bounds, nc_lower_bound, rp_bounds, BoundsInputs, DesignBounds, MODULE_LENGTH_BOUNDS};
pub use contact::{moment_sign, MomentSign, OverhangContact};
pub use geom::Vec2;
pub use overhang::{circular_wheel_configuration, nc_upper_bound, FeasibilitySearch, OverhangConfiguration};
pub use stair::{JointStiffness, ModuleGeometry, StairSpec, IBC_MAX_OVERHANG};
pub use wheel::{
    rolling_height, transverse_amplitude, transverse_frequency, wheel_profile, ArcSegment, WheelProfile, WheelSpec,
};
