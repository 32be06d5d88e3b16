//! Robust parameter design for an arc-blended stair-climbing wheel.
//!
//! The crate covers two halves of the workflow:
//!
//! * [`design_space`]: wheel profile geometry, transverse-alteration metrics,
//!   control-factor bounds and the overhang moment test that caps the number
//!   of child circles.
//! * [`taguchi`], [`gra`], [`anova`]: an L9(3^3) orthogonal-array
//!   experiment, smaller-the-better S/N ratios, grey relational analysis over
//!   several attributes, variance decomposition of the grades and the
//!   additive prediction at the optimal setting.
//!
//! [`pipeline`] ties them together behind a config file and the
//! `robust-wheel` command-line tool.

pub mod anova;
pub mod design_space;
pub mod error;
pub mod gra;
pub mod pipeline;
pub mod taguchi;

pub use error::{Error, Result};
