//! Profile export: SVG (exact arcs) and sampled polyline CSV.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::design_space::wheel::WheelProfile;

/// Default polyline step, 0.1 degree.
pub const DEFAULT_POLYLINE_STEP_DEG: f64 = 0.1;

/// Closed path of circular arcs in millimetres. Drawing coordinates are the
/// wheel frame (`y` up) flipped by a group transform.
pub fn profile_svg(profile: &WheelProfile) -> String {
    let extent = profile.max_radius().ceil() + 2.0;
    let size = 2.0 * extent;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}mm" height="{size}mm" viewBox="{neg} {neg} {size} {size}">"#,
        neg = -extent
    );
    let w = &profile.wheel;
    let _ = writeln!(
        svg,
        "  <title>wheel r_p={} mm r_c={} mm n_c={}</title>",
        w.parent_radius, w.child_radius, w.child_count
    );
    let _ = writeln!(svg, r#"  <g transform="scale(1,-1)">"#);
    let _ = write!(svg, r#"    <path fill="none" stroke="black" stroke-width="0.3" d=""#);
    if let Some(first) = profile.arcs.first() {
        let s = first.start();
        let _ = write!(svg, "M {:.6} {:.6}", s.x, s.y);
    }
    for arc in &profile.arcs {
        let e = arc.end();
        let large = u8::from(arc.sweep() > PI);
        let _ = write!(svg, " A {r:.6} {r:.6} 0 {large} 1 {:.6} {:.6}", e.x, e.y, r = arc.radius);
    }
    let _ = writeln!(svg, r#" Z"/>"#);
    let _ = writeln!(
        svg,
        r#"    <circle cx="0" cy="0" r="{:.6}" fill="none" stroke="grey" stroke-width="0.15" stroke-dasharray="1 1"/>"#,
        w.parent_radius
    );
    let _ = writeln!(svg, "  </g>");
    let _ = writeln!(svg, "</svg>");
    svg
}

/// `x_mm,y_mm` rows sampled every `step_deg` degrees of polar angle.
pub fn profile_polyline_csv(profile: &WheelProfile, step_deg: f64) -> String {
    let mut out = String::from("x_mm,y_mm\n");
    for p in profile.sample(step_deg.to_radians()) {
        let _ = writeln!(out, "{:.6},{:.6}", p.x, p.y);
    }
    out
}
