//! Browser bindings for the wheel geometry and the grey relational study.
//!
//! Every export returns a JSON string. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested natively.

use robust_wheel::design_space::export::profile_svg;
use robust_wheel::design_space::{
    circular_wheel_configuration, moment_sign, wheel_profile, FeasibilitySearch, ModuleGeometry, StairSpec, Vec2,
    WheelSpec,
};
use robust_wheel::pipeline::dataset::{study_config, study_responses};
use robust_wheel::pipeline::run_analysis;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const RISER: f64 = 177.8;
const TREAD: f64 = 279.4;
const NOSING: f64 = 25.4;
const MODULE_LENGTH: f64 = 352.37;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Profile SVG and transverse metrics for one wheel.
pub fn wheel_json(rp: f64, rc: f64, nc: u32) -> Result<Value, String> {
    let wheel = WheelSpec::new(rp, rc, nc).map_err(err)?;
    let profile = wheel_profile(&wheel).map_err(err)?;
    Ok(json!({
        "svg": profile_svg(&profile),
        "amplitude": wheel.transverse_amplitude(),
        "frequency": wheel.transverse_frequency(),
        "outer_radius": wheel.outer_radius(),
        "min_child_count": wheel.min_child_count(),
    }))
}

/// Re-runs the shipped study with new attribute weights, zeta and F
/// threshold. Weights are rescaled to sum to one.
pub fn study_json(weights: &[f64], zeta: f64, f_critical: f64) -> Result<Value, String> {
    let mut config = study_config().map_err(err)?;
    if weights.len() != config.attributes.len() {
        return Err(format!("expected {} weights, got {}", config.attributes.len(), weights.len()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err("weights must be non-negative".into());
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err("at least one weight must be positive".into());
    }
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(format!("zeta must be positive, got {zeta}"));
    }
    config.weights = weights.iter().map(|w| w / total).collect();
    config.zeta = zeta;
    config.f_critical = f_critical;
    let report = run_analysis(&config, &study_responses().map_err(err)?).map_err(err)?;

    let runs: Vec<Value> = (0..report.plan.run_count())
        .map(|i| {
            json!({
                "run": i + 1,
                "levels": report.plan.runs[i],
                "sn": report.sn.0[i],
                "amplitude": report.wheels[i].amplitude,
                "frequency": report.wheels[i].frequency,
                "coefficients": report.grey.coefficients[i],
                "grade": report.grey.grades[i],
                "rank": report.grey.ranks[i],
            })
        })
        .collect();
    let factors: Vec<Value> = report
        .influence
        .factors
        .iter()
        .map(|f| {
            let row = report.anova.row(&f.key);
            json!({
                "key": f.key,
                "name": f.name,
                "unit": f.unit,
                "values": f.values,
                "averages": f.averages,
                "optimal_level": f.optimal_level,
                "f": row.map(|r| if r.f.is_finite() { json!(r.f) } else { json!("inf") }),
                "contribution_pct": row.map(|r| r.contribution_pct),
            })
        })
        .collect();
    Ok(json!({
        "attributes": config.attributes.iter().map(|a| a.name.clone()).collect::<Vec<_>>(),
        "weights": config.weights,
        "runs": runs,
        "factors": factors,
        "mean_grade": report.influence.mean_grade,
        "error_contribution_pct": report.anova.error_contribution_pct,
        "optimal": report.optimal_label(),
        "significant": report.significant,
        "predicted_grade": report.prediction.as_ref().map(|p| p.predicted_grade),
        "warnings": report.warnings,
    }))
}

fn polyline(points: impl IntoIterator<Item = Vec2>) -> String {
    points.into_iter().map(|p| format!("{:.3},{:.3}", p.x, p.y)).collect::<Vec<_>>().join(" ")
}

/// Places the arc wheel and a circular wheel of the same outer radius under
/// one overhang and reports which of them the module can lift.
pub fn overhang_json(rp: f64, rc: f64, nc: u32, overhang: f64, friction: f64) -> Result<Value, String> {
    let wheel = WheelSpec::new(rp, rc, nc).map_err(err)?;
    let profile = wheel_profile(&wheel).map_err(err)?;
    let stair = StairSpec::new(RISER, TREAD, overhang, friction, NOSING).map_err(err)?;
    let module = ModuleGeometry::new(MODULE_LENGTH).map_err(err)?;
    let search = FeasibilitySearch { require_moment: false, ..FeasibilitySearch::default() };

    let tip = Vec2::new(-stair.overhang, stair.tip_height());
    let mut shapes = vec![format!(
        r#"<polyline class="stair" points="{}"/>"#,
        polyline([
            Vec2::new(-450.0, 0.0),
            Vec2::new(0.0, 0.0),
            Vec2::new(0.0, tip.y),
            tip,
            Vec2::new(-stair.overhang, stair.riser),
            Vec2::new(TREAD - stair.overhang, stair.riser),
        ])
    )];

    let configs = search.configurations(rp, rc, nc, &stair, &module);
    let arc = match configs.iter().find(|c| c.normal_turns_module()).or(configs.first()) {
        Some(c) => {
            let sign = moment_sign(&c.contact(friction).map_err(err)?).map_err(err)?;
            let turn = (c.contact_circle_center - c.wheel_center).angle();
            let outline = profile.rotated(turn).sample(1f64.to_radians()).into_iter().map(|p| p + c.wheel_center);
            shapes.push(format!(r#"<polygon class="arc" points="{}"/>"#, polyline(outline)));
            shapes.push(format!(
                r#"<line class="normal" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
                c.tip.x, c.tip.y, c.contact_circle_center.x, c.contact_circle_center.y
            ));
            shapes.push(format!(
                r#"<line class="module" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
                c.axis.x, c.axis.y, c.wheel_center.x, c.wheel_center.y
            ));
            json!({
                "placed": true,
                "verdict": sign.verdict(),
                "phi1_deg": c.phi1.to_degrees(),
                "phi2_deg": c.phi2.to_degrees(),
                "phi3_deg": c.phi3.to_degrees(),
                "phi4_deg": c.phi4.to_degrees(),
            })
        }
        None => json!({ "placed": false, "verdict": "no contact configuration" }),
    };

    let radius = wheel.outer_radius();
    let circle = match circular_wheel_configuration(radius, &stair, &module) {
        Ok((contact, center)) => {
            let sign = moment_sign(&contact).map_err(err)?;
            shapes
                .push(format!(r#"<circle class="round" cx="{:.3}" cy="{:.3}" r="{radius:.3}"/>"#, center.x, center.y));
            json!({
                "placed": true,
                "verdict": sign.verdict(),
                "normal_deg": (-contact.normal).angle().to_degrees(),
                "tip_deg": (contact.point - contact.axis).angle().to_degrees(),
            })
        }
        Err(e) => json!({ "placed": false, "verdict": e.to_string() }),
    };

    let svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-250 -250 330 280"><g transform="scale(1,-1)">{}</g></svg>"#,
        shapes.join("")
    );
    Ok(json!({ "arc": arc, "circle": circle, "svg": svg }))
}

fn to_js(result: Result<Value, String>) -> Result<String, JsValue> {
    result.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn wheel(rp: f64, rc: f64, nc: u32) -> Result<String, JsValue> {
    to_js(wheel_json(rp, rc, nc))
}

#[wasm_bindgen]
pub fn study(w_power: f64, w_amplitude: f64, w_frequency: f64, zeta: f64, f_critical: f64) -> Result<String, JsValue> {
    to_js(study_json(&[w_power, w_amplitude, w_frequency], zeta, f_critical))
}

#[wasm_bindgen]
pub fn overhang(rp: f64, rc: f64, nc: u32, overhang: f64, friction: f64) -> Result<String, JsValue> {
    to_js(overhang_json(rp, rc, nc, overhang, friction))
}
