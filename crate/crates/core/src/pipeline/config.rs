//! Pipeline configuration.
//!
//! The file is TOML. Unknown keys are rejected, defaults are applied, and
//! every violated invariant is reported at once. See `data/paper.config` for
//! a complete, commented example.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::design_space::{
    bounds::MODULE_LENGTH_BOUNDS, FeasibilitySearch, JointStiffness, ModuleGeometry, StairSpec, WheelSpec,
    IBC_MAX_OVERHANG,
};
use crate::error::{Error, Result};
use crate::gra::{equal_weights, AttributeSource, AttributeSpec, Direction};
use crate::taguchi::{Factor, FactorRole};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    factors: Vec<RawFactor>,
    noise: RawNoise,
    attributes: Vec<RawAttribute>,
    #[serde(default)]
    analysis: RawAnalysis,
    #[serde(default)]
    geometry: RawGeometry,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    key: String,
    name: String,
    #[serde(default)]
    unit: String,
    parameter: Parameter,
    levels: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    #[serde(default = "yes")]
    ibc_validation: bool,
    stairs: Vec<RawStair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStair {
    name: String,
    riser: f64,
    tread: f64,
    overhang: f64,
    friction: f64,
    #[serde(default)]
    nosing_thickness: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAttribute {
    name: String,
    direction: RawDirection,
    source: RawSource,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum RawDirection {
    LargerIsBetter,
    SmallerIsBetter,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum RawSource {
    SnRatio,
    Amplitude,
    Frequency,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    #[serde(default = "default_zeta")]
    zeta: f64,
    #[serde(default = "default_f_critical")]
    f_critical: f64,
    weights: Option<Vec<f64>>,
    confirmation_grade: Option<f64>,
    #[serde(default = "default_seed")]
    seed: u64,
}

impl Default for RawAnalysis {
    fn default() -> Self {
        Self {
            zeta: default_zeta(),
            f_critical: default_f_critical(),
            weights: None,
            confirmation_grade: None,
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    #[serde(default = "default_child_radius")]
    child_radius: f64,
    #[serde(default = "default_o_max")]
    o_max: f64,
    rp_min_reference: Option<f64>,
    #[serde(default = "default_lm_bounds")]
    module_length_bounds: [f64; 2],
    design_module_length: Option<f64>,
    #[serde(default = "default_clearance")]
    clearance: f64,
    #[serde(default)]
    stiffness: RawStiffness,
    #[serde(default)]
    search: RawSearch,
}

impl Default for RawGeometry {
    fn default() -> Self {
        Self {
            child_radius: default_child_radius(),
            o_max: default_o_max(),
            rp_min_reference: None,
            module_length_bounds: default_lm_bounds(),
            design_module_length: None,
            clearance: default_clearance(),
            stiffness: RawStiffness::default(),
            search: RawSearch::default(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStiffness {
    k1_plus: f64,
    k1_minus: f64,
    k2_plus: f64,
    k2_minus: f64,
}

impl Default for RawStiffness {
    fn default() -> Self {
        let k = JointStiffness::default();
        Self { k1_plus: k.k1_plus, k1_minus: k.k1_minus, k2_plus: k.k2_plus, k2_minus: k.k2_minus }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSearch {
    #[serde(default = "default_grid_points")]
    grid_points: usize,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default = "default_max_child_count")]
    max_child_count: u32,
}

impl Default for RawSearch {
    fn default() -> Self {
        Self {
            grid_points: default_grid_points(),
            tolerance: default_tolerance(),
            max_child_count: default_max_child_count(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default = "default_out_dir")]
    dir: PathBuf,
    #[serde(default = "default_formats")]
    formats: Vec<OutputFormat>,
    #[serde(default = "default_step")]
    polyline_step_deg: f64,
}

impl Default for RawOutput {
    fn default() -> Self {
        Self { dir: default_out_dir(), formats: default_formats(), polyline_step_deg: default_step() }
    }
}

fn yes() -> bool {
    true
}
fn default_zeta() -> f64 {
    0.5
}
fn default_f_critical() -> f64 {
    10.0
}
fn default_seed() -> u64 {
    0x5eed
}
fn default_child_radius() -> f64 {
    10.0
}
fn default_o_max() -> f64 {
    IBC_MAX_OVERHANG
}
fn default_lm_bounds() -> [f64; 2] {
    [MODULE_LENGTH_BOUNDS.0, MODULE_LENGTH_BOUNDS.1]
}
fn default_clearance() -> f64 {
    ModuleGeometry::DEFAULT_CLEARANCE
}
fn default_grid_points() -> usize {
    FeasibilitySearch::default().grid_points
}
fn default_tolerance() -> f64 {
    FeasibilitySearch::default().tolerance
}
fn default_max_child_count() -> u32 {
    FeasibilitySearch::default().max_child_count
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Text, OutputFormat::Svg, OutputFormat::Polyline]
}
fn default_step() -> f64 {
    crate::design_space::export::DEFAULT_POLYLINE_STEP_DEG
}

/// Which wheel or module parameter a control factor sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    ModuleLength,
    ParentRadius,
    ChildCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Plan, grey, influence, ANOVA and bounds tables.
    Csv,
    /// Confirmation and bounds text blocks.
    Text,
    /// Wheel profiles as SVG.
    Svg,
    /// Wheel profiles as sampled `x_mm,y_mm` CSV.
    Polyline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedStair {
    pub name: String,
    pub stair: StairSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<OutputFormat>,
    pub polyline_step_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub factors: Vec<Factor>,
    /// Parameter set by each factor, same order as `factors`.
    pub parameters: Vec<Parameter>,
    pub stairs: Vec<NamedStair>,
    pub ibc_validation: bool,
    pub attributes: Vec<AttributeSpec>,
    pub weights: Vec<f64>,
    pub zeta: f64,
    pub f_critical: f64,
    pub confirmation_grade: Option<f64>,
    /// Seed for randomised checks driven by this configuration.
    pub seed: u64,
    pub child_radius: f64,
    pub o_max: f64,
    pub rp_min_reference: Option<f64>,
    pub module_length_bounds: (f64, f64),
    /// Module length used for the overhang check.
    pub module: ModuleGeometry,
    pub search: FeasibilitySearch,
    pub output: OutputConfig,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse_config(text: &str) -> Result<PipelineConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    validate(raw)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<PipelineConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

fn validate(raw: RawConfig) -> Result<PipelineConfig> {
    let mut problems = Vec::new();

    let mut factors = Vec::new();
    let mut parameters = Vec::new();
    for rf in &raw.factors {
        let factor = Factor {
            key: rf.key.clone(),
            name: rf.name.clone(),
            unit: rf.unit.clone(),
            levels: rf.levels.clone(),
            role: FactorRole::Control,
        };
        problems.extend(factor.problems());
        if rf.levels.len() != 3 {
            problems.push(format!("factor {} has {} levels; the L9 array requires 3", rf.key, rf.levels.len()));
        }
        match rf.parameter {
            Parameter::ChildCount => {
                if rf.levels.iter().any(|v| v.fract() != 0.0 || *v < 3.0) {
                    problems.push(format!("factor {}: child counts must be integers >= 3", rf.key));
                }
            }
            Parameter::ParentRadius | Parameter::ModuleLength => {
                if rf.levels.iter().any(|v| *v <= 0.0) {
                    problems.push(format!("factor {}: levels must be positive", rf.key));
                }
            }
        }
        if factors.iter().any(|f: &Factor| f.key == rf.key) {
            problems.push(format!("factor key {} is defined twice", rf.key));
        }
        if parameters.contains(&rf.parameter) {
            problems.push(format!("parameter {:?} is set by more than one factor", rf.parameter));
        }
        factors.push(factor);
        parameters.push(rf.parameter);
    }

    let g = &raw.geometry;
    if !(g.child_radius.is_finite() && g.child_radius > 0.0) {
        problems.push(format!("geometry.child_radius must be positive, got {}", g.child_radius));
    }
    if !(g.o_max.is_finite() && g.o_max >= 0.0) {
        problems.push(format!("geometry.o_max must be non-negative, got {}", g.o_max));
    }
    let [lm_min, lm_max] = g.module_length_bounds;
    if !(lm_min > 0.0 && lm_min <= lm_max) {
        problems.push(format!("geometry.module_length_bounds must satisfy 0 < min <= max, got [{lm_min}, {lm_max}]"));
    }
    let design_length = g.design_module_length.unwrap_or(lm_max);
    let stiffness = JointStiffness {
        k1_plus: g.stiffness.k1_plus,
        k1_minus: g.stiffness.k1_minus,
        k2_plus: g.stiffness.k2_plus,
        k2_minus: g.stiffness.k2_minus,
    };
    let module = match ModuleGeometry::with_constants(design_length, g.clearance, stiffness) {
        Ok(m) => Some(m),
        Err(Error::Validation(v)) => {
            problems.extend(v.into_iter().map(|p| format!("geometry: {p}")));
            None
        }
        Err(e) => return Err(e),
    };
    if g.search.grid_points < 2 {
        problems.push("geometry.search.grid_points must be at least 2".into());
    }
    if !(g.search.tolerance.is_finite() && g.search.tolerance > 0.0) {
        problems.push("geometry.search.tolerance must be positive".into());
    }

    // Every wheel the plan can produce must have overlapping child circles.
    if let (Some(rp_idx), Some(nc_idx)) = (
        parameters.iter().position(|p| *p == Parameter::ParentRadius),
        parameters.iter().position(|p| *p == Parameter::ChildCount),
    ) {
        if g.child_radius > 0.0 {
            for &rp in &factors[rp_idx].levels {
                for &nc in &factors[nc_idx].levels {
                    if rp > 0.0 && nc >= 3.0 {
                        if let Ok(w) = WheelSpec::new(rp, g.child_radius, nc as u32) {
                            if !w.is_non_disjoint() {
                                problems.push(format!(
                                    "wheel r_p = {rp}, n_c = {nc} has disjoint child circles (needs n_c >= {})",
                                    w.min_child_count()
                                ));
                            }
                        }
                    }
                }
            }
        }
    }

    let mut stairs = Vec::new();
    if raw.noise.stairs.is_empty() {
        problems.push("noise.stairs must list at least one stair".into());
    }
    for rs in &raw.noise.stairs {
        let stair = StairSpec {
            riser: rs.riser,
            tread: rs.tread,
            overhang: rs.overhang,
            friction: rs.friction,
            nosing_thickness: rs.nosing_thickness,
        };
        let o_max = raw.noise.ibc_validation.then_some(g.o_max);
        problems.extend(stair.problems(o_max).into_iter().map(|p| format!("stair {}: {p}", rs.name)));
        stairs.push(NamedStair { name: rs.name.clone(), stair });
    }

    let mut attributes = Vec::new();
    if raw.attributes.is_empty() {
        problems.push("at least one attribute is required".into());
    }
    for ra in &raw.attributes {
        if attributes.iter().any(|a: &AttributeSpec| a.name == ra.name) {
            problems.push(format!("attribute {} is defined twice", ra.name));
        }
        let direction = match ra.direction {
            RawDirection::LargerIsBetter => Direction::LargerIsBetter,
            RawDirection::SmallerIsBetter => Direction::SmallerIsBetter,
        };
        let source = match ra.source {
            RawSource::SnRatio => AttributeSource::SnRatio,
            RawSource::Amplitude => AttributeSource::Amplitude,
            RawSource::Frequency => AttributeSource::Frequency,
        };
        attributes.push(AttributeSpec { name: ra.name.clone(), direction, source });
    }

    let a = &raw.analysis;
    if !(a.zeta.is_finite() && a.zeta > 0.0) {
        problems.push(format!("analysis.zeta must be positive, got {}", a.zeta));
    }
    if a.f_critical.is_nan() || a.f_critical < 0.0 {
        problems.push(format!("analysis.f_critical must be non-negative, got {}", a.f_critical));
    }
    let weights = a.weights.clone().unwrap_or_else(|| equal_weights(attributes.len()));
    if weights.len() != attributes.len() {
        problems.push(format!("analysis.weights has {} entries for {} attributes", weights.len(), attributes.len()));
    } else if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        problems.push("analysis.weights must be non-negative".into());
    } else if !attributes.is_empty() && (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        problems.push(format!("analysis.weights sum to {}, expected 1", weights.iter().sum::<f64>()));
    }
    if let Some(c) = a.confirmation_grade {
        if !c.is_finite() {
            problems.push("analysis.confirmation_grade must be finite".into());
        }
    }

    let o = &raw.output;
    if !(o.polyline_step_deg > 0.0 && o.polyline_step_deg <= 360.0) {
        problems.push(format!("output.polyline_step_deg must lie in (0, 360], got {}", o.polyline_step_deg));
    }

    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    Ok(PipelineConfig {
        factors,
        parameters,
        stairs,
        ibc_validation: raw.noise.ibc_validation,
        attributes,
        weights,
        zeta: a.zeta,
        f_critical: a.f_critical,
        confirmation_grade: a.confirmation_grade,
        seed: a.seed,
        child_radius: g.child_radius,
        o_max: g.o_max,
        rp_min_reference: g.rp_min_reference,
        module_length_bounds: (lm_min, lm_max),
        module: module.expect("validated"),
        search: FeasibilitySearch {
            grid_points: g.search.grid_points,
            tolerance: g.search.tolerance,
            max_child_count: g.search.max_child_count,
            require_moment: true,
        },
        output: OutputConfig { dir: o.dir.clone(), formats: o.formats.clone(), polyline_step_deg: o.polyline_step_deg },
    })
}

impl PipelineConfig {
    /// Index of the factor that sets `parameter`.
    pub fn factor_for(&self, parameter: Parameter) -> Result<usize> {
        self.parameters
            .iter()
            .position(|p| *p == parameter)
            .ok_or_else(|| Error::Validation(vec![format!("no factor sets parameter {parameter:?}")]))
    }

    /// Smallest riser in the stair set.
    pub fn riser_min(&self) -> f64 {
        self.stairs.iter().map(|s| s.stair.riser).fold(f64::INFINITY, f64::min)
    }

    /// Stair used for the overhang check: lowest riser, then largest
    /// overhang.
    pub fn design_stair(&self) -> &StairSpec {
        &self
            .stairs
            .iter()
            .min_by(|a, b| a.stair.riser.total_cmp(&b.stair.riser).then(b.stair.overhang.total_cmp(&a.stair.overhang)))
            .expect("validated: at least one stair")
            .stair
    }

    /// The stair set as a noise factor whose levels are the riser heights.
    pub fn noise_factor(&self) -> Factor {
        Factor {
            key: "N".into(),
            name: "Stair".into(),
            unit: "mm".into(),
            levels: self.stairs.iter().map(|s| s.stair.riser).collect(),
            role: FactorRole::Noise,
        }
    }
}
