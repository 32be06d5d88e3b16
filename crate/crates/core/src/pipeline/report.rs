use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::anova::{
    anova_from_grades, confirm, predict_grade, significant_factors, AnovaTable, Confirmation, Prediction,
};
use crate::design_space::export::{profile_polyline_csv, profile_svg};
use crate::design_space::{design_bounds, wheel_profile, BoundsInputs, DesignBounds, WheelSpec};
use crate::error::{Error, Result};
use crate::gra::{influence, AttributeSource, AttributeTable, GreyAnalysis, InfluenceTable};
use crate::taguchi::{build_l9, snr_column, ExperimentPlan, ResponseMatrix, SnVector};

use super::config::{OutputFormat, Parameter, PipelineConfig};

/// Geometry of the wheel used in one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunWheel {
    pub module_length: f64,
    pub wheel: WheelSpec,
    pub amplitude: f64,
    pub frequency: u32,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub plan: ExperimentPlan,
    pub responses: ResponseMatrix,
    pub sn: SnVector,
    pub wheels: Vec<RunWheel>,
    pub attributes: AttributeTable,
    pub grey: GreyAnalysis,
    pub influence: InfluenceTable,
    pub anova: AnovaTable,
    pub significant: Vec<String>,
    pub prediction: Option<Prediction>,
    pub confirmation: Option<Confirmation>,
    pub bounds: DesignBounds,
    pub rp_min_reference: Option<f64>,
    pub polyline_step_deg: f64,
    pub warnings: Vec<String>,
}

/// Reads and aligns a response CSV to `plan`.
pub fn ingest_responses(path: impl AsRef<Path>, plan: &ExperimentPlan) -> Result<ResponseMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    ResponseMatrix::from_csv(std::io::BufReader::new(file), plan.run_count())
}

pub fn run_analysis(config: &PipelineConfig, responses: &ResponseMatrix) -> Result<Report> {
    let plan = build_l9(&config.factors)?;
    if responses.run_count() != plan.run_count() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} runs", plan.run_count()),
            found: format!("{} runs", responses.run_count()),
        });
    }
    let lm = config.factor_for(Parameter::ModuleLength)?;
    let rp = config.factor_for(Parameter::ParentRadius)?;
    let nc = config.factor_for(Parameter::ChildCount)?;
    let mut warnings = Vec::new();

    let sn = snr_column(&plan, responses)?;
    let wheels = (0..plan.run_count())
        .map(|run| {
            let wheel = WheelSpec::new(plan.value(run, rp), config.child_radius, plan.value(run, nc) as u32)?;
            Ok(RunWheel {
                module_length: plan.value(run, lm),
                wheel,
                amplitude: wheel.transverse_amplitude(),
                frequency: wheel.transverse_frequency(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let columns: Vec<Vec<f64>> = config
        .attributes
        .iter()
        .map(|a| match a.source {
            AttributeSource::SnRatio => sn.0.clone(),
            AttributeSource::Amplitude => wheels.iter().map(|w| w.amplitude).collect(),
            AttributeSource::Frequency => wheels.iter().map(|w| f64::from(w.frequency)).collect(),
        })
        .collect();
    let attributes = AttributeTable::from_columns(&columns)?;
    let grey = GreyAnalysis::run(&attributes, &config.attributes, config.zeta, &config.weights)?;
    for &j in &grey.degenerate_columns {
        warnings.push(format!(
            "attribute {} is constant across runs; its coefficients are all 1",
            config.attributes[j].name
        ));
    }

    let influence = influence(&plan, &grey.grades)?;
    let anova = anova_from_grades(&plan, &grey.grades)?;
    if anova.is_degenerate() {
        warnings.push("all grades are equal; ANOVA is degenerate".into());
    }
    let significant = significant_factors(&anova, config.f_critical);
    let prediction = match predict_grade(&influence, &significant) {
        Ok(p) => Some(p),
        Err(Error::EmptySignificantSet) => {
            warnings.push(format!("no factor exceeds F = {}; no prediction made", config.f_critical));
            None
        }
        Err(e) => return Err(e),
    };
    let confirmation = match (&prediction, config.confirmation_grade) {
        (Some(p), Some(observed)) => Some(confirm(p, observed)?),
        _ => None,
    };

    let bounds = config_bounds(config)?;
    let ranges = [
        (lm, bounds.lm_min, bounds.lm_max),
        (rp, bounds.rp_min, bounds.rp_max),
        (nc, f64::from(bounds.nc_min), f64::from(bounds.nc_max)),
    ];
    for (f, lo, hi) in ranges {
        let factor = &config.factors[f];
        for v in &factor.levels {
            if *v < lo - 1e-9 || *v > hi + 1e-9 {
                warnings.push(format!("factor {} level {v} lies outside the design bounds [{lo}, {hi}]", factor.key));
            }
        }
    }

    Ok(Report {
        plan,
        responses: responses.clone(),
        sn,
        wheels,
        attributes,
        grey,
        influence,
        anova,
        significant,
        prediction,
        confirmation,
        bounds,
        rp_min_reference: config.rp_min_reference,
        polyline_step_deg: config.output.polyline_step_deg,
        warnings,
    })
}

/// Design bounds for the configured stair set, evaluated at the largest
/// parent-radius level.
pub fn config_bounds(config: &PipelineConfig) -> Result<DesignBounds> {
    let rp = config.factor_for(Parameter::ParentRadius)?;
    let design_rp = config.factors[rp].levels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    design_bounds(&BoundsInputs {
        child_radius: config.child_radius,
        o_max: config.o_max,
        riser_min: config.riser_min(),
        module_length_bounds: config.module_length_bounds,
        design_parent_radius: design_rp,
        stair: *config.design_stair(),
        module: config.module,
        search: config.search,
    })
}

impl Report {
    /// Level label such as `A2B2C1` for the best level of every factor.
    pub fn optimal_label(&self) -> String {
        self.influence.factors.iter().map(|f| format!("{}{}", f.key, f.optimal_level)).collect()
    }

    /// Index of the top-ranked run.
    pub fn best_run(&self) -> usize {
        self.grey.ranks.iter().position(|&r| r == 1).unwrap_or(0)
    }

    /// Distinct wheels in plan order, deduplicated on (r_p, n_c).
    pub fn distinct_wheels(&self) -> Vec<WheelSpec> {
        let mut out: Vec<WheelSpec> = Vec::new();
        for w in &self.wheels {
            if !out.contains(&w.wheel) {
                out.push(w.wheel);
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let plan = &self.plan;
        let _ = writeln!(s, "Experiment ({} array, {} runs)", plan.array, plan.run_count());
        let _ = write!(s, "{:>3}", "run");
        for f in &plan.factors {
            let _ = write!(s, " {:>3}", f.key);
        }
        for j in 1..=self.responses.replicate_count() {
            let _ = write!(s, " {:>6}", format!("y{j}"));
        }
        let _ = write!(s, " {:>7} {:>6} {:>4}", "S/N", "amp", "freq");
        for a in &self.grey.attributes {
            let _ = write!(s, " {:>10}", format!("grc_{}", short(&a.name)));
        }
        let _ = writeln!(s, " {:>6} {:>4}", "grade", "rank");
        for run in 0..plan.run_count() {
            let _ = write!(s, "{:>3}", run + 1);
            for f in 0..plan.factors.len() {
                let _ = write!(s, " {:>3}", plan.level(run, f));
            }
            for y in &self.responses.rows()[run] {
                let _ = write!(s, " {y:>6.2}");
            }
            let w = &self.wheels[run];
            let _ = write!(s, " {:>7.2} {:>6.2} {:>4}", self.sn.0[run], w.amplitude, w.frequency);
            for c in &self.grey.coefficients[run] {
                let _ = write!(s, " {c:>10.2}");
            }
            let _ = writeln!(s, " {:>6.2} {:>4}", self.grey.grades[run], self.grey.ranks[run]);
        }

        let _ = writeln!(s, "\nAverage grade by factor level (* = best)");
        for f in &self.influence.factors {
            let _ = write!(s, "{} {:<14}", f.key, f.name);
            for (i, avg) in f.averages.iter().enumerate() {
                let mark = if i + 1 == f.optimal_level { "*" } else { " " };
                let _ = write!(s, "  L{} {:>5.2}{mark}", i + 1, avg);
            }
            let _ = writeln!(s);
        }
        let _ = writeln!(s, "mean grade {:.2}", self.influence.mean_grade);

        let a = &self.anova;
        let _ = writeln!(s, "\nANOVA on grades");
        let _ = writeln!(s, "{:<16} {:>8} {:>3} {:>8} {:>8} {:>7}", "source", "SS", "df", "MS", "F", "%");
        for r in &a.factors {
            let _ = writeln!(
                s,
                "{:<16} {:>8.2} {:>3} {:>8.2} {:>8.2} {:>7.2}",
                format!("{} {}", r.key, r.name),
                r.ss,
                r.df,
                r.ms,
                r.f,
                r.contribution_pct
            );
        }
        let _ = writeln!(
            s,
            "{:<16} {:>8.2} {:>3} {:>8.2} {:>8} {:>7.2}",
            "error", a.error_ss, a.error_df, a.error_ms, "", a.error_contribution_pct
        );
        let _ = writeln!(s, "{:<16} {:>8.2} {:>3}", "total", a.total_ss, a.total_df);
        let _ = writeln!(
            s,
            "significant: {}",
            if self.significant.is_empty() { "none".into() } else { self.significant.join(", ") }
        );

        let _ = writeln!(s, "\nOptimal setting");
        let setting: Vec<String> = self
            .influence
            .factors
            .iter()
            .map(|f| {
                let unit = if f.unit.is_empty() { String::new() } else { format!(" {}", f.unit) };
                format!("{} = {}{unit}", f.name, f.optimal_value())
            })
            .collect();
        let _ = writeln!(s, "{} ({})", self.optimal_label(), setting.join(", "));
        let best = self.best_run();
        let label: String =
            plan.factors.iter().enumerate().map(|(f, fac)| format!("{}{}", fac.key, plan.level(best, f))).collect();
        let _ = writeln!(
            s,
            "best run in the array: run {} ({label}), S/N {:.2} dB, amplitude {:.2} mm, grade {:.2}",
            best + 1,
            self.sn.0[best],
            self.wheels[best].amplitude,
            self.grey.grades[best]
        );
        match (&self.prediction, &self.confirmation) {
            (_, Some(c)) => {
                let _ = writeln!(
                    s,
                    "predicted grade {:.2}, confirmation grade {:.2}, gap {:.2}",
                    c.predicted, c.observed, c.gap
                );
            }
            (Some(p), None) => {
                let _ = writeln!(s, "predicted grade {:.2}", p.predicted_grade);
            }
            (None, None) => {
                let _ = writeln!(s, "predicted grade: none");
            }
        }

        let b = &self.bounds;
        let _ = writeln!(s, "\nDesign bounds");
        let _ = writeln!(
            s,
            "r_p {:.2} to {:.2} mm, l_m {:.2} to {:.2} mm, n_c {} to {}",
            b.rp_min, b.rp_max, b.lm_min, b.lm_max, b.nc_min, b.nc_max
        );

        if !self.warnings.is_empty() {
            let _ = writeln!(s, "\nWarnings");
            for w in &self.warnings {
                let _ = writeln!(s, "- {w}");
            }
        }
        s
    }
}

fn short(name: &str) -> &str {
    &name[..name.len().min(6)]
}

fn wheel_stem(w: &WheelSpec) -> String {
    format!("wheel_rp{}_rc{}_nc{}", w.parent_radius, w.child_radius, w.child_count)
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes the requested artifacts plus `summary.txt` into `out_dir` and
/// returns the paths written.
pub fn emit_report(report: &Report, formats: &[OutputFormat], out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let has = |f: OutputFormat| formats.contains(&f);

    if has(OutputFormat::Csv) {
        write_file(out_dir, "plan.csv", &report.plan.to_csv(), &mut written)?;
        write_file(out_dir, "grey.csv", &report.grey.to_csv(), &mut written)?;
        write_file(out_dir, "influence.csv", &report.influence.to_csv(), &mut written)?;
        write_file(out_dir, "anova.csv", &report.anova.to_csv(), &mut written)?;
        write_file(out_dir, "bounds.csv", &report.bounds.to_csv(), &mut written)?;
    }
    if has(OutputFormat::Text) {
        let confirmation = match &report.confirmation {
            Some(c) => c.to_text(),
            None => "no confirmation grade configured\n".to_string(),
        };
        write_file(out_dir, "confirmation.txt", &confirmation, &mut written)?;
        write_file(out_dir, "bounds.txt", &report.bounds.to_text(report.rp_min_reference), &mut written)?;
    }
    if has(OutputFormat::Svg) || has(OutputFormat::Polyline) {
        for w in report.distinct_wheels() {
            let profile = wheel_profile(&w)?;
            let stem = wheel_stem(&w);
            if has(OutputFormat::Svg) {
                write_file(out_dir, &format!("{stem}.svg"), &profile_svg(&profile), &mut written)?;
            }
            if has(OutputFormat::Polyline) {
                let csv = profile_polyline_csv(&profile, report.polyline_step_deg);
                write_file(out_dir, &format!("{stem}.csv"), &csv, &mut written)?;
            }
        }
    }
    write_file(out_dir, "summary.txt", &report.summary(), &mut written)?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::dataset::{study_config, study_responses};

    fn shipped_report() -> Report {
        run_analysis(&study_config().unwrap(), &study_responses().unwrap()).unwrap()
    }

    #[test]
    fn shipped_optimum() {
        let r = shipped_report();
        assert_eq!(r.optimal_label(), "A2B2C1");
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        let b = r.anova.row("B").unwrap().ss;
        assert!(r.anova.factors.iter().all(|f| f.ss <= b));
    }

    #[test]
    fn distinct_wheels_cover_all_bc_pairs() {
        assert_eq!(shipped_report().distinct_wheels().len(), 9);
    }

    #[test]
    fn summary_mentions_setting() {
        let s = shipped_report().summary();
        assert!(s.contains("Module Length = 260 mm"), "{s}");
        assert!(s.contains("Parent Radius = 45 mm"), "{s}");
        assert!(s.contains("Child Count = 16"), "{s}");
    }
}
