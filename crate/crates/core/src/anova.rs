//! Variance decomposition of grey relational grades over the L9 factors,
//! F-ratio screening and the additive prediction at the optimal setting.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gra::InfluenceTable;
use crate::taguchi::ExperimentPlan;

/// Error sums of squares above `-NEGATIVE_SS_TOLERANCE` are clamped to zero.
pub const NEGATIVE_SS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AnovaRow {
    pub key: String,
    pub name: String,
    pub ss: f64,
    pub df: usize,
    pub ms: f64,
    /// `MS_factor / MS_error`. Infinite when the error term vanishes and the
    /// factor does not; zero when both vanish.
    pub f: f64,
    pub contribution_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnovaTable {
    pub factors: Vec<AnovaRow>,
    pub error_ss: f64,
    pub error_df: usize,
    pub error_ms: f64,
    pub error_contribution_pct: f64,
    pub total_ss: f64,
    pub total_df: usize,
    pub grand_mean: f64,
}

impl AnovaTable {
    /// True when the grades carry no variation at all; contributions are
    /// then reported as zero.
    pub fn is_degenerate(&self) -> bool {
        self.total_ss == 0.0
    }

    pub fn row(&self, key: &str) -> Option<&AnovaRow> {
        self.factors.iter().find(|r| r.key == key)
    }

    /// `factor,ss,df,ms,f,contribution_pct` with trailing `error` and
    /// `total` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("factor,ss,df,ms,f,contribution_pct\n");
        for r in &self.factors {
            let _ = writeln!(s, "{},{:.6},{},{:.6},{:.6},{:.6}", r.key, r.ss, r.df, r.ms, r.f, r.contribution_pct);
        }
        let _ = writeln!(
            s,
            "error,{:.6},{},{:.6},,{:.6}",
            self.error_ss, self.error_df, self.error_ms, self.error_contribution_pct
        );
        let total_pct = if self.is_degenerate() { 0.0 } else { 100.0 };
        let _ = writeln!(s, "total,{:.6},{},,,{:.6}", self.total_ss, self.total_df, total_pct);
        s
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

pub fn anova_from_grades(plan: &ExperimentPlan, grades: &[f64]) -> Result<AnovaTable> {
    let runs = plan.run_count();
    if grades.len() != runs {
        return Err(Error::ShapeMismatch { expected: format!("{runs} grades"), found: grades.len().to_string() });
    }
    let grand_mean = grades.iter().sum::<f64>() / runs as f64;
    let total_ss: f64 = grades.iter().map(|g| (g - grand_mean).powi(2)).sum();

    let mut rows = Vec::with_capacity(plan.factors.len());
    for (f, factor) in plan.factors.iter().enumerate() {
        let ss: f64 = (1..=factor.levels.len())
            .map(|level| {
                let at: Vec<usize> = plan.runs_at_level(f, level).collect();
                let mean = at.iter().map(|&r| grades[r]).sum::<f64>() / at.len() as f64;
                at.len() as f64 * (mean - grand_mean).powi(2)
            })
            .sum();
        let df = factor.levels.len() - 1;
        rows.push(AnovaRow {
            key: factor.key.clone(),
            name: factor.name.clone(),
            ss,
            df,
            ms: ss / df as f64,
            f: 0.0,
            contribution_pct: 0.0,
        });
    }

    let raw_error = total_ss - rows.iter().map(|r| r.ss).sum::<f64>();
    if raw_error < -NEGATIVE_SS_TOLERANCE {
        return Err(Error::NegativeErrorSs(raw_error));
    }
    let error_ss = raw_error.max(0.0);
    let total_df = runs - 1;
    let error_df = total_df - rows.iter().map(|r| r.df).sum::<usize>();
    let error_ms = if error_df > 0 { error_ss / error_df as f64 } else { 0.0 };
    let pct = |ss: f64| if total_ss > 0.0 { 100.0 * ss / total_ss } else { 0.0 };
    for r in &mut rows {
        r.f = ratio(r.ms, error_ms);
        r.contribution_pct = pct(r.ss);
    }
    Ok(AnovaTable {
        factors: rows,
        error_ss,
        error_df,
        error_ms,
        error_contribution_pct: pct(error_ss),
        total_ss,
        total_df,
        grand_mean,
    })
}

/// Keys of the factors whose F ratio reaches `f_critical`.
pub fn significant_factors(table: &AnovaTable, f_critical: f64) -> Vec<String> {
    table.factors.iter().filter(|r| r.f >= f_critical).map(|r| r.key.clone()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub predicted_grade: f64,
    pub mean_grade: f64,
    pub significant: Vec<String>,
    /// Best level average of each significant factor, same order.
    pub best_averages: Vec<f64>,
    /// Optimal `(key, 1-based level)` for every factor.
    pub optimal_setting: Vec<(String, usize)>,
}

impl Prediction {
    /// Compact label such as `A2B2C1`.
    pub fn setting_label(&self) -> String {
        self.optimal_setting.iter().map(|(k, l)| format!("{k}{l}")).collect()
    }
}

/// Additive estimate: mean grade plus the improvement of each significant
/// factor's best level over the mean.
pub fn predict_grade(influence: &InfluenceTable, significant: &[String]) -> Result<Prediction> {
    if significant.is_empty() {
        return Err(Error::EmptySignificantSet);
    }
    let mut best_averages = Vec::with_capacity(significant.len());
    for key in significant {
        let f = influence
            .factor(key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown factor {key:?} in significant set")))?;
        best_averages.push(f.best_average());
    }
    let gm = influence.mean_grade;
    let predicted_grade = gm + best_averages.iter().map(|g| g - gm).sum::<f64>();
    if !predicted_grade.is_finite() {
        return Err(Error::InvalidInput("predicted grade is not finite".into()));
    }
    Ok(Prediction {
        predicted_grade,
        mean_grade: gm,
        significant: significant.to_vec(),
        best_averages,
        optimal_setting: influence.factors.iter().map(|f| (f.key.clone(), f.optimal_level)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Confirmation {
    pub setting: String,
    pub predicted: f64,
    pub observed: f64,
    /// `observed - predicted`.
    pub gap: f64,
    /// `gap / predicted`.
    pub relative_gap: f64,
}

pub fn confirm(prediction: &Prediction, observed_grade: f64) -> Result<Confirmation> {
    if !observed_grade.is_finite() {
        return Err(Error::InvalidInput(format!("observed grade must be finite, got {observed_grade}")));
    }
    let predicted = prediction.predicted_grade;
    let gap = observed_grade - predicted;
    Ok(Confirmation {
        setting: prediction.setting_label(),
        predicted,
        observed: observed_grade,
        gap,
        relative_gap: if predicted != 0.0 { gap / predicted } else { 0.0 },
    })
}

impl Confirmation {
    pub fn to_text(&self) -> String {
        let mut s = String::from("Optimal setting confirmation\n");
        let _ = writeln!(s, "  level               : {}", self.setting);
        let _ = writeln!(s, "  predicted grade     : {:.6}", self.predicted);
        let _ = writeln!(s, "  observed grade      : {:.6}", self.observed);
        let _ = writeln!(s, "  gap (obs - pred)    : {:+.6}", self.gap);
        let _ = writeln!(s, "  relative gap        : {:+.2} %", 100.0 * self.relative_gap);
        s
    }
}
