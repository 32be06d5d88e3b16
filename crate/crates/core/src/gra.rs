//! Grey relational analysis.
//!
//! Each attribute column is min-max normalised into a comparability
//! sequence (1 = ideal), the deviation from the ideal turned into a grey
//! relational coefficient, and the coefficients of one run combined into a
//! weighted grade.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::taguchi::ExperimentPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LargerIsBetter,
    SmallerIsBetter,
}

/// Where the per-run value of an attribute comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeSource {
    /// S/N ratio of the replicate responses.
    SnRatio,
    /// Transverse amplitude of the run's wheel.
    Amplitude,
    /// Transverse frequency of the run's wheel.
    Frequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSpec {
    pub name: String,
    pub direction: Direction,
    pub source: AttributeSource,
}

impl AttributeSpec {
    pub fn new(name: &str, direction: Direction, source: AttributeSource) -> Self {
        Self { name: name.into(), direction, source }
    }
}

/// Per-run attribute values, one column per attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeTable {
    rows: Vec<Vec<f64>>,
}

impl AttributeTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if width == 0 {
            return Err(Error::ShapeMismatch { expected: "non-empty table".into(), found: "empty".into() });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::ShapeMismatch {
                    expected: format!("{width} attributes"),
                    found: format!("{} in run {}", row.len(), i + 1),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("run {} has a non-finite attribute", i + 1)));
            }
        }
        Ok(Self { rows })
    }

    /// Builds a table from attribute columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let runs = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != runs) {
            return Err(Error::ShapeMismatch {
                expected: format!("{runs} runs per column"),
                found: "ragged columns".into(),
            });
        }
        Self::new((0..runs).map(|i| columns.iter().map(|c| c[i]).collect()).collect())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn run_count(&self) -> usize {
        self.rows.len()
    }

    pub fn attribute_count(&self) -> usize {
        self.rows[0].len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }
}

/// Comparability sequences. Columns whose values are all equal cannot be
/// min-max normalised; they are set to the ideal 1.0 and listed in
/// `degenerate_columns`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub matrix: Vec<Vec<f64>>,
    pub degenerate_columns: Vec<usize>,
}

pub fn normalize(table: &AttributeTable, specs: &[AttributeSpec]) -> Result<Normalized> {
    if specs.len() != table.attribute_count() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} attribute specs", table.attribute_count()),
            found: specs.len().to_string(),
        });
    }
    let mut matrix = vec![vec![0.0; specs.len()]; table.run_count()];
    let mut degenerate_columns = Vec::new();
    for (j, spec) in specs.iter().enumerate() {
        let col = table.column(j);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        if range == 0.0 {
            degenerate_columns.push(j);
        }
        for (i, &x) in col.iter().enumerate() {
            matrix[i][j] = if range == 0.0 {
                1.0
            } else {
                match spec.direction {
                    Direction::LargerIsBetter => (x - lo) / range,
                    Direction::SmallerIsBetter => (hi - x) / range,
                }
            };
        }
    }
    Ok(Normalized { matrix, degenerate_columns })
}

/// Grey relational coefficient for a deviation `delta` from the ideal, with
/// the deviation range fixed to `[0, 1]` by normalisation.
pub fn grey_coefficient(delta: f64, zeta: f64) -> f64 {
    zeta / (delta + zeta)
}

pub fn grey_coefficients(normalized: &[Vec<f64>], zeta: f64) -> Result<Vec<Vec<f64>>> {
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::InvalidInput(format!("distinguishing coefficient must be positive, got {zeta}")));
    }
    normalized
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .map(|&x| {
                    if (0.0..=1.0).contains(&x) {
                        Ok(grey_coefficient(1.0 - x, zeta))
                    } else {
                        Err(Error::InvalidInput(format!("normalized value {x} in run {} is outside [0, 1]", i + 1)))
                    }
                })
                .collect()
        })
        .collect()
}

pub fn equal_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn check_weights(weights: &[f64], attributes: usize) -> Result<()> {
    if weights.len() != attributes {
        return Err(Error::Weight(format!("{} weights for {attributes} attributes", weights.len())));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Weight("weights must be finite and non-negative".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Weight(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

/// 1-based ranks by descending grade; ties go to the lower run index.
pub fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut ranks = vec![0; values.len()];
    for (rank, idx) in order.into_iter().enumerate() {
        ranks[idx] = rank + 1;
    }
    ranks
}

/// Weighted grade per run and the resulting ranks.
pub fn grades(grc: &[Vec<f64>], weights: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
    let attributes = grc.first().map_or(0, Vec::len);
    check_weights(weights, attributes)?;
    let g: Vec<f64> = grc.iter().map(|row| row.iter().zip(weights).map(|(c, w)| c * w).sum()).collect();
    let ranks = rank_descending(&g);
    Ok((g, ranks))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreyAnalysis {
    pub attributes: Vec<AttributeSpec>,
    pub normalized: Vec<Vec<f64>>,
    pub degenerate_columns: Vec<usize>,
    pub coefficients: Vec<Vec<f64>>,
    pub grades: Vec<f64>,
    pub ranks: Vec<usize>,
    pub zeta: f64,
    pub weights: Vec<f64>,
}

impl GreyAnalysis {
    pub fn run(table: &AttributeTable, specs: &[AttributeSpec], zeta: f64, weights: &[f64]) -> Result<Self> {
        let Normalized { matrix, degenerate_columns } = normalize(table, specs)?;
        let coefficients = grey_coefficients(&matrix, zeta)?;
        let (grades, ranks) = grades(&coefficients, weights)?;
        Ok(Self {
            attributes: specs.to_vec(),
            normalized: matrix,
            degenerate_columns,
            coefficients,
            grades,
            ranks,
            zeta,
            weights: weights.to_vec(),
        })
    }

    /// `run,grc_<attr>...,grade,rank`
    pub fn to_csv(&self) -> String {
        let mut s = String::from("run");
        for a in &self.attributes {
            let _ = write!(s, ",grc_{}", a.name);
        }
        s.push_str(",grade,rank\n");
        for (i, row) in self.coefficients.iter().enumerate() {
            let _ = write!(s, "{}", i + 1);
            for c in row {
                let _ = write!(s, ",{c:.6}");
            }
            let _ = writeln!(s, ",{:.6},{}", self.grades[i], self.ranks[i]);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorInfluence {
    pub key: String,
    pub name: String,
    pub unit: String,
    /// Physical value of each level.
    pub values: Vec<f64>,
    /// Mean grade over the runs at each level.
    pub averages: Vec<f64>,
    /// 1-based level with the highest average; ties go to the lower level.
    pub optimal_level: usize,
}

impl FactorInfluence {
    pub fn best_average(&self) -> f64 {
        self.averages[self.optimal_level - 1]
    }

    pub fn optimal_value(&self) -> f64 {
        self.values[self.optimal_level - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceTable {
    pub factors: Vec<FactorInfluence>,
    /// Overall mean grade.
    pub mean_grade: f64,
}

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

pub fn influence(plan: &ExperimentPlan, grades: &[f64]) -> Result<InfluenceTable> {
    if grades.len() != plan.run_count() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} grades", plan.run_count()),
            found: grades.len().to_string(),
        });
    }
    let factors = plan
        .factors
        .iter()
        .enumerate()
        .map(|(f, factor)| {
            let averages: Vec<f64> = (1..=factor.levels.len())
                .map(|level| {
                    let runs: Vec<usize> = plan.runs_at_level(f, level).collect();
                    runs.iter().map(|&r| grades[r]).sum::<f64>() / runs.len() as f64
                })
                .collect();
            FactorInfluence {
                key: factor.key.clone(),
                name: factor.name.clone(),
                unit: factor.unit.clone(),
                values: factor.levels.clone(),
                optimal_level: argmax_first(&averages) + 1,
                averages,
            }
        })
        .collect();
    let mean_grade = grades.iter().sum::<f64>() / grades.len() as f64;
    Ok(InfluenceTable { factors, mean_grade })
}

impl InfluenceTable {
    /// Table assembled from already-known level averages and mean grade.
    pub fn from_level_averages(plan: &ExperimentPlan, averages: &[Vec<f64>], mean_grade: f64) -> Result<Self> {
        if averages.len() != plan.factors.len()
            || averages.iter().zip(&plan.factors).any(|(a, f)| a.len() != f.levels.len())
        {
            return Err(Error::ShapeMismatch {
                expected: "one average per factor level".into(),
                found: format!("{averages:?}"),
            });
        }
        let factors = plan
            .factors
            .iter()
            .zip(averages)
            .map(|(factor, avg)| FactorInfluence {
                key: factor.key.clone(),
                name: factor.name.clone(),
                unit: factor.unit.clone(),
                values: factor.levels.clone(),
                averages: avg.clone(),
                optimal_level: argmax_first(avg) + 1,
            })
            .collect();
        Ok(Self { factors, mean_grade })
    }

    pub fn factor(&self, key: &str) -> Option<&FactorInfluence> {
        self.factors.iter().find(|f| f.key == key)
    }

    /// 1-based optimal level per factor.
    pub fn optimal_levels(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.optimal_level).collect()
    }

    /// `factor,level,value,avg_grade,optimal_flag`
    pub fn to_csv(&self) -> String {
        let mut s = String::from("factor,level,value,avg_grade,optimal_flag\n");
        for f in &self.factors {
            for (i, (v, a)) in f.values.iter().zip(&f.averages).enumerate() {
                let flag = u8::from(i + 1 == f.optimal_level);
                let _ = writeln!(s, "{},{},{v:.6},{a:.6},{flag}", f.key, i + 1);
            }
        }
        s
    }
}
