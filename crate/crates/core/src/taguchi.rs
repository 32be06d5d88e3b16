//! Factors, the L9(3^3) orthogonal array and smaller-the-better S/N ratios.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorRole {
    Control,
    Noise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    /// Short column key, e.g. `A`.
    pub key: String,
    pub name: String,
    /// Unit label for level values; empty for dimensionless factors.
    pub unit: String,
    pub levels: Vec<f64>,
    pub role: FactorRole,
}

impl Factor {
    pub fn new(key: &str, name: &str, unit: &str, levels: Vec<f64>, role: FactorRole) -> Result<Self> {
        let factor = Self { key: key.into(), name: name.into(), unit: unit.into(), levels, role };
        let problems = factor.problems();
        if problems.is_empty() {
            Ok(factor)
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn control(key: &str, name: &str, unit: &str, levels: Vec<f64>) -> Result<Self> {
        Self::new(key, name, unit, levels, FactorRole::Control)
    }

    pub(crate) fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.key.is_empty() {
            out.push(format!("factor {:?} has an empty key", self.name));
        }
        if !(2..=3).contains(&self.levels.len()) {
            out.push(format!("factor {} has {} levels; between 2 and 3 are supported", self.key, self.levels.len()));
        }
        if self.levels.iter().any(|v| !v.is_finite()) {
            out.push(format!("factor {} has a non-finite level", self.key));
        }
        for (i, a) in self.levels.iter().enumerate() {
            if self.levels[..i].contains(a) {
                out.push(format!("factor {} repeats level value {a}", self.key));
            }
        }
        out
    }

    /// CSV header for the physical level values, e.g. `A_value_mm`.
    pub fn value_column(&self) -> String {
        if self.unit.is_empty() {
            format!("{}_value", self.key)
        } else {
            format!("{}_value_{}", self.key, self.unit)
        }
    }
}

/// The standard L9 array restricted to its first three columns, 1-based.
pub const L9_LAYOUT: [[usize; 3]; 9] =
    [[1, 1, 1], [1, 2, 2], [1, 3, 3], [2, 1, 2], [2, 2, 3], [2, 3, 1], [3, 1, 3], [3, 2, 1], [3, 3, 2]];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub array: &'static str,
    pub factors: Vec<Factor>,
    /// Per run, the 1-based level index of each factor.
    pub runs: Vec<[usize; 3]>,
}

pub fn build_l9(factors: &[Factor]) -> Result<ExperimentPlan> {
    if factors.len() != 3 {
        return Err(Error::Arity(format!("L9(3^3) needs exactly 3 factors, got {}", factors.len())));
    }
    for f in factors {
        if f.levels.len() != 3 {
            return Err(Error::Arity(format!(
                "L9(3^3) needs 3 levels per factor, factor {} has {}",
                f.key,
                f.levels.len()
            )));
        }
    }
    Ok(ExperimentPlan { array: "L9", factors: factors.to_vec(), runs: L9_LAYOUT.to_vec() })
}

impl ExperimentPlan {
    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn level(&self, run: usize, factor: usize) -> usize {
        self.runs[run][factor]
    }

    pub fn value(&self, run: usize, factor: usize) -> f64 {
        self.factors[factor].levels[self.level(run, factor) - 1]
    }

    /// Zero-based run indices at which `factor` sits at 1-based `level`.
    pub fn runs_at_level(&self, factor: usize, level: usize) -> impl Iterator<Item = usize> + '_ {
        self.runs.iter().enumerate().filter(move |(_, r)| r[factor] == level).map(|(i, _)| i)
    }

    pub fn factor_index(&self, key: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.key == key)
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["run".to_string()];
        h.extend(self.factors.iter().map(|f| f.key.clone()));
        h.extend(self.factors.iter().map(Factor::value_column));
        h
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header().join(",");
        s.push('\n');
        for (i, run) in self.runs.iter().enumerate() {
            let _ = write!(s, "{}", i + 1);
            for level in run {
                let _ = write!(s, ",{level}");
            }
            for (f, level) in run.iter().enumerate() {
                let _ = write!(s, ",{:.6}", self.factors[f].levels[level - 1]);
            }
            s.push('\n');
        }
        s
    }

    /// Checks that a plan CSV describes exactly this plan: same header, same
    /// level indices, same level values.
    pub fn check_csv(&self, text: &str) -> Result<()> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let header: Vec<String> =
            reader.headers().map_err(|e| csv_parse_error(&e))?.iter().map(str::to_string).collect();
        let expected = self.header();
        if header != expected {
            return Err(Error::ShapeMismatch { expected: expected.join(","), found: header.join(",") });
        }
        let mut seen = vec![false; self.run_count()];
        for record in reader.records() {
            let record = record.map_err(|e| csv_parse_error(&e))?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let run: usize = parse_cell(&record, 0, "run", line)?;
            if run == 0 || run > self.run_count() {
                return Err(Error::UnknownRun { run, runs: self.run_count() });
            }
            if std::mem::replace(&mut seen[run - 1], true) {
                return Err(Error::DuplicateRun(run));
            }
            for f in 0..self.factors.len() {
                let level: usize = parse_cell(&record, 1 + f, &self.factors[f].key, line)?;
                let value: f64 =
                    parse_cell(&record, 1 + self.factors.len() + f, &self.factors[f].value_column(), line)?;
                if level != self.level(run - 1, f) || (value - self.value(run - 1, f)).abs() > 1e-6 {
                    return Err(Error::ShapeMismatch {
                        expected: format!(
                            "run {run} factor {} at level {}",
                            self.factors[f].key,
                            self.level(run - 1, f)
                        ),
                        found: format!("level {level} ({value})"),
                    });
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(missing) => Err(Error::MissingRun(missing + 1)),
            None => Ok(()),
        }
    }
}

fn csv_parse_error(e: &csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse { line, message: e.to_string() }
}

fn parse_cell<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, column: &str, line: usize) -> Result<T> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse().map_err(|_| Error::NonNumeric { line, column: column.to_string(), value: raw.to_string() })
}

/// Replicate observations per run, one replicate per noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    rows: Vec<Vec<f64>>,
}

impl ResponseMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let replicates = rows.first().map_or(0, Vec::len);
        if replicates == 0 {
            return Err(Error::ShapeMismatch {
                expected: "at least one run with at least one replicate".into(),
                found: "empty response matrix".into(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != replicates {
                return Err(Error::ShapeMismatch {
                    expected: format!("{replicates} replicates"),
                    found: format!("{} in run {}", row.len(), i + 1),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::NonPositiveResponse { run: i + 1, replicate: j + 1, value: v });
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn run_count(&self) -> usize {
        self.rows.len()
    }

    pub fn replicate_count(&self) -> usize {
        self.rows[0].len()
    }

    /// Reads `run,replicate_1,...,replicate_n` CSV with run ids `1..=runs`
    /// in any order.
    pub fn from_csv<R: Read>(reader: R, runs: usize) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> =
            reader.headers().map_err(|e| csv_parse_error(&e))?.iter().map(str::to_string).collect();
        let replicates = header.len().saturating_sub(1);
        let expected: Vec<String> =
            std::iter::once("run".to_string()).chain((1..=replicates).map(|i| format!("replicate_{i}"))).collect();
        if replicates == 0 || header != expected {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header run,replicate_1..replicate_n, found {}", header.join(",")),
            });
        }
        let mut by_run: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| csv_parse_error(&e))?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let run: usize = parse_cell(&record, 0, "run", line)?;
            let values =
                (1..=replicates).map(|j| parse_cell(&record, j, &header[j], line)).collect::<Result<Vec<f64>>>()?;
            if run == 0 || run > runs {
                return Err(Error::UnknownRun { run, runs });
            }
            if by_run.insert(run, values).is_some() {
                return Err(Error::DuplicateRun(run));
            }
        }
        if let Some(missing) = (1..=runs).find(|r| !by_run.contains_key(r)) {
            return Err(Error::MissingRun(missing));
        }
        Self::new(by_run.into_values().collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("run");
        for j in 1..=self.replicate_count() {
            let _ = write!(s, ",replicate_{j}");
        }
        s.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(s, "{}", i + 1);
            for v in row {
                let _ = write!(s, ",{v:.6}");
            }
            s.push('\n');
        }
        s
    }
}

/// `-10 log10(mean(y^2))`, in dB.
pub fn snr_smaller_better(responses: &[f64]) -> Result<f64> {
    if responses.is_empty() {
        return Err(Error::ShapeMismatch { expected: "at least one replicate".into(), found: "none".into() });
    }
    if let Some((j, &v)) = responses.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::NonPositiveResponse { run: 0, replicate: j + 1, value: v });
    }
    let mean_sq = responses.iter().map(|y| y * y).sum::<f64>() / responses.len() as f64;
    Ok(-10.0 * mean_sq.log10())
}

/// Per-run S/N ratios in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct SnVector(pub Vec<f64>);

pub fn snr_column(plan: &ExperimentPlan, responses: &ResponseMatrix) -> Result<SnVector> {
    if responses.run_count() != plan.run_count() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} runs", plan.run_count()),
            found: format!("{} response rows", responses.run_count()),
        });
    }
    responses
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            snr_smaller_better(row).map_err(|e| match e {
                Error::NonPositiveResponse { replicate, value, .. } => {
                    Error::NonPositiveResponse { run: i + 1, replicate, value }
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(SnVector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn factors() -> Vec<Factor> {
        vec![
            Factor::control("A", "Module Length", "mm", vec![240.0, 260.0, 280.0]).unwrap(),
            Factor::control("B", "Radius of Parent Circle", "mm", vec![40.0, 45.0, 50.0]).unwrap(),
            Factor::control("C", "Number of Child Circles", "", vec![16.0, 18.0, 20.0]).unwrap(),
        ]
    }

    #[test]
    fn l9_layout_run_five() {
        let plan = build_l9(&factors()).unwrap();
        assert_eq!(plan.runs[4], [2, 2, 3]);
        assert_eq!(plan.value(4, 0), 260.0);
        assert_eq!(plan.value(4, 2), 20.0);
    }

    #[test]
    fn l9_balance_and_pairwise_orthogonality() {
        let plan = build_l9(&factors()).unwrap();
        for f in 0..3 {
            for level in 1..=3 {
                assert_eq!(plan.runs_at_level(f, level).count(), 3);
            }
        }
        for a in 0..3 {
            for b in (a + 1)..3 {
                let mut counts = [[0; 3]; 3];
                for run in &plan.runs {
                    counts[run[a] - 1][run[b] - 1] += 1;
                }
                assert!(counts.iter().flatten().all(|&c| c == 1), "{a} x {b}: {counts:?}");
            }
        }
    }

    #[test]
    fn arity_errors() {
        let mut f = factors();
        f.pop();
        assert!(matches!(build_l9(&f), Err(Error::Arity(_))));
        let mut f = factors();
        f[1].levels.pop();
        assert!(matches!(build_l9(&f), Err(Error::Arity(_))));
    }

    #[test]
    fn factor_validation() {
        assert!(Factor::control("A", "x", "mm", vec![1.0, 1.0, 2.0]).is_err());
        assert!(Factor::control("A", "x", "mm", vec![1.0, 2.0, 3.0, 4.0]).is_err());
        assert!(Factor::control("A", "x", "mm", vec![1.0]).is_err());
    }

    #[test]
    fn snr_examples() {
        let s1 = snr_smaller_better(&[4.02, 4.07, 5.19]).unwrap();
        assert!((s1 + 12.98).abs() < 0.01, "{s1}");
        let s5 = snr_smaller_better(&[2.99, 2.99, 3.08]).unwrap();
        assert!((s5 + 9.61).abs() < 0.01, "{s5}");
        assert_eq!(snr_smaller_better(&[1.0]).unwrap(), 0.0);
        assert!(matches!(snr_smaller_better(&[1.0, 0.0]), Err(Error::NonPositiveResponse { replicate: 2, .. })));
    }

    #[test]
    fn snr_column_shape_mismatch() {
        let plan = build_l9(&factors()).unwrap();
        let responses = ResponseMatrix::new(vec![vec![1.0]; 8]).unwrap();
        assert!(matches!(snr_column(&plan, &responses), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn plan_csv_round_trips_through_check() {
        let plan = build_l9(&factors()).unwrap();
        let csv = plan.to_csv();
        assert!(csv.starts_with("run,A,B,C,A_value_mm,B_value_mm,C_value\n"));
        assert!(csv.contains("\n5,2,2,3,260.000000,45.000000,20.000000\n"));
        plan.check_csv(&csv).unwrap();
        let tampered = csv.replace("\n5,2,2,3,", "\n5,2,2,1,");
        assert!(plan.check_csv(&tampered).is_err());
    }

    #[test]
    fn response_csv_errors() {
        let ok = "run,replicate_1,replicate_2\n2,1,2\n1,3,4\n";
        let m = ResponseMatrix::from_csv(ok.as_bytes(), 2).unwrap();
        assert_eq!(m.rows()[0], vec![3.0, 4.0]);
        let dup = "run,replicate_1\n1,1\n1,2\n";
        assert!(matches!(ResponseMatrix::from_csv(dup.as_bytes(), 2), Err(Error::DuplicateRun(1))));
        let missing = "run,replicate_1\n1,1\n";
        assert!(matches!(ResponseMatrix::from_csv(missing.as_bytes(), 2), Err(Error::MissingRun(2))));
        let bad = "run,replicate_1\n1,abc\n2,1\n";
        assert!(matches!(ResponseMatrix::from_csv(bad.as_bytes(), 2), Err(Error::NonNumeric { .. })));
        let out = "run,replicate_1\n1,1\n3,1\n";
        assert!(matches!(ResponseMatrix::from_csv(out.as_bytes(), 2), Err(Error::UnknownRun { run: 3, .. })));
        let header = "run,rep1\n1,1\n";
        assert!(matches!(ResponseMatrix::from_csv(header.as_bytes(), 1), Err(Error::Parse { .. })));
    }

    proptest! {
        #[test]
        fn snr_scaling_identity(xs in prop::collection::vec(0.01..100.0f64, 1..6), k in 0.01..100.0f64) {
            let base = snr_smaller_better(&xs).unwrap();
            let scaled: Vec<f64> = xs.iter().map(|x| x * k).collect();
            let s = snr_smaller_better(&scaled).unwrap();
            prop_assert!((s - (base - 20.0 * k.log10())).abs() < 1e-9);
        }

        #[test]
        fn snr_decreases_with_each_replicate(xs in prop::collection::vec(0.01..100.0f64, 1..6), idx in 0usize..6, bump in 1e-3..10.0f64) {
            let i = idx % xs.len();
            let mut ys = xs.clone();
            ys[i] += bump;
            prop_assert!(snr_smaller_better(&ys).unwrap() < snr_smaller_better(&xs).unwrap());
        }
    }
}
