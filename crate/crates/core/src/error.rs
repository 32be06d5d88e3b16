use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("child circles are disjoint: {child_count} circles, at least {required} needed")]
    DisjointChildCircles { child_count: u32, required: u32 },

    #[error("infeasible bounds: lower {lower:.6} exceeds upper {upper:.6}")]
    InfeasibleBounds { lower: f64, upper: f64 },

    #[error("no feasible child count at or above {lower} (searched up to {searched_to})")]
    NoFeasibleN { lower: u32, searched_to: u32 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("arity error: {0}")]
    Arity(String),

    #[error("non-positive response {value} in run {run}, replicate {replicate}")]
    NonPositiveResponse { run: usize, replicate: usize, value: f64 },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("invalid weights: {0}")]
    Weight(String),

    #[error("error sum of squares is negative ({0:e})")]
    NegativeErrorSs(f64),

    #[error("significant factor set is empty")]
    EmptySignificantSet,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation failed:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("missing run {0}")]
    MissingRun(usize),

    #[error("duplicate run {0}")]
    DuplicateRun(usize),

    #[error("run {run} is outside the plan (1..={runs})")]
    UnknownRun { run: usize, runs: usize },

    #[error("non-numeric value {value:?} at line {line}, column {column:?}")]
    NonNumeric { line: usize, column: String, value: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by the filesystem rather than by the inputs.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
