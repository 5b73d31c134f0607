use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite: pivot {pivot} has value {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: entry ({row}, {col}) differs by {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("diagonal entry {index} is not strictly positive ({value:e})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("unsupported Matérn smoothness nu = {0}; expected 0.5, 1.5, 2.5 or infinity")]
    UnsupportedSmoothness(f64),

    #[error("variance arguments must be strictly positive (kxx = {kxx:e}, kyy = {kyy:e})")]
    NonPositiveVariance { kxx: f64, kyy: f64 },

    #[error("invalid kernel parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("column {0} is constant and cannot be scaled")]
    DegenerateColumn(usize),

    #[error("least-squares design matrix is rank deficient")]
    RankDeficientDesign,

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error("missing column {0:?}")]
    MissingColumn(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("need at least {needed} rows, found {found}")]
    InsufficientRows { needed: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("every hyperparameter setting in the grid is invalid")]
    AllThetaInvalid,

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("need at least two valid hyperparameter settings, found {0}")]
    InsufficientThetas(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),
}
