use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |h - h^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("filter is singular (smallest singular value {min_singular:e})")]
    SingularFilter { min_singular: f64 },

    #[error("trace {trace:e} is too small to normalize")]
    ZeroTrace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("map {map} needs a {expected}x{expected} input, got {rows}x{cols}")]
    WrongDim {
        map: &'static str,
        expected: usize,
        rows: usize,
        cols: usize,
    },

    #[error("diagonal entry d[{index}] = {value} outside (0, 1]")]
    BadDiagonal { index: usize, value: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown catalog label `{0}`")]
    UnknownLabel(String),

    #[error("no shot was accepted")]
    NoAcceptedShots,

    #[error("file not found: {0}")]
    FileNotFound(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}
