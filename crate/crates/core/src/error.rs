//! Error type shared by every module of the crate.

use crate::sparse::SolveReport;

/// Errors raised by mesh construction, validation, assembly and the solvers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),
    #[error("malformed meshlite input at line {line}: {msg}")]
    MalformedHeader { line: usize, msg: String },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("non-positive tetrahedron volume: {0}")]
    NegativeVolume(String),
    #[error("boundary triangle does not cover a boundary face: {0}")]
    UncoveredBoundary(String),
    #[error("material matrix in cell {cell} is not symmetric (deviation {deviation:e})")]
    NonSymmetric { cell: usize, deviation: f64 },
    #[error("material matrix in cell {cell} is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { cell: usize, min_eigenvalue: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{method} did not converge: {iterations} iterations, relative residual {residual:e}")]
    NotConverged {
        method: String,
        iterations: usize,
        residual: f64,
        /// Best iterate reached before giving up, when the solver has one.
        best: Option<Box<(Vec<f64>, SolveReport)>>,
    },
    #[error("saddle point system is singular or incompatible: {0}")]
    SingularSaddle(String),
    #[error("rank is ambiguous: {count_tight} vs {count_loose} null directions across one decade of tolerance")]
    AmbiguousRank { count_tight: usize, count_loose: usize },
    #[error("problem too large for the dense path: {0} unknowns")]
    TooLarge(usize),
    #[error("incompatible data: {0}")]
    IncompatibleData(String),
    #[error("operator bound violated: ratio {ratio} exceeds bound {bound}")]
    BoundViolated { ratio: f64, bound: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn not_converged(report: &SolveReport, best: Option<Vec<f64>>) -> Self {
        Error::NotConverged {
            method: report.method.to_string(),
            iterations: report.iterations,
            residual: report.residual,
            best: best.map(|x| Box::new((x, report.clone()))),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
