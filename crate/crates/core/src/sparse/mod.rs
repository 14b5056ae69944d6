//! Sparse storage and the iterative and dense solvers built on it.

mod cg;
mod csr;
mod dense;
mod eigen;
mod projection;
mod saddle;

pub use cg::{cg, cg_monitored};
pub use csr::{axpy, dot, norm2, CsrMatrix};
pub use dense::{normalize_sign, nullspace_basis, nullspace_dense, Nullspace, DENSE_LIMIT, RANK_TOL};
pub use eigen::{smallest_eigenpairs, smallest_eigenpairs_with, EigenOptions, Eigenpairs};
pub use projection::{BasisProjection, Composite, MeanFree, Projection, RangeProjection};
pub use saddle::solve_saddle;

/// Outcome of an iterative solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub method: String,
    pub iterations: usize,
    /// Final relative residual.
    pub residual: f64,
    pub converged: bool,
}

impl SolveReport {
    pub fn new(method: &str) -> Self {
        SolveReport { method: method.to_string(), iterations: 0, residual: 0.0, converged: false }
    }
}
