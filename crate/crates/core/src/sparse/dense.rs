use nalgebra::{DMatrix, SymmetricEigen};

use super::csr::CsrMatrix;
use crate::error::{Error, Result};

/// Largest system handled by the dense rank and eigen paths.
pub const DENSE_LIMIT: usize = 1200;

/// Relative threshold below which an eigenvalue counts as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Null space of a symmetric positive semidefinite matrix.
#[derive(Clone, Debug)]
pub struct Nullspace {
    pub dim: usize,
    /// Orthonormal columns, sign-normalized.
    pub basis: Vec<Vec<f64>>,
    /// Eigenvalues sorted ascending, for diagnostics.
    pub spectrum: Vec<f64>,
}

/// Eigenvalues `≤ tol·λ_max` count as zero; the count must not change when
/// `tol` moves by one decade in either direction.
pub fn nullspace_basis(a: &CsrMatrix, tol: f64) -> Result<Nullspace> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!("nullspace of {}x{} matrix", n, a.ncols())));
    }
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge(n));
    }
    nullspace_dense(&a.to_dense(), tol)
}

pub fn nullspace_dense(a: &DMatrix<f64>, tol: f64) -> Result<Nullspace> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Nullspace { dim: 0, basis: Vec::new(), spectrum: Vec::new() });
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let spectrum: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let lmax = spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let count = |t: f64| spectrum.iter().filter(|&&l| l <= t * lmax).count();
    let dim = if lmax == 0.0 { n } else { count(tol) };
    if lmax > 0.0 {
        let (tight, loose) = (count(tol / 10.0), count(tol * 10.0));
        if tight != dim || loose != dim {
            return Err(Error::AmbiguousRank { count_tight: tight, count_loose: loose });
        }
    }
    let mut basis: Vec<Vec<f64>> =
        order[..dim].iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    for b in &mut basis {
        normalize_sign(b);
    }
    Ok(Nullspace { dim, basis, spectrum })
}

/// Flips `v` so that its first significant entry is positive.
pub fn normalize_sign(v: &mut [f64]) {
    let amax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * amax) {
        if *first < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_kernel() {
        let a = CsrMatrix::from_triplets(3, 3, vec![(0, 0, 0.0), (1, 1, 1.0), (2, 2, 2.0)]);
        let ns = nullspace_basis(&a, RANK_TOL).unwrap();
        assert_eq!(ns.dim, 1);
        assert_eq!(ns.basis[0], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_matrix_full_kernel() {
        let a = CsrMatrix::zeros(3, 3);
        assert_eq!(nullspace_basis(&a, RANK_TOL).unwrap().dim, 3);
    }

    #[test]
    fn ambiguous_rank_detected() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, 1e-9)]);
        assert!(matches!(nullspace_basis(&a, RANK_TOL), Err(Error::AmbiguousRank { .. })));
    }

    #[test]
    fn too_large() {
        let a = CsrMatrix::identity(DENSE_LIMIT + 1);
        assert!(matches!(nullspace_basis(&a, RANK_TOL), Err(Error::TooLarge(_))));
    }
}
