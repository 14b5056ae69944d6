//! Projectors used to remove known kernels and deflated subspaces.

use super::cg::cg;
use super::csr::{dot, CsrMatrix};

/// A linear projector applied in place.
pub trait Projection {
    fn project(&self, x: &mut [f64]);

    /// The removed subspace as explicit vectors, when available. The vectors
    /// are orthonormal in the inner product the projector is built for.
    fn explicit_basis(&self) -> Option<&[Vec<f64>]> {
        None
    }
}

/// Removes the mean: the Euclidean projector onto `1^⊥`.
#[derive(Clone, Copy, Debug, Default)]
pub struct MeanFree;

impl Projection for MeanFree {
    fn project(&self, x: &mut [f64]) {
        if x.is_empty() {
            return;
        }
        let m = x.iter().sum::<f64>() / x.len() as f64;
        for v in x {
            *v -= m;
        }
    }
}

/// `x ← x − Σ b_k ⟨b_k, x⟩_M` for a basis orthonormal in `M` (Euclidean
/// when `metric` is `None`).
#[derive(Clone, Debug)]
pub struct BasisProjection {
    basis: Vec<Vec<f64>>,
    metric: Option<CsrMatrix>,
}

impl BasisProjection {
    pub fn new(basis: Vec<Vec<f64>>, metric: Option<CsrMatrix>) -> Self {
        BasisProjection { basis, metric }
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }
}

impl Projection for BasisProjection {
    fn project(&self, x: &mut [f64]) {
        // Two passes of modified Gram–Schmidt keep the result orthogonal to
        // working precision.
        for _ in 0..2 {
            for b in &self.basis {
                let c = match &self.metric {
                    Some(m) => dot(b, &m.matvec(x)),
                    None => dot(b, x),
                };
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= c * bi;
                }
            }
        }
    }

    fn explicit_basis(&self) -> Option<&[Vec<f64>]> {
        Some(&self.basis)
    }
}

/// `M`-orthogonal projector onto the complement of `range(G)`:
/// `x ← x − G L⁺ Gᵀ M x` with `L = Gᵀ M G`.
///
/// `L` may be singular with the constants as kernel, which happens when
/// `G·1 = 0`.
#[derive(Clone, Debug)]
pub struct RangeProjection {
    g: CsrMatrix,
    m: CsrMatrix,
    l: CsrMatrix,
    singular: bool,
    tol: f64,
}

impl RangeProjection {
    pub fn new(g: CsrMatrix, m: CsrMatrix) -> Self {
        let l = g.transpose().matmul(&m.matmul(&g));
        let ones = vec![1.0; g.ncols()];
        let g1 = g.matvec(&ones);
        let singular = g.ncols() > 0 && g1.iter().all(|v| v.abs() < 1e-12);
        RangeProjection { g, m, l, singular, tol: 1e-13 }
    }

    /// Coefficients `q` of the `M`-orthogonal projection `G q` of `x`.
    pub fn coefficients(&self, x: &[f64]) -> Vec<f64> {
        if self.g.ncols() == 0 {
            return Vec::new();
        }
        let rhs = self.g.matvec_transpose(&self.m.matvec(x));
        let proj: Option<&dyn Projection> = if self.singular { Some(&super::projection::MeanFree) } else { None };
        let maxit = 20 * self.l.nrows() + 100;
        match cg(&self.l, &rhs, self.tol, maxit, proj) {
            Ok((q, _)) => q,
            Err(crate::error::Error::NotConverged { best: Some(best), .. }) => best.0,
            Err(e) => panic!("gradient projection failed: {e}"),
        }
    }
}

impl Projection for RangeProjection {
    fn project(&self, x: &mut [f64]) {
        let q = self.coefficients(x);
        if q.is_empty() {
            return;
        }
        let gq = self.g.matvec(&q);
        for (xi, v) in x.iter_mut().zip(gq) {
            *xi -= v;
        }
    }
}

/// Applies several projectors in sequence. The removed subspaces must be
/// mutually orthogonal for the result to be a projector.
pub struct Composite<'a>(pub Vec<&'a dyn Projection>);

impl Projection for Composite<'_> {
    fn project(&self, x: &mut [f64]) {
        for p in &self.0 {
            p.project(x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_free_removes_constant() {
        let mut x = vec![1.0, 2.0, 3.0];
        MeanFree.project(&mut x);
        assert_eq!(x, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn range_projection_is_m_orthogonal() {
        // Path graph incidence; M diagonal.
        // Cycle graph on four nodes: range(G) has codimension one.
        let g = CsrMatrix::from_triplets(
            4,
            4,
            vec![(0, 0, -1.0), (0, 1, 1.0), (1, 1, -1.0), (1, 2, 1.0), (2, 2, -1.0), (2, 3, 1.0), (3, 0, -1.0), (3, 3, 1.0)],
        );
        let m = CsrMatrix::from_triplets(4, 4, vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0), (3, 3, 1.5)]);
        let p = RangeProjection::new(g.clone(), m.clone());
        let mut x = vec![0.3, -1.0, 2.0, 0.7];
        p.project(&mut x);
        assert!(x.iter().any(|v| v.abs() > 1e-3));
        let mut again = x.clone();
        p.project(&mut again);
        assert!(x.iter().zip(&again).all(|(a, b)| (a - b).abs() < 1e-12));
        let r = g.matvec_transpose(&m.matvec(&x));
        assert!(r.iter().all(|v| v.abs() < 1e-12), "{r:?}");
    }
}
