use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::cg::cg;
use super::csr::{norm2, CsrMatrix};
use super::projection::Projection;
use super::SolveReport;
use crate::error::{Error, Result};

/// Largest constraint count for which `B Bᵀ` is inverted densely.
const DENSE_SCHUR_LIMIT: usize = 1500;

/// Solves `[[A, Bᵀ], [B, 0]] (x, y) = (f, g)` by projected conjugate
/// gradients on `ker B`.
///
/// `B` may have dependent rows as long as `g` is consistent; `y` is then
/// the minimum-norm multiplier. `A` must be positive definite on `ker B`.
pub fn solve_saddle(
    a: &CsrMatrix,
    b: &CsrMatrix,
    f: &[f64],
    g: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, Vec<f64>, SolveReport)> {
    let n = a.nrows();
    if a.ncols() != n || b.ncols() != n || f.len() != n || g.len() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "saddle: A {}x{}, B {}x{}, f {}, g {}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            f.len(),
            g.len()
        )));
    }
    let maxit = 20 * n + 200;
    if b.nrows() == 0 {
        let (x, mut rep) = cg(a, f, tol, maxit, None)?;
        rep.method = "saddle/cg".into();
        return Ok((x, Vec::new(), rep));
    }

    let schur = Schur::new(b)?;
    let w = schur.solve(g)?;
    let xp = b.matvec_transpose(&w);

    let mut rhs = a.matvec(&xp);
    for (r, fi) in rhs.iter_mut().zip(f) {
        *r = fi - *r;
    }
    let proj = KernelProjection { b, schur: &schur };
    let (z, cg_rep) = match cg(a, &rhs, tol, maxit, Some(&proj)) {
        Ok(v) => v,
        Err(Error::NotConverged { iterations, residual, best, .. }) => {
            let mut rep = SolveReport::new("saddle/projected-cg");
            rep.iterations = iterations;
            rep.residual = residual;
            let best = best.map(|b| {
                let mut x = b.0;
                for (xi, pi) in x.iter_mut().zip(&xp) {
                    *xi += pi;
                }
                x
            });
            return Err(Error::not_converged(&rep, best));
        }
        Err(e) => return Err(e),
    };
    let mut x = z;
    for (xi, pi) in x.iter_mut().zip(&xp) {
        *xi += pi;
    }

    let mut r = a.matvec(&x);
    for (ri, fi) in r.iter_mut().zip(f) {
        *ri = fi - *ri;
    }
    let y = schur.solve_unchecked(&b.matvec(&r));

    let mut rep = SolveReport::new("saddle/projected-cg");
    rep.iterations = cg_rep.iterations;
    let by = b.matvec_transpose(&y);
    let mut res1 = a.matvec(&x);
    for ((ri, fi), byi) in res1.iter_mut().zip(f).zip(&by) {
        *ri += byi - fi;
    }
    let mut res2 = b.matvec(&x);
    for (ri, gi) in res2.iter_mut().zip(g) {
        *ri -= gi;
    }
    let scale = norm2(f).max(norm2(g));
    rep.residual = if scale > 0.0 { norm2(&res1).max(norm2(&res2)) / scale } else { 0.0 };
    rep.converged = cg_rep.converged;
    Ok((x, y, rep))
}

/// Pseudo-inverse of `B Bᵀ`.
pub(crate) enum Schur {
    Dense { q: DMatrix<f64>, inv: Vec<f64>, null: Vec<usize> },
    Iterative { s: CsrMatrix },
}

impl Schur {
    pub(crate) fn new(b: &CsrMatrix) -> Result<Self> {
        let s = b.matmul(&b.transpose());
        if s.nrows() <= DENSE_SCHUR_LIMIT {
            let eig = SymmetricEigen::new(s.to_dense());
            let lmax = eig.eigenvalues.amax();
            if lmax == 0.0 {
                return Err(Error::SingularSaddle("constraint matrix is zero".into()));
            }
            let thr = 1e-11 * lmax;
            let mut inv = Vec::with_capacity(eig.eigenvalues.len());
            let mut null = Vec::new();
            for (k, &l) in eig.eigenvalues.iter().enumerate() {
                if l > thr {
                    inv.push(1.0 / l);
                } else {
                    inv.push(0.0);
                    null.push(k);
                }
            }
            Ok(Schur::Dense { q: eig.eigenvectors, inv, null })
        } else {
            Ok(Schur::Iterative { s })
        }
    }

    /// `S⁺ v`, failing when `v` has a component in `ker S`.
    pub(crate) fn solve(&self, v: &[f64]) -> Result<Vec<f64>> {
        let vn = norm2(v);
        if vn == 0.0 {
            return Ok(vec![0.0; v.len()]);
        }
        match self {
            Schur::Dense { q, null, .. } => {
                let vv = DVector::from_column_slice(v);
                let c = q.transpose() * &vv;
                let leak = null.iter().map(|&k| c[k] * c[k]).sum::<f64>().sqrt();
                if leak > 1e-9 * vn {
                    return Err(Error::SingularSaddle(format!(
                        "constraint right-hand side has relative component {:e} outside the range of B",
                        leak / vn
                    )));
                }
                Ok(self.solve_unchecked(v))
            }
            Schur::Iterative { s } => match cg(s, v, 1e-13, 20 * s.nrows() + 200, None) {
                Ok((w, _)) => Ok(w),
                Err(Error::NotConverged { residual, best: Some(best), .. }) if residual < 1e-9 => Ok(best.0),
                Err(e) => Err(Error::SingularSaddle(format!("constraint solve failed: {e}"))),
            },
        }
    }

    pub(crate) fn solve_unchecked(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Schur::Dense { q, inv, .. } => {
                let vv = DVector::from_column_slice(v);
                let mut c = q.transpose() * &vv;
                for (ci, s) in c.iter_mut().zip(inv) {
                    *ci *= s;
                }
                (q * c).as_slice().to_vec()
            }
            Schur::Iterative { s } => match cg(s, v, 1e-13, 20 * s.nrows() + 200, None) {
                Ok((w, _)) => w,
                Err(Error::NotConverged { best: Some(best), .. }) => best.0,
                Err(_) => vec![0.0; v.len()],
            },
        }
    }
}

/// Euclidean projector onto `ker B`.
pub(crate) struct KernelProjection<'a> {
    pub(crate) b: &'a CsrMatrix,
    pub(crate) schur: &'a Schur,
}

impl Projection for KernelProjection<'_> {
    fn project(&self, x: &mut [f64]) {
        for _ in 0..2 {
            let w = self.schur.solve_unchecked(&self.b.matvec(x));
            let btw = self.b.matvec_transpose(&w);
            for (xi, v) in x.iter_mut().zip(btw) {
                *xi -= v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_constraints_reduce_to_cg() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 2.0), (1, 1, 4.0)]);
        let b = CsrMatrix::zeros(0, 2);
        let (x, y, _) = solve_saddle(&a, &b, &[2.0, 4.0], &[], 1e-12).unwrap();
        assert!(y.is_empty());
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_with_sum_constraint() {
        let a = CsrMatrix::identity(2);
        let b = CsrMatrix::from_triplets(1, 2, vec![(0, 0, 1.0), (0, 1, 1.0)]);
        let (x, y, _) = solve_saddle(&a, &b, &[0.0, 0.0], &[0.0], 1e-12).unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
        assert_eq!(y, vec![0.0]);
    }

    #[test]
    fn random_instance_matches_dense_lu() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (n, m) = (30, 8);
        let r = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let ad = &r * r.transpose() + DMatrix::identity(n, n);
        let bd = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let (x, y, rep) =
            solve_saddle(&CsrMatrix::from_dense(&ad), &CsrMatrix::from_dense(&bd), &f, &g, 1e-13).unwrap();
        assert!(rep.residual < 1e-9, "{}", rep.residual);

        let mut k = DMatrix::zeros(n + m, n + m);
        k.view_mut((0, 0), (n, n)).copy_from(&ad);
        k.view_mut((n, 0), (m, n)).copy_from(&bd);
        k.view_mut((0, n), (n, m)).copy_from(&bd.transpose());
        let rhs = DVector::from_iterator(n + m, f.iter().chain(&g).copied());
        let sol = k.lu().solve(&rhs).unwrap();
        let xe = (DVector::from_vec(x) - sol.rows(0, n)).norm() / sol.rows(0, n).norm();
        let ye = (DVector::from_vec(y) - sol.rows(n, m)).norm() / sol.rows(n, m).norm();
        assert!(xe < 1e-9 && ye < 1e-9, "{xe} {ye}");
    }

    #[test]
    fn dependent_rows_with_inconsistent_rhs() {
        let a = CsrMatrix::identity(3);
        let b = CsrMatrix::from_triplets(2, 3, vec![(0, 0, 1.0), (1, 0, 1.0)]);
        assert!(matches!(
            solve_saddle(&a, &b, &[0.0; 3], &[1.0, 2.0], 1e-12),
            Err(Error::SingularSaddle(_))
        ));
        let (x, _, _) = solve_saddle(&a, &b, &[0.0; 3], &[1.0, 1.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12, "{x:?}");
    }
}
