use super::csr::{axpy, dot, norm2, CsrMatrix};
use super::projection::Projection;
use super::SolveReport;
use crate::error::{Error, Result};

/// Jacobi-preconditioned conjugate gradients.
///
/// With a projector `P` the solver works on `range(P)`: it solves
/// `P A x = P b` with `x = P x` and reports `‖P(b − A x)‖ / ‖P b‖`.
/// `P` must be an orthogonal projector in the Euclidean inner product.
pub fn cg(
    a: &CsrMatrix,
    b: &[f64],
    tol: f64,
    maxit: usize,
    projector: Option<&dyn Projection>,
) -> Result<(Vec<f64>, SolveReport)> {
    cg_monitored(a, b, None, tol, maxit, projector, &mut |_, _| {})
}

/// [`cg`] with an optional initial guess and a callback receiving every
/// iterate.
pub fn cg_monitored(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    maxit: usize,
    projector: Option<&dyn Projection>,
    monitor: &mut dyn FnMut(usize, &[f64]),
) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n || x0.is_some_and(|x| x.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "cg: matrix {}x{}, rhs {}, guess {:?}",
            a.nrows(),
            a.ncols(),
            b.len(),
            x0.map(|x| x.len())
        )));
    }
    let project = |v: &mut [f64]| {
        if let Some(p) = projector {
            p.project(v);
        }
    };
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect();
    let precondition = |r: &[f64]| {
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
        project(&mut z);
        z
    };

    let mut pb = b.to_vec();
    project(&mut pb);
    let bnorm = norm2(&pb);
    let mut report = SolveReport::new("cg");
    // A projected right-hand side at round-off level carries no information.
    if bnorm == 0.0 || (projector.is_some() && bnorm <= 1e-14 * norm2(b)) {
        report.converged = true;
        return Ok((vec![0.0; n], report));
    }

    let mut x = x0.map(|x| x.to_vec()).unwrap_or_else(|| vec![0.0; n]);
    project(&mut x);
    let true_residual = |x: &[f64]| {
        let mut r = a.matvec(x);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        project(&mut r);
        r
    };
    let mut r = true_residual(&x);
    let mut rel = norm2(&r) / bnorm;
    let mut best = (rel, x.clone());
    let mut ap = vec![0.0; n];
    let mut it = 0;
    let mut restarts = 0;

    'outer: while it < maxit {
        let mut z = precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while it < maxit {
            if rel <= tol {
                // Guard against drift of the recursive residual.
                r = true_residual(&x);
                rel = norm2(&r) / bnorm;
                if rel <= tol || restarts >= 5 {
                    break 'outer;
                }
                restarts += 1;
                continue 'outer;
            }
            a.matvec_into(&p, &mut ap);
            project(&mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                report.iterations = it;
                report.residual = best.0;
                return Err(Error::not_converged(&report, Some(best.1)));
            }
            let alpha = rz / pap;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &ap, &mut r);
            it += 1;
            rel = norm2(&r) / bnorm;
            monitor(it, &x);
            if rel < best.0 {
                best = (rel, x.clone());
            }
            z = precondition(&r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for (pi, zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
    }
    report.iterations = it;
    if rel > tol {
        r = true_residual(&x);
        rel = norm2(&r) / bnorm;
    }
    report.residual = rel;
    if rel <= tol {
        report.converged = true;
        Ok((x, report))
    } else {
        report.residual = rel.min(best.0);
        let x = if best.0 < rel { best.1 } else { x };
        Err(Error::not_converged(&report, Some(x)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::projection::MeanFree;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_one_iteration() {
        let a = CsrMatrix::identity(5);
        let b = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        let (x, rep) = cg(&a, &b, 1e-12, 10, None).unwrap();
        assert_eq!(x, b);
        assert!(rep.iterations <= 1);
        assert!(rep.converged);
    }

    #[test]
    fn diagonal_system() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 2.0), (1, 1, 3.0)]);
        let (x, _) = cg(&a, &[2.0, 3.0], 1e-14, 10, None).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        &b * b.transpose() + DMatrix::identity(n, n) * (n as f64 * 0.1)
    }

    #[test]
    fn random_spd_matches_cholesky() {
        let d = random_spd(50, 3);
        let a = CsrMatrix::from_dense(&d);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (x, _) = cg(&a, &b, 1e-13, 500, None).unwrap();
        let oracle = d.cholesky().unwrap().solve(&nalgebra::DVector::from_vec(b));
        let err = (nalgebra::DVector::from_vec(x) - &oracle).norm() / oracle.norm();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn a_norm_error_is_monotone() {
        let d = random_spd(40, 9);
        let a = CsrMatrix::from_dense(&d);
        let b: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
        let exact = d.clone().cholesky().unwrap().solve(&nalgebra::DVector::from_vec(b.clone()));
        let mut errs = Vec::new();
        let mut monitor = |_: usize, x: &[f64]| {
            let e = nalgebra::DVector::from_column_slice(x) - &exact;
            errs.push((e.transpose() * &d * &e)[(0, 0)].sqrt());
        };
        cg_monitored(&a, &b, None, 1e-12, 500, None, &mut monitor).unwrap();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-10) + 1e-14, "{} > {}", w[1], w[0]);
        }
    }

    #[test]
    fn singular_laplacian_with_mean_projector() {
        // Path graph Laplacian: kernel = constants.
        let n = 6;
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.extend([(i, i, 1.0), (i + 1, i + 1, 1.0), (i, i + 1, -1.0), (i + 1, i, -1.0)]);
        }
        let a = CsrMatrix::from_triplets(n, n, t);
        let b = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let (x, rep) = cg(&a, &b, 1e-12, 100, Some(&MeanFree)).unwrap();
        assert!(rep.converged);
        assert!(x.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn not_converged_returns_best() {
        let d = random_spd(30, 1);
        let a = CsrMatrix::from_dense(&d);
        let b = vec![1.0; 30];
        match cg(&a, &b, 1e-14, 2, None) {
            Err(Error::NotConverged { best: Some(best), iterations, .. }) => {
                assert_eq!(iterations, 2);
                assert_eq!(best.0.len(), 30);
                assert!(!best.1.converged);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch() {
        let a = CsrMatrix::identity(3);
        assert!(matches!(cg(&a, &[1.0], 1e-10, 10, None), Err(Error::DimensionMismatch(_))));
    }
}
