//! Smallest eigenpairs of `A x = λ M x` with `A` semidefinite and `M`
//! positive definite.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cg::cg_monitored;
use super::csr::{dot, norm2, CsrMatrix};
use super::dense::normalize_sign;
use super::projection::Projection;
use super::SolveReport;
use crate::error::{Error, Result};

/// Below this size (and without an implicit deflation) the problem is
/// solved densely.
const DENSE_EIGEN_LIMIT: usize = 300;

#[derive(Clone, Debug)]
pub struct EigenOptions {
    /// Target for `‖A x − λ M x‖ / ‖x‖_M` relative to `|λ| + shift`.
    pub tol: f64,
    pub max_iterations: usize,
    /// Positive shift for the inner solves; estimated when `None`.
    pub shift: Option<f64>,
    /// Subspace size; defaults to `max(2k, k + 4)`.
    pub block: Option<usize>,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-10, max_iterations: 400, shift: None, block: None, seed: 0x5eed }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    /// Ascending.
    pub values: Vec<f64>,
    /// `M`-orthonormal, sign-normalized.
    pub vectors: Vec<Vec<f64>>,
    /// `‖A x − λ M x‖ / ‖x‖_M` per pair.
    pub residuals: Vec<f64>,
    pub report: SolveReport,
}

/// The `k` smallest eigenpairs on the `M`-orthogonal complement of the
/// subspace removed by `deflation`.
///
/// `deflation` must be the `M`-orthogonal projector onto that complement and
/// the removed subspace must be invariant under `M⁻¹A` (e.g. a kernel).
pub fn smallest_eigenpairs(
    a: &CsrMatrix,
    m: &CsrMatrix,
    k: usize,
    deflation: Option<&dyn Projection>,
) -> Result<Eigenpairs> {
    smallest_eigenpairs_with(a, m, k, deflation, &EigenOptions::default())
}

pub fn smallest_eigenpairs_with(
    a: &CsrMatrix,
    m: &CsrMatrix,
    k: usize,
    deflation: Option<&dyn Projection>,
    opts: &EigenOptions,
) -> Result<Eigenpairs> {
    let n = a.nrows();
    if a.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "eigen: A {}x{}, M {}x{}",
            a.nrows(),
            a.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    let explicit = match deflation {
        None => Some(&[][..]),
        Some(p) => p.explicit_basis(),
    };
    if n <= DENSE_EIGEN_LIMIT {
        if let Some(basis) = explicit {
            return dense_pairs(a, m, k, basis);
        }
    }
    subspace_iteration(a, m, k, deflation, opts)
}

fn dense_pairs(a: &CsrMatrix, m: &CsrMatrix, k: usize, deflate: &[Vec<f64>]) -> Result<Eigenpairs> {
    let n = a.nrows();
    let ad = a.to_dense();
    let md = m.to_dense();
    let chol = md
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite { cell: 0, min_eigenvalue: f64::NAN })?;
    let l = chol.l();
    let linv = l.clone().try_inverse().expect("Cholesky factor is invertible");
    let c = &linv * &ad * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;

    // Orthonormal basis of the complement of Lᵀ·deflate.
    let q = if deflate.is_empty() {
        DMatrix::identity(n, n)
    } else {
        let z = DMatrix::from_columns(
            &deflate.iter().map(|d| l.transpose() * DVector::from_column_slice(d)).collect::<Vec<_>>(),
        );
        let p = DMatrix::identity(n, n) - &z * z.transpose();
        let e = SymmetricEigen::new((&p + p.transpose()) * 0.5);
        let cols: Vec<_> = (0..n).filter(|&i| e.eigenvalues[i] > 0.5).map(|i| e.eigenvectors.column(i).into_owned()).collect();
        if cols.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            DMatrix::from_columns(&cols)
        }
    };
    let r = q.ncols();
    let cr = q.transpose() * &c * &q;
    let e = SymmetricEigen::new((&cr + cr.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));

    let mut out = Eigenpairs {
        values: Vec::new(),
        vectors: Vec::new(),
        residuals: Vec::new(),
        report: SolveReport::new("eigen/dense"),
    };
    let lt_inv = linv.transpose();
    for &i in order.iter().take(k) {
        let y = &q * e.eigenvectors.column(i);
        let mut x: Vec<f64> = (&lt_inv * y).iter().copied().collect();
        normalize_sign(&mut x);
        let lam = e.eigenvalues[i];
        out.residuals.push(residual(a, m, &x, lam));
        out.values.push(lam);
        out.vectors.push(x);
    }
    out.report.converged = true;
    out.report.residual = out.residuals.iter().fold(0.0, |a: f64, b| a.max(*b));
    Ok(out)
}

fn residual(a: &CsrMatrix, m: &CsrMatrix, x: &[f64], lam: f64) -> f64 {
    let ax = a.matvec(x);
    let mx = m.matvec(x);
    let r: Vec<f64> = ax.iter().zip(&mx).map(|(p, q)| p - lam * q).collect();
    norm2(&r) / dot(x, &mx).sqrt()
}

fn subspace_iteration(
    a: &CsrMatrix,
    m: &CsrMatrix,
    k: usize,
    deflation: Option<&dyn Projection>,
    opts: &EigenOptions,
) -> Result<Eigenpairs> {
    let n = a.nrows();
    let p = opts.block.unwrap_or((2 * k).max(k + 4)).max(k).min(n);
    let project = |v: &mut Vec<f64>| {
        if let Some(d) = deflation {
            d.project(v);
        }
    };
    let shift = opts.shift.unwrap_or_else(|| {
        let ta: f64 = a.diagonal().iter().sum();
        let tm: f64 = m.diagonal().iter().sum();
        1e-2 * ta / tm
    });
    let shifted = a.add_scaled(m, shift);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect() };

    let mut x: Vec<Vec<f64>> = (0..p).map(|_| random(&mut rng)).collect();
    for v in &mut x {
        project(v);
    }
    m_orthonormalize(&mut x, m, &mut rng, &project);

    let mut report = SolveReport::new("eigen/subspace");
    let mut theta = vec![0.0; p];
    let mut res = vec![f64::INFINITY; p];
    let inner_maxit = 20 * n + 200;
    for it in 1..=opts.max_iterations {
        let mut y = Vec::with_capacity(p);
        for (j, xj) in x.iter().enumerate() {
            let rhs = m.matvec(xj);
            let guess: Vec<f64> = xj.iter().map(|v| v / (theta[j] + shift)).collect();
            let yj = match cg_monitored(&shifted, &rhs, Some(&guess), 1e-12, inner_maxit, None, &mut |_, _| {}) {
                Ok((v, _)) => v,
                Err(Error::NotConverged { best: Some(b), .. }) => b.0,
                Err(e) => return Err(e),
            };
            let mut yj = yj;
            project(&mut yj);
            y.push(yj);
        }
        m_orthonormalize(&mut y, m, &mut rng, &project);

        // Rayleigh–Ritz on span(Y).
        let ay: Vec<Vec<f64>> = y.iter().map(|v| a.matvec(v)).collect();
        let h = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ay[j]) + dot(&y[j], &ay[i])));
        let e = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
        x = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (r, yr) in y.iter().enumerate() {
                    let w = e.eigenvectors[(r, c)];
                    for (vi, yi) in v.iter_mut().zip(yr) {
                        *vi += w * yi;
                    }
                }
                v
            })
            .collect();
        theta = order.iter().map(|&c| e.eigenvalues[c]).collect();
        for j in 0..k {
            res[j] = residual(a, m, &x[j], theta[j]);
        }
        report.iterations = it;
        let done = (0..k).all(|j| res[j] <= opts.tol * (theta[j].abs() + shift));
        if done {
            report.converged = true;
            break;
        }
    }
    report.residual = (0..k).map(|j| res[j] / (theta[j].abs() + shift)).fold(0.0, f64::max);
    if !report.converged {
        return Err(Error::not_converged(&report, None));
    }
    let mut vectors: Vec<Vec<f64>> = x.into_iter().take(k).collect();
    for v in &mut vectors {
        normalize_sign(v);
    }
    Ok(Eigenpairs { values: theta[..k].to_vec(), vectors, residuals: res[..k].to_vec(), report })
}

/// Modified Gram–Schmidt with reorthogonalization in the `M` inner product;
/// columns that collapse are replaced by fresh random directions.
fn m_orthonormalize(
    x: &mut [Vec<f64>],
    m: &CsrMatrix,
    rng: &mut ChaCha8Rng,
    project: &dyn Fn(&mut Vec<f64>),
) {
    let n = m.nrows();
    let mut mx: Vec<Vec<f64>> = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        for attempt in 0..5 {
            let before = dot(&x[j], &m.matvec(&x[j])).sqrt();
            for _ in 0..2 {
                for i in 0..j {
                    let c = dot(&mx[i], &x[j]);
                    let (head, tail) = x.split_at_mut(j);
                    for (v, q) in tail[0].iter_mut().zip(&head[i]) {
                        *v -= c * q;
                    }
                }
            }
            let mxj = m.matvec(&x[j]);
            let nrm = dot(&x[j], &mxj).sqrt();
            if nrm > 1e-10 * before && nrm > 0.0 {
                for v in &mut x[j] {
                    *v /= nrm;
                }
                mx.push(mxj.iter().map(|v| v / nrm).collect());
                break;
            }
            assert!(attempt < 4, "cannot extend the search subspace");
            x[j] = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            project(&mut x[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::projection::BasisProjection;

    #[test]
    fn diagonal_pencil() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, 2.0)]);
        let m = CsrMatrix::identity(2);
        let e = smallest_eigenpairs(&a, &m, 2, None).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 2.0).abs() < 1e-14);
    }

    /// 1D Dirichlet Laplacian with lumped mass: λ_j = (2 − 2cos(jπh))/h².
    fn laplacian_1d(n: usize) -> (CsrMatrix, CsrMatrix, Vec<f64>) {
        let h = 1.0 / (n + 1) as f64;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 / (h * h)));
            if i + 1 < n {
                t.push((i, i + 1, -1.0 / (h * h)));
                t.push((i + 1, i, -1.0 / (h * h)));
            }
        }
        let exact = (1..=n).map(|j| (2.0 - 2.0 * (j as f64 * std::f64::consts::PI * h).cos()) / (h * h)).collect();
        (CsrMatrix::from_triplets(n, n, t), CsrMatrix::identity(n), exact)
    }

    #[test]
    fn iterative_matches_analytic_spectrum() {
        let (a, m, exact) = laplacian_1d(400);
        let e = smallest_eigenpairs(&a, &m, 3, None).unwrap();
        assert_eq!(e.report.method, "eigen/subspace");
        for j in 0..3 {
            assert!((e.values[j] - exact[j]).abs() < 1e-8 * exact[j], "{} vs {}", e.values[j], exact[j]);
        }
    }

    #[test]
    fn explicit_deflation_skips_kernel() {
        let a = CsrMatrix::from_triplets(3, 3, vec![(1, 1, 2.0), (2, 2, 5.0)]);
        let m = CsrMatrix::identity(3);
        let defl = BasisProjection::new(vec![vec![1.0, 0.0, 0.0]], Some(m.clone()));
        let e = smallest_eigenpairs(&a, &m, 2, Some(&defl)).unwrap();
        assert!((e.values[0] - 2.0).abs() < 1e-14 && (e.values[1] - 5.0).abs() < 1e-14);
    }
}
