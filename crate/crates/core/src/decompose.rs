//! Helmholtz decomposition `E = ∇u + E_ℋ + ε⁻¹ rot H` and the
//! Dirichlet–Neumann fields of a mixed boundary partition.
//!
//! `u` vanishes on the tangential part, `H` has vanishing tangential trace on
//! the normal part and is gauged against gradients and against the harmonic
//! fields of the swapped partition. `E_ℋ` is kept as a quadrature field.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::assembly::{load_curl_field, load_gradient_field, AssembledForms, QuadField};
use crate::error::{Error, Result};
use crate::fespace::{DofMaps, IncidenceOperators, Side};
use crate::material::MaterialField;
use crate::mesh::{BoundaryTag, Mesh};
use crate::sparse::{
    cg, dot, normalize_sign, nullspace_dense, smallest_eigenpairs_with, solve_saddle, CsrMatrix, EigenOptions,
    MeanFree, Projection, RangeProjection, SolveReport, DENSE_LIMIT, RANK_TOL,
};

const SOLVE_TOL: f64 = 1e-12;

/// An `M`-orthonormal basis of the discrete harmonic fields on one side.
#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    /// The side whose edges and nodes carry the essential condition.
    pub side: Side,
    pub dim: usize,
    /// Global edge coefficient vectors, zero on constrained edges.
    pub vectors: Vec<Vec<f64>>,
    /// Gram matrix in the metric used for orthonormalization.
    pub gram: DMatrix<f64>,
    /// Smallest eigenvalues seen by the rank decision, for diagnostics.
    pub spectrum: Vec<f64>,
    pub method: String,
}

impl CohomologyBasis {
    /// `⟨M e, D_ℓ⟩` for every basis vector.
    pub fn moments(&self, metric: &CsrMatrix, e: &[f64]) -> Vec<f64> {
        let me = metric.matvec(e);
        self.vectors.iter().map(|d| dot(d, &me)).collect()
    }

    /// `max |Gram − I|`.
    pub fn gram_defect(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j { 1.0 } else { 0.0 };
                m = m.max((self.gram[(i, j)] - target).abs());
            }
        }
        m
    }
}

/// Harmonic fields of `(Γτ, ε)`: curl-free fields in the `Tau`-constrained
/// edge space that are weakly `ε`-divergence free against `Tau`-free nodes.
pub fn cohomology_basis(mesh: &Mesh, eps: &MaterialField, maps: &DofMaps) -> Result<CohomologyBasis> {
    let ops = IncidenceOperators::build(mesh);
    let k = crate::assembly::curlcurl(mesh, None);
    let m = crate::assembly::mass_edge(mesh, eps);
    cohomology_for_side(maps, &ops, &k, &m, Side::Tau)
}

/// Harmonic fields with the essential condition on `side`, using the global
/// unit-weight curl-curl matrix `k` and the global edge mass `m` as metric.
pub fn cohomology_for_side(
    maps: &DofMaps,
    ops: &IncidenceOperators,
    k: &CsrMatrix,
    m: &CsrMatrix,
    side: Side,
) -> Result<CohomologyBasis> {
    let fe = maps.edge(side).free();
    let fnodes = maps.nodal(side).free();
    let ks = k.submatrix(fe, fe);
    let ms = m.submatrix(fe, fe);
    let gs = ops.g.submatrix(fe, fnodes).to_f64();
    if fe.is_empty() {
        return Ok(CohomologyBasis {
            side,
            dim: 0,
            vectors: Vec::new(),
            gram: DMatrix::zeros(0, 0),
            spectrum: Vec::new(),
            method: "empty".into(),
        });
    }
    let (raw, spectrum, method) = if fe.len() <= DENSE_LIMIT {
        let (raw, spectrum) = dense_harmonic(&ks, &ms, &gs)?;
        (raw, spectrum, "cohomology/dense")
    } else {
        let (raw, spectrum) = iterative_harmonic(&ks, &ms, gs)?;
        (raw, spectrum, "cohomology/subspace")
    };
    let restricted = m_gram_schmidt(raw, &ms);
    let gram = DMatrix::from_fn(restricted.len(), restricted.len(), |i, j| ms.inner(&restricted[i], &restricted[j]));
    let emap = maps.edge(side);
    Ok(CohomologyBasis {
        side,
        dim: restricted.len(),
        vectors: restricted.iter().map(|v| emap.extend(v)).collect(),
        gram,
        spectrum,
        method: method.into(),
    })
}

/// Null space of `K/‖K‖ + P/‖P‖` with `P = M G L⁺ Gᵀ M`.
fn dense_harmonic(k: &CsrMatrix, m: &CsrMatrix, g: &CsrMatrix) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = k.nrows();
    let mut a = k.to_dense();
    let kn = a.amax();
    if kn > 0.0 {
        a /= kn;
    }
    if g.ncols() > 0 {
        let mg = m.matmul(g).to_dense();
        let l = g.transpose().to_dense() * &mg;
        let e = SymmetricEigen::new((&l + l.transpose()) * 0.5);
        let lmax = e.eigenvalues.amax();
        let inv = DMatrix::from_diagonal(&e.eigenvalues.map(|v| if v > 1e-12 * lmax { 1.0 / v } else { 0.0 }));
        let q = &mg * &e.eigenvectors;
        let p = &q * inv * q.transpose();
        let pn = p.amax();
        if pn > 0.0 {
            a += p / pn;
        }
    }
    let ns = nullspace_dense(&a, RANK_TOL)?;
    debug_assert_eq!(ns.basis.iter().map(|v| v.len()).max().unwrap_or(n), n);
    let spectrum = ns.spectrum.iter().take(ns.dim + 3).copied().collect();
    Ok((ns.basis, spectrum))
}

/// Smallest Ritz values of `(K, M)` on the complement of gradients; those
/// below `1e−6` of the spectral scale count as zero.
fn iterative_harmonic(k: &CsrMatrix, m: &CsrMatrix, g: CsrMatrix) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let scale = k.diagonal().iter().sum::<f64>() / m.diagonal().iter().sum::<f64>();
    let proj = RangeProjection::new(g, m.clone());
    let mut want = 4;
    loop {
        let opts = EigenOptions { tol: 1e-9, block: Some(want + 4), ..Default::default() };
        let pairs = smallest_eigenpairs_with(k, m, want, Some(&proj), &opts)?;
        let zero = pairs.values.iter().filter(|&&v| v <= 1e-6 * scale).count();
        let tight = pairs.values.iter().filter(|&&v| v <= 1e-7 * scale).count();
        let loose = pairs.values.iter().filter(|&&v| v <= 1e-5 * scale).count();
        if tight != zero || loose != zero {
            return Err(Error::AmbiguousRank { count_tight: tight, count_loose: loose });
        }
        if zero < want || want >= k.nrows() {
            return Ok((pairs.vectors.into_iter().take(zero).collect(), pairs.values));
        }
        want *= 2;
    }
}

/// Two-pass modified Gram–Schmidt in `M`, followed by sign normalization.
fn m_gram_schmidt(vectors: Vec<Vec<f64>>, m: &CsrMatrix) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for _ in 0..2 {
            for q in &out {
                let c = m.inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nrm = m.inner(&v, &v).sqrt();
        if nrm > 0.0 {
            v.iter_mut().for_each(|x| *x /= nrm);
            normalize_sign(&mut v);
            out.push(v);
        }
    }
    out
}

/// Orthogonality and bookkeeping residuals of one decomposition, each
/// relative to `‖E‖²_ε` (or `‖E‖_ε` for field defects).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DecompositionDiagnostics {
    pub grad_vs_harmonic: f64,
    pub grad_vs_rot: f64,
    pub harmonic_vs_rot: f64,
    pub reconstruction: f64,
    /// `max_ℓ |⟨εE_ℋ, D_ℓ⟩ − ⟨εE, D_ℓ⟩|`, relative to `‖E‖_ε`.
    pub moment_defect: f64,
}

impl DecompositionDiagnostics {
    pub fn max_orthogonality(&self) -> f64 {
        self.grad_vs_harmonic.max(self.grad_vs_rot).max(self.harmonic_vs_rot)
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Global nodal coefficients.
    pub u: Vec<f64>,
    /// Global edge coefficients.
    pub h: Vec<f64>,
    pub grad_u: QuadField,
    /// `ε⁻¹ rot H`.
    pub rot_part: QuadField,
    /// `E_ℋ = E − ∇u − ε⁻¹ rot H`.
    pub harmonic: QuadField,
    /// `⟨εE_ℋ, D_ℓ⟩`.
    pub harmonic_moments: Vec<f64>,
    pub diagnostics: DecompositionDiagnostics,
    pub reports: Vec<SolveReport>,
}

impl Decomposition {
    /// `ε`-norms of `(∇u, E_ℋ, ε⁻¹ rot H)`.
    pub fn component_norms(&self, mesh: &Mesh, eps: &MaterialField) -> [f64; 3] {
        [
            self.grad_u.norm(mesh, Some(eps)),
            self.harmonic.norm(mesh, Some(eps)),
            self.rot_part.norm(mesh, Some(eps)),
        ]
    }
}

/// Assembled operators and harmonic bases for repeated decompositions on a
/// fixed `(mesh, ε)`.
pub struct Decomposer<'a> {
    pub mesh: &'a Mesh,
    pub eps: MaterialField,
    pub maps: DofMaps,
    pub ops: IncidenceOperators,
    pub forms: AssembledForms,
    /// Harmonic fields of `(Γτ, ε)`, `ε`-orthonormal.
    pub cohomology: CohomologyBasis,
    /// Harmonic fields of the swapped partition with unit weight.
    pub swapped: CohomologyBasis,
    tau_empty: bool,
    varu_matrix: CsrMatrix,
    vara_matrix: CsrMatrix,
    vara_constraints: CsrMatrix,
}

impl<'a> Decomposer<'a> {
    pub fn new(mesh: &'a Mesh, eps: &MaterialField) -> Result<Self> {
        if eps.num_cells() != mesh.num_tets() {
            return Err(Error::DimensionMismatch(format!(
                "{} material cells for {} tets",
                eps.num_cells(),
                mesh.num_tets()
            )));
        }
        let maps = DofMaps::build(mesh);
        let ops = IncidenceOperators::build(mesh);
        let forms = AssembledForms::new(mesh, eps);
        let cohomology = cohomology_for_side(&maps, &ops, &forms.curlcurl, &forms.mass_edge, Side::Tau)?;
        let swapped = cohomology_for_side(&maps, &ops, &forms.curlcurl, &forms.mass_edge_identity, Side::Nu)?;

        let tn = maps.nodal(Side::Tau).free();
        let varu_matrix = forms.stiffness_node.submatrix(tn, tn);

        let fe = maps.edge(Side::Nu).free();
        let fnodes = maps.nodal(Side::Nu).free();
        let vara_matrix = forms.curlcurl_inv.submatrix(fe, fe);
        let mi = forms.mass_edge_identity.submatrix(fe, fe);
        let gn = ops.g.submatrix(fe, fnodes).to_f64();
        let grad_rows = gn.transpose().matmul(&mi);
        let mut trip: Vec<(usize, usize, f64)> = grad_rows.triplets().collect();
        let emap = maps.edge(Side::Nu);
        for (l, d) in swapped.vectors.iter().enumerate() {
            let row = mi.matvec(&emap.restrict(d));
            trip.extend(row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (fnodes.len() + l, j, *v)));
        }
        let vara_constraints = CsrMatrix::from_triplets(fnodes.len() + swapped.dim, fe.len(), trip);

        Ok(Decomposer {
            mesh,
            eps: eps.clone(),
            tau_empty: mesh.count_tag(BoundaryTag::Tau) == 0,
            maps,
            ops,
            forms,
            cohomology,
            swapped,
            varu_matrix,
            vara_matrix,
            vara_constraints,
        })
    }

    /// `⟨ε∇u, ∇φ⟩ = ⟨εE, ∇φ⟩` for every `Tau`-free nodal `φ`; `u` has zero
    /// mean when `Γτ = ∅`.
    pub fn solve_varu(&self, e: &QuadField) -> Result<(Vec<f64>, SolveReport)> {
        let rhs = self.maps.nodal(Side::Tau).restrict(&load_gradient_field(self.mesh, &e.apply(&self.eps)));
        self.solve_nodal(&rhs)
    }

    /// Solves `L_ε u = rhs` on `Tau`-free nodes and returns global values.
    pub(crate) fn solve_nodal(&self, rhs: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
        let map = self.maps.nodal(Side::Tau);
        if map.num_free() == 0 {
            return Ok((vec![0.0; map.num_total()], SolveReport { converged: true, ..SolveReport::new("varu") }));
        }
        let proj: Option<&dyn Projection> = if self.tau_empty { Some(&MeanFree) } else { None };
        let maxit = 20 * rhs.len() + 200;
        let (x, mut rep) = cg(&self.varu_matrix, rhs, SOLVE_TOL, maxit, proj)?;
        rep.method = "varu/cg".into();
        let mut u = map.extend(&x);
        if self.tau_empty {
            let w = self.forms.mass_node.matvec(&vec![1.0; u.len()]);
            let mean = dot(&w, &u) / self.mesh.total_volume();
            u.iter_mut().for_each(|v| *v -= mean);
        }
        Ok((u, rep))
    }

    /// `⟨ε⁻¹ rot H, rot Φ⟩ = ⟨E, rot Φ⟩` over `Nu`-free edges, with `H`
    /// gauged against `Nu`-free gradients and orthogonal to the swapped
    /// harmonic fields.
    pub fn solve_var_a(&self, e: &QuadField) -> Result<(Vec<f64>, SolveReport)> {
        let map = self.maps.edge(Side::Nu);
        let f = map.restrict(&load_curl_field(self.mesh, e));
        if map.num_free() == 0 {
            return Ok((vec![0.0; map.num_total()], SolveReport { converged: true, ..SolveReport::new("varA") }));
        }
        let g = vec![0.0; self.vara_constraints.nrows()];
        let (x, _, mut rep) = solve_saddle(&self.vara_matrix, &self.vara_constraints, &f, &g, SOLVE_TOL)?;
        rep.method = format!("varA/{}", rep.method);
        Ok((map.extend(&x), rep))
    }

    pub fn helmholtz(&self, e: &QuadField) -> Result<Decomposition> {
        let (u, rep_u) = self.solve_varu(e)?;
        let (h, rep_h) = self.solve_var_a(e)?;
        let grad_u = QuadField::gradient_of_nodal(self.mesh, &u);
        let rot_part = QuadField::curl_of_edge(self.mesh, &h).apply_inverse(&self.eps);
        let harmonic = e.sub(&grad_u).sub(&rot_part);

        let mesh = self.mesh;
        let eps = Some(&self.eps);
        let e_norm2 = e.inner(mesh, e, eps).max(f64::MIN_POSITIVE);
        let rel = |a: &QuadField, b: &QuadField| a.inner(mesh, b, eps).abs() / e_norm2;
        let basis_fields: Vec<QuadField> =
            self.cohomology.vectors.iter().map(|d| QuadField::from_edge(mesh, d)).collect();
        let harmonic_moments: Vec<f64> = basis_fields.iter().map(|d| harmonic.inner(mesh, d, eps)).collect();
        let e_moments: Vec<f64> = basis_fields.iter().map(|d| e.inner(mesh, d, eps)).collect();
        let moment_defect = harmonic_moments
            .iter()
            .zip(&e_moments)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / e_norm2.sqrt();
        let rebuilt = grad_u.add(&harmonic).add(&rot_part);
        let diagnostics = DecompositionDiagnostics {
            grad_vs_harmonic: rel(&grad_u, &harmonic),
            grad_vs_rot: rel(&grad_u, &rot_part),
            harmonic_vs_rot: rel(&harmonic, &rot_part),
            reconstruction: e.sub(&rebuilt).norm(mesh, eps) / e_norm2.sqrt(),
            moment_defect,
        };
        Ok(Decomposition {
            u,
            h,
            grad_u,
            rot_part,
            harmonic,
            harmonic_moments,
            diagnostics,
            reports: vec![rep_u, rep_h],
        })
    }

    /// [`Self::helmholtz`] for an edge-element field.
    pub fn helmholtz_edge(&self, e: &[f64]) -> Result<Decomposition> {
        self.helmholtz(&QuadField::from_edge(self.mesh, e))
    }
}

/// One-shot decomposition of an edge-element field.
pub fn helmholtz(mesh: &Mesh, eps: &MaterialField, e: &[f64]) -> Result<Decomposition> {
    Decomposer::new(mesh, eps)?.helmholtz_edge(e)
}
