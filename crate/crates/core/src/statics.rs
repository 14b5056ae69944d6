//! The static problem `rot E = F`, `div εE = g` with a tangential condition
//! on `Γτ`, a normal condition on `Γν` and prescribed moments against the
//! harmonic fields; plus the Poincaré and Maxwell constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::{
    load_curl_field, load_gradient_field, load_node_field, QuadField, ScalarQuadField, TetGeometry,
};
use crate::decompose::Decomposer;
use crate::error::{Error, Result};
use crate::fespace::{interpolate_edge, DofMaps, Side};
use crate::material::{mul3, MaterialField};
use crate::mesh::{BoundaryTag, Mesh, Point};
use crate::sparse::{
    dot, norm2, smallest_eigenpairs, smallest_eigenpairs_with, solve_saddle, BasisProjection, Composite,
    CsrMatrix, EigenOptions, Projection, RangeProjection, SolveReport,
};

/// Relative threshold for the compatibility conditions.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct StaticProblem {
    /// Target curl.
    pub f: QuadField,
    /// Target `div εE`.
    pub g: ScalarQuadField,
    /// Edge field whose constrained `Tau` coefficients fix the tangential trace.
    pub e_tau: Vec<f64>,
    /// Edge field whose normal flux `ν·εE_ν` fixes the normal trace on `Γν`.
    pub e_nu: Vec<f64>,
    /// Moments `⟨εE, D_ℓ⟩`.
    pub alpha: Vec<f64>,
    pub eps: MaterialField,
}

impl StaticProblem {
    /// All data zero.
    pub fn homogeneous(mesh: &Mesh, eps: &MaterialField, dim: usize) -> Self {
        StaticProblem {
            f: QuadField::zeros(mesh.num_tets()),
            g: ScalarQuadField::zeros(mesh.num_tets()),
            e_tau: vec![0.0; mesh.num_edges()],
            e_nu: vec![0.0; mesh.num_edges()],
            alpha: vec![0.0; dim],
            eps: eps.clone(),
        }
    }

    fn check_sizes(&self, mesh: &Mesh, dim: usize) -> Result<()> {
        let ok = self.f.num_tets() == mesh.num_tets()
            && self.g.values.len() == mesh.num_tets()
            && self.e_tau.len() == mesh.num_edges()
            && self.e_nu.len() == mesh.num_edges()
            && self.alpha.len() == dim
            && self.eps.num_cells() == mesh.num_tets();
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "static problem data does not match a mesh with {} tets, {} edges and {} harmonic fields",
                mesh.num_tets(),
                mesh.num_edges(),
                dim
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatibilityReport {
    /// `‖rot E_r − F̃‖ / ‖F̃‖` for the least-squares curl fit `E_r`.
    pub curl_residual: f64,
    /// `⟨F̃, H̃_ℓ⟩ / ‖F̃‖` against the swapped harmonic fields.
    pub swapped_moments: Vec<f64>,
    /// Constants obstruction of the divergence data; zero unless `Γτ = ∅`.
    pub constant_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StaticResiduals {
    /// `‖rot E − F‖ / (1 + ‖F‖)`.
    pub curl: f64,
    /// Weak `ε`-divergence against interior nodes.
    pub divergence: f64,
    /// Weak `ε`-divergence with the `Γν` flux, against `Tau`-free nodes.
    pub normal: f64,
    /// `max |E − E_τ|` over constrained `Tau` edges.
    pub tangential: f64,
    /// `max_ℓ |⟨εE, D_ℓ⟩ − α_ℓ|`.
    pub moments: f64,
}

impl StaticResiduals {
    pub fn max(&self) -> f64 {
        self.curl.max(self.divergence).max(self.normal).max(self.tangential).max(self.moments)
    }
}

#[derive(Clone, Debug)]
pub struct StaticSolution {
    /// Global edge coefficients.
    pub e: Vec<f64>,
    pub field: QuadField,
    pub residuals: StaticResiduals,
    pub compatibility: CompatibilityReport,
    /// `‖E‖_ε`.
    pub energy_norm: f64,
    /// `(‖F‖² + ‖g‖²)^{1/2}`.
    pub data_norm: f64,
    pub reports: Vec<SolveReport>,
}

/// Operators for repeated static solves on a fixed `(mesh, ε)`.
pub struct StaticSolver<'a> {
    pub dec: Decomposer<'a>,
    rot_matrix: CsrMatrix,
    rot_constraints: CsrMatrix,
    tau_empty: bool,
}

impl<'a> StaticSolver<'a> {
    pub fn new(mesh: &'a Mesh, eps: &MaterialField) -> Result<Self> {
        let dec = Decomposer::new(mesh, eps)?;
        let fe = dec.maps.edge(Side::Tau).free();
        let fnodes = dec.maps.nodal(Side::Tau).free();
        let rot_matrix = dec.forms.curlcurl.submatrix(fe, fe);
        let me = dec.forms.mass_edge.submatrix(fe, fe);
        let gt = dec.ops.g.submatrix(fe, fnodes).to_f64();
        let mut trip: Vec<(usize, usize, f64)> = gt.transpose().matmul(&me).triplets().collect();
        let emap = dec.maps.edge(Side::Tau);
        for (l, d) in dec.cohomology.vectors.iter().enumerate() {
            let row = me.matvec(&emap.restrict(d));
            trip.extend(row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (fnodes.len() + l, j, *v)));
        }
        let rot_constraints = CsrMatrix::from_triplets(fnodes.len() + dec.cohomology.dim, fe.len(), trip);
        Ok(StaticSolver { tau_empty: mesh.count_tag(BoundaryTag::Tau) == 0, dec, rot_matrix, rot_constraints })
    }

    pub fn mesh(&self) -> &'a Mesh {
        self.dec.mesh
    }

    pub fn cohomology_dim(&self) -> usize {
        self.dec.cohomology.dim
    }

    /// Data generated by a known field: `F` is the curl of its interpolant,
    /// `g` samples `div_eps` (the exact `div εE*`), both boundary fields are
    /// the interpolant and `α` its moments.
    pub fn manufactured(&self, field: impl Fn(Point) -> [f64; 3], div_eps: impl Fn(Point) -> f64) -> StaticProblem {
        let mesh = self.mesh();
        let e = interpolate_edge(mesh, field);
        StaticProblem {
            f: QuadField::curl_of_edge(mesh, &e),
            g: ScalarQuadField::from_fn(mesh, div_eps),
            alpha: self.dec.cohomology.moments(&self.dec.forms.mass_edge, &e),
            e_tau: e.clone(),
            e_nu: e,
            eps: self.dec.eps.clone(),
        }
    }

    /// The constrained `Tau` part of `E_τ`.
    fn boundary_lift(&self, p: &StaticProblem) -> Vec<f64> {
        self.dec.maps.edge(Side::Tau).zero_free(&p.e_tau)
    }

    /// Least-squares curl fit on `Tau`-free edges, gauged and orthogonal to
    /// the harmonic fields. Returns the global fit, `F̃` and the relative
    /// fit residual.
    fn curl_fit(&self, p: &StaticProblem, lift: &[f64]) -> Result<(Vec<f64>, QuadField, f64, SolveReport)> {
        let mesh = self.mesh();
        let ftilde = p.f.sub(&QuadField::curl_of_edge(mesh, lift));
        let map = self.dec.maps.edge(Side::Tau);
        let fnorm = ftilde.norm(mesh, None);
        if fnorm == 0.0 || map.num_free() == 0 {
            let rep = SolveReport { converged: true, ..SolveReport::new("curl-fit") };
            let res = if fnorm == 0.0 { 0.0 } else { 1.0 };
            return Ok((vec![0.0; mesh.num_edges()], ftilde, res, rep));
        }
        let rhs = map.restrict(&load_curl_field(mesh, &ftilde));
        let zeros = vec![0.0; self.rot_constraints.nrows()];
        let (x, _, mut rep) = solve_saddle(&self.rot_matrix, &self.rot_constraints, &rhs, &zeros, 1e-13)?;
        rep.method = format!("curl-fit/{}", rep.method);
        let er = map.extend(&x);
        let misfit = QuadField::curl_of_edge(mesh, &er).sub(&ftilde).norm(mesh, None);
        Ok((er, ftilde, misfit / fnorm, rep))
    }

    /// `∫_Γν φ_i ν·εE_ν` for every vertex.
    pub fn normal_flux_load(&self, e_nu: &[f64]) -> Vec<f64> {
        normal_flux_load(self.mesh(), &self.dec.eps, e_nu)
    }

    /// `−⟨g, φ_i⟩ + ∫_Γν φ_i ν·εE_ν` for every vertex.
    fn divergence_load(&self, p: &StaticProblem) -> Vec<f64> {
        let mut load = load_node_field(self.mesh(), &p.g);
        let flux = self.normal_flux_load(&p.e_nu);
        for (l, b) in load.iter_mut().zip(flux) {
            *l = b - *l;
        }
        load
    }

    pub fn check_compatibility(&self, p: &StaticProblem) -> Result<CompatibilityReport> {
        p.check_sizes(self.mesh(), self.cohomology_dim())?;
        let lift = self.boundary_lift(p);
        let (_, ftilde, curl_residual, _) = self.curl_fit(p, &lift)?;
        Ok(self.compatibility_from(p, &ftilde, curl_residual))
    }

    fn compatibility_from(&self, p: &StaticProblem, ftilde: &QuadField, curl_residual: f64) -> CompatibilityReport {
        let mesh = self.mesh();
        let fnorm = ftilde.norm(mesh, None);
        let swapped_moments = self
            .dec
            .swapped
            .vectors
            .iter()
            .map(|h| {
                let hf = QuadField::from_edge(mesh, h);
                if fnorm > 0.0 {
                    ftilde.inner(mesh, &hf, None) / fnorm
                } else {
                    0.0
                }
            })
            .collect();
        let constant_residual = if self.tau_empty {
            let total_g = p.g.integral(mesh);
            let total_flux: f64 = self.normal_flux_load(&p.e_nu).iter().sum();
            let scale = (p.g.norm(mesh) * mesh.total_volume().sqrt()).max(total_flux.abs());
            if scale > 0.0 {
                (total_g - total_flux).abs() / scale
            } else {
                0.0
            }
        } else {
            0.0
        };
        let passed = curl_residual <= COMPATIBILITY_TOL && constant_residual <= COMPATIBILITY_TOL;
        CompatibilityReport { curl_residual, swapped_moments, constant_residual, passed }
    }

    pub fn solve(&self, p: &StaticProblem, tol: f64) -> Result<StaticSolution> {
        p.check_sizes(self.mesh(), self.cohomology_dim())?;
        let mesh = self.mesh();
        let eps = &self.dec.eps;
        let lift = self.boundary_lift(p);
        let (er, ftilde, curl_residual, rep_r) = self.curl_fit(p, &lift)?;
        let compatibility = self.compatibility_from(p, &ftilde, curl_residual);
        if !compatibility.passed {
            return Err(Error::IncompatibleData(format!(
                "curl residual {:e}, constants residual {:e}",
                compatibility.curl_residual, compatibility.constant_residual
            )));
        }

        let mut e0: Vec<f64> = lift.iter().zip(&er).map(|(a, b)| a + b).collect();
        let div_load = self.divergence_load(p);
        let current = load_gradient_field(mesh, &QuadField::from_edge(mesh, &e0).apply(eps));
        let rhs_global: Vec<f64> = div_load.iter().zip(&current).map(|(a, b)| a - b).collect();
        let (u, rep_u) = self.dec.solve_nodal(&self.dec.maps.nodal(Side::Tau).restrict(&rhs_global))?;
        let gu = self.dec.ops.g.to_f64().matvec(&u);
        e0.iter_mut().zip(&gu).for_each(|(a, b)| *a += b);

        let m = &self.dec.forms.mass_edge;
        let have = self.dec.cohomology.moments(m, &e0);
        let mut e = e0;
        for ((d, a), h) in self.dec.cohomology.vectors.iter().zip(&p.alpha).zip(&have) {
            let beta = a - h;
            e.iter_mut().zip(d).for_each(|(x, di)| *x += beta * di);
        }

        let residuals = self.residuals(p, &e, &div_load);
        let field = QuadField::from_edge(mesh, &e);
        let mut rep_u = rep_u;
        rep_u.method = "potential/cg".into();
        let converged = residuals.max() <= tol;
        let mut summary = SolveReport::new("static");
        summary.residual = residuals.max();
        summary.converged = converged;
        summary.iterations = rep_r.iterations + rep_u.iterations;
        Ok(StaticSolution {
            energy_norm: m.inner(&e, &e).max(0.0).sqrt(),
            data_norm: (p.f.norm(mesh, None).powi(2) + p.g.norm(mesh).powi(2)).sqrt(),
            e,
            field,
            residuals,
            compatibility,
            reports: vec![summary, rep_r, rep_u],
        })
    }

    fn residuals(&self, p: &StaticProblem, e: &[f64], div_load: &[f64]) -> StaticResiduals {
        let mesh = self.mesh();
        let eps = &self.dec.eps;
        let maps = &self.dec.maps;
        let curl = QuadField::curl_of_edge(mesh, e).sub(&p.f).norm(mesh, None) / (1.0 + p.f.norm(mesh, None));

        let pairing = load_gradient_field(mesh, &QuadField::from_edge(mesh, e).apply(eps));
        let g_load = load_node_field(mesh, &p.g);
        // Scaled by the full pairing and data vectors so that small test sets
        // do not turn round-off into O(1) ratios.
        let scale = norm2(&pairing) + norm2(div_load) + norm2(&g_load);
        let rel = |nodes: &[usize], with_flux: bool| {
            let r: Vec<f64> = nodes
                .iter()
                .map(|&i| if with_flux { pairing[i] - div_load[i] } else { pairing[i] + g_load[i] })
                .collect();
            if scale > 0.0 {
                norm2(&r) / scale
            } else {
                0.0
            }
        };
        let interior: Vec<usize> =
            maps.nodal(Side::Tau).free().iter().copied().filter(|&i| maps.nodal(Side::Nu).is_free(i)).collect();
        let divergence = rel(&interior, false);
        let normal = rel(maps.nodal(Side::Tau).free(), true);

        let tangential = maps
            .edge(Side::Tau)
            .constrained()
            .iter()
            .map(|&i| (e[i] - p.e_tau[i]).abs())
            .fold(0.0, f64::max);
        let moments = self
            .dec
            .cohomology
            .moments(&self.dec.forms.mass_edge, e)
            .iter()
            .zip(&p.alpha)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        StaticResiduals { curl, divergence, normal, tangential, moments }
    }
}

/// `∫_Γν φ_i ν·εE` for every vertex, by the edge-midpoint rule on each
/// `Nu` triangle (exact for the linear-times-linear integrand).
pub fn normal_flux_load(mesh: &Mesh, eps: &MaterialField, e: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; mesh.num_vertices()];
    for (bi, tri) in mesh.boundary().iter().enumerate() {
        if tri.tag != BoundaryTag::Nu {
            continue;
        }
        let info = mesh.boundary_info(bi);
        let face = mesh.face_index(tri.vertices).expect("boundary triangle is a face");
        let t = mesh.face_tets(face)[0];
        let geom = TetGeometry::new(mesh, t);
        let verts = mesh.tets()[t];
        let te = mesh.tet_edges()[t];
        let local = tri.vertices.map(|v| verts.iter().position(|&w| w == v).expect("face vertex in owner"));
        let [p0, p1, p2] = info.corners;
        let area = 0.5 * {
            let a = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
            let b = [p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]];
            let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
            (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
        };
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let mut bary = [0.0; 4];
            bary[local[a]] = 0.5;
            bary[local[b]] = 0.5;
            let mut v = [0.0; 3];
            for k in 0..6 {
                let w = geom.whitney(k, &bary);
                for d in 0..3 {
                    v[d] += e[te[k]] * w[d];
                }
            }
            let flux = dot(&info.normal, &mul3(eps.cell(t), &v));
            out[tri.vertices[a]] += area / 3.0 * 0.5 * flux;
            out[tri.vertices[b]] += area / 3.0 * 0.5 * flux;
        }
    }
    out
}

pub fn check_compatibility(mesh: &Mesh, problem: &StaticProblem) -> Result<CompatibilityReport> {
    StaticSolver::new(mesh, &problem.eps)?.check_compatibility(problem)
}

pub fn solve_static(mesh: &Mesh, problem: &StaticProblem, tol: f64) -> Result<StaticSolution> {
    StaticSolver::new(mesh, &problem.eps)?.solve(problem, tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsReport {
    /// `λ₁^{-1/2}` of the nodal Laplacian on `Tau`-free nodes (lumped mass).
    pub c_p: f64,
    pub lambda_nodal: f64,
    /// Same eigenvalue with the consistent mass, for comparison.
    pub lambda_nodal_consistent: f64,
    /// `max(c_p c₀^{-1/2}, λ₁^{-1/2})` with `λ₁` from the deflated curl-curl pencil.
    pub c_m: f64,
    pub lambda_curl: f64,
    /// Lower eigenvalue bound of `ε`.
    pub c0: f64,
    /// Eigen residuals relative to the eigenvalue.
    pub residual_nodal: f64,
    pub residual_curl: f64,
    pub free_nodes: usize,
    pub free_edges: usize,
}

/// Smallest eigenvalue of `(L_I, M_L)` on `Tau`-free nodes, with `M_L` the
/// row-sum lumped nodal mass and constants removed when `Gamma_tau` is empty.
/// `M_L - M` is positive semidefinite, so the returned `c_p` also bounds the
/// consistent L² norm. Returns `(c_p, λ₁, relative residual)`.
pub fn poincare_constant(mesh: &Mesh, maps: &DofMaps) -> Result<(f64, f64, f64)> {
    let (l, m) = nodal_pencil(mesh, maps)?;
    let lumped = m.matvec(&vec![1.0; m.nrows()]);
    let ml = CsrMatrix::from_triplets(lumped.len(), lumped.len(), lumped.iter().enumerate().map(|(i, v)| (i, i, *v)));
    let (lam, res) = nodal_eigenvalue(mesh, &l, &ml)?;
    Ok((lam.powf(-0.5), lam, res))
}

/// Same pencil with the consistent nodal mass. Returns `(λ₁, relative residual)`.
pub fn nodal_eigenvalue_consistent(mesh: &Mesh, maps: &DofMaps) -> Result<(f64, f64)> {
    let (l, m) = nodal_pencil(mesh, maps)?;
    nodal_eigenvalue(mesh, &l, &m)
}

fn nodal_pencil(mesh: &Mesh, maps: &DofMaps) -> Result<(CsrMatrix, CsrMatrix)> {
    let free = maps.nodal(Side::Tau).free();
    if free.is_empty() {
        return Err(Error::InvalidResolution("no free nodal unknowns for the Poincaré eigenproblem".into()));
    }
    let id = MaterialField::identity(mesh);
    let l = crate::assembly::stiffness_node(mesh, &id).submatrix(free, free);
    let m = crate::assembly::mass_node(mesh).submatrix(free, free);
    Ok((l, m))
}

fn nodal_eigenvalue(mesh: &Mesh, l: &CsrMatrix, m: &CsrMatrix) -> Result<(f64, f64)> {
    let pairs = if mesh.count_tag(BoundaryTag::Tau) == 0 {
        let c = 1.0 / mesh.total_volume().sqrt();
        let defl = BasisProjection::new(vec![vec![c; l.nrows()]], Some(m.clone()));
        smallest_eigenpairs(l, m, 1, Some(&defl))?
    } else {
        smallest_eigenpairs(l, m, 1, None)?
    };
    let lam = pairs.values[0];
    Ok((lam, pairs.residuals[0] / lam))
}

/// Smallest eigenvalue of `(K, M_ε)` on `Tau`-free edges with gradients
/// and harmonic fields removed. Returns `(λ₁, relative residual, eigenvector)`.
pub fn curl_eigenvalue(dec: &Decomposer) -> Result<(f64, f64, Vec<f64>)> {
    let fe = dec.maps.edge(Side::Tau).free();
    let fnodes = dec.maps.nodal(Side::Tau).free();
    let k = dec.forms.curlcurl.submatrix(fe, fe);
    let m = dec.forms.mass_edge.submatrix(fe, fe);
    let g = dec.ops.g.submatrix(fe, fnodes).to_f64();
    let range = RangeProjection::new(g, m.clone());
    let emap = dec.maps.edge(Side::Tau);
    let harm = BasisProjection::new(dec.cohomology.vectors.iter().map(|d| emap.restrict(d)).collect(), Some(m.clone()));
    let defl = Composite(vec![&range as &dyn Projection, &harm]);
    let opts = EigenOptions { tol: 1e-10, ..Default::default() };
    let pairs = smallest_eigenpairs_with(&k, &m, 1, Some(&defl), &opts)?;
    let lam = pairs.values[0];
    Ok((lam, pairs.residuals[0] / lam, emap.extend(&pairs.vectors[0])))
}

pub fn maxwell_constant(dec: &Decomposer) -> Result<ConstantsReport> {
    let (c_p, lambda_nodal, residual_nodal) = poincare_constant(dec.mesh, &dec.maps)?;
    let (lambda_nodal_consistent, _) = nodal_eigenvalue_consistent(dec.mesh, &dec.maps)?;
    let (lambda_curl, residual_curl, _) = curl_eigenvalue(dec)?;
    let c0 = dec.eps.lower_bound();
    Ok(ConstantsReport {
        c_p,
        lambda_nodal,
        lambda_nodal_consistent,
        c_m: (c_p / c0.sqrt()).max(lambda_curl.powf(-0.5)),
        lambda_curl,
        c0,
        residual_nodal,
        residual_curl,
        free_nodes: dec.maps.nodal(Side::Tau).num_free(),
        free_edges: dec.maps.edge(Side::Tau).num_free(),
    })
}

/// Both constants for one `(mesh, ε)`.
pub fn constants(mesh: &Mesh, eps: &MaterialField) -> Result<ConstantsReport> {
    maxwell_constant(&Decomposer::new(mesh, eps)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub seed: u64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// `(c_m² + 1)^{1/2}`.
    pub bound: f64,
    pub c_m: f64,
}

/// Solves `trials` random compatible problems with homogeneous boundary data
/// and zero moments and compares `‖E‖_ε / ‖(F, g)‖` with `(c_m² + 1)^{1/2}`.
pub fn verify_m0_bound(solver: &StaticSolver, constants: &ConstantsReport, trials: usize, seed: u64) -> Result<BoundReport> {
    let mesh = solver.mesh();
    let eps = &solver.dec.eps;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = (constants.c_m.powi(2) + 1.0).sqrt();
    let emap = solver.dec.maps.edge(Side::Tau);
    let tau_empty = mesh.count_tag(BoundaryTag::Tau) == 0;
    let mut ratios = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mut p = StaticProblem::homogeneous(mesh, eps, solver.cohomology_dim());
        let x: Vec<f64> = (0..emap.num_free()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        p.f = QuadField::curl_of_edge(mesh, &emap.extend(&x));
        let mut g: Vec<f64> = (0..mesh.num_tets()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if tau_empty {
            let mean = (0..mesh.num_tets()).map(|t| g[t] * mesh.tet_volume(t)).sum::<f64>() / mesh.total_volume();
            g.iter_mut().for_each(|v| *v -= mean);
        }
        p.g = ScalarQuadField::from_cell_constants(&g);
        let sol = solver.solve(&p, 1e-8)?;
        ratios.push(if sol.data_norm > 0.0 { sol.energy_norm / sol.data_norm } else { 0.0 });
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    if max_ratio > bound * (1.0 + 1e-6) {
        return Err(Error::BoundViolated { ratio: max_ratio, bound });
    }
    Ok(BoundReport { seed, ratios, max_ratio, bound, c_m: constants.c_m })
}
