//! Bilinear forms and loads for the lowest-order nodal and edge elements,
//! plus per-cell quadrature-point field containers.
//!
//! Edge basis functions are the Whitney forms
//! `w_e = λ_a ∇λ_b − λ_b ∇λ_a` for the edge `(a, b)` with `a < b` in global
//! numbering; their curls `2 ∇λ_a × ∇λ_b` are constant per tetrahedron.

use crate::material::{mul3, MaterialField};
use crate::mesh::{Mesh, Point, LOCAL_EDGES};
use crate::sparse::CsrMatrix;

const QA: f64 = 0.585_410_196_624_968_5;
const QB: f64 = 0.138_196_601_125_010_5;

/// Barycentric coordinates of the symmetric four-point rule (degree 2).
pub const QUAD_BARY: [[f64; 4]; 4] = [[QA, QB, QB, QB], [QB, QA, QB, QB], [QB, QB, QA, QB], [QB, QB, QB, QA]];

type Vec3 = [f64; 3];

/// Volume and barycentric gradients of one tetrahedron.
#[derive(Clone, Copy, Debug)]
pub struct TetGeometry {
    pub volume: f64,
    pub grads: [Vec3; 4],
    pub corners: [Point; 4],
    /// Local endpoints of each local edge, ordered low to high by global index.
    pub edge_ends: [[usize; 2]; 6],
}

impl TetGeometry {
    pub fn new(mesh: &Mesh, t: usize) -> Self {
        let c = mesh.tet_corners(t);
        let e = |k: usize| [c[k][0] - c[0][0], c[k][1] - c[0][1], c[k][2] - c[0][2]];
        let (a, b, d) = (e(1), e(2), e(3));
        let det = a[0] * (b[1] * d[2] - b[2] * d[1]) - a[1] * (b[0] * d[2] - b[2] * d[0])
            + a[2] * (b[0] * d[1] - b[1] * d[0]);
        // Rows of the inverse Jacobian are the gradients of λ1..λ3.
        let g1 = scale(cross(&b, &d), 1.0 / det);
        let g2 = scale(cross(&d, &a), 1.0 / det);
        let g3 = scale(cross(&a, &b), 1.0 / det);
        let g0 = [-(g1[0] + g2[0] + g3[0]), -(g1[1] + g2[1] + g3[1]), -(g1[2] + g2[2] + g3[2])];
        let verts = mesh.tets()[t];
        let mut edge_ends = [[0; 2]; 6];
        for (k, &[i, j]) in LOCAL_EDGES.iter().enumerate() {
            edge_ends[k] = if verts[i] < verts[j] { [i, j] } else { [j, i] };
        }
        TetGeometry { volume: det / 6.0, grads: [g0, g1, g2, g3], corners: c, edge_ends }
    }

    /// Value of local edge function `k` at barycentric point `l`.
    pub fn whitney(&self, k: usize, l: &[f64; 4]) -> Vec3 {
        let [i, j] = self.edge_ends[k];
        let (gi, gj) = (self.grads[i], self.grads[j]);
        [l[i] * gj[0] - l[j] * gi[0], l[i] * gj[1] - l[j] * gi[1], l[i] * gj[2] - l[j] * gi[2]]
    }

    /// Constant curl of local edge function `k`.
    pub fn whitney_curl(&self, k: usize) -> Vec3 {
        let [i, j] = self.edge_ends[k];
        scale(cross(&self.grads[i], &self.grads[j]), 2.0)
    }

    pub fn point(&self, l: &[f64; 4]) -> Point {
        let mut p = [0.0; 3];
        for (k, c) in self.corners.iter().enumerate() {
            for d in 0..3 {
                p[d] += l[k] * c[d];
            }
        }
        p
    }
}

/// Geometry of every tetrahedron.
pub fn geometries(mesh: &Mesh) -> Vec<TetGeometry> {
    (0..mesh.num_tets()).map(|t| TetGeometry::new(mesh, t)).collect()
}

/// `∫ W w_i · w_j` over edge functions; exact for piecewise constant `W`.
pub fn mass_edge(mesh: &Mesh, eps: &MaterialField) -> CsrMatrix {
    let mut trip = Vec::with_capacity(36 * mesh.num_tets());
    for t in 0..mesh.num_tets() {
        let g = TetGeometry::new(mesh, t);
        let te = mesh.tet_edges()[t];
        let w = g.volume / 4.0;
        let m = eps.cell(t);
        let mut local = [[0.0; 6]; 6];
        for q in &QUAD_BARY {
            let vals: Vec<Vec3> = (0..6).map(|k| g.whitney(k, q)).collect();
            let wvals: Vec<Vec3> = vals.iter().map(|v| mul3(m, v)).collect();
            for i in 0..6 {
                for j in 0..6 {
                    local[i][j] += w * dot(&wvals[i], &vals[j]);
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                trip.push((te[i], te[j], local[i][j]));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_edges(), mesh.num_edges(), trip)
}

/// `∫ W curl w_i · curl w_j`; `W = I` when `weight` is `None`. Pass
/// [`MaterialField::inverted`] for the `ε⁻¹`-weighted form.
pub fn curlcurl(mesh: &Mesh, weight: Option<&MaterialField>) -> CsrMatrix {
    let mut trip = Vec::with_capacity(36 * mesh.num_tets());
    for t in 0..mesh.num_tets() {
        let g = TetGeometry::new(mesh, t);
        let te = mesh.tet_edges()[t];
        let curls: Vec<Vec3> = (0..6).map(|k| g.whitney_curl(k)).collect();
        for i in 0..6 {
            let wi = match weight {
                Some(w) => mul3(w.cell(t), &curls[i]),
                None => curls[i],
            };
            for j in 0..6 {
                trip.push((te[i], te[j], g.volume * dot(&wi, &curls[j])));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_edges(), mesh.num_edges(), trip)
}

/// `∫ φ_i φ_j` for hat functions: `V/20·(1 + δ_ij)` per tet.
pub fn mass_node(mesh: &Mesh) -> CsrMatrix {
    let mut trip = Vec::with_capacity(16 * mesh.num_tets());
    for (t, verts) in mesh.tets().iter().enumerate() {
        let v = mesh.tet_volume(t);
        for i in 0..4 {
            for j in 0..4 {
                let val = if i == j { v / 10.0 } else { v / 20.0 };
                trip.push((verts[i], verts[j], val));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_vertices(), mesh.num_vertices(), trip)
}

/// `∫ ε ∇φ_i · ∇φ_j` assembled directly.
pub fn stiffness_node(mesh: &Mesh, eps: &MaterialField) -> CsrMatrix {
    let mut trip = Vec::with_capacity(16 * mesh.num_tets());
    for (t, verts) in mesh.tets().iter().enumerate() {
        let g = TetGeometry::new(mesh, t);
        for i in 0..4 {
            let egi = mul3(eps.cell(t), &g.grads[i]);
            for j in 0..4 {
                trip.push((verts[i], verts[j], g.volume * dot(&egi, &g.grads[j])));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_vertices(), mesh.num_vertices(), trip)
}

/// `⟨f, w_i⟩` by the four-point rule.
pub fn load_edge(mesh: &Mesh, f: impl Fn(Point) -> Vec3) -> Vec<f64> {
    load_edge_field(mesh, &QuadField::from_fn(mesh, f))
}

/// `⟨g, φ_i⟩` by the four-point rule.
pub fn load_node(mesh: &Mesh, g: impl Fn(Point) -> f64) -> Vec<f64> {
    load_node_field(mesh, &ScalarQuadField::from_fn(mesh, g))
}

/// `⟨F, w_i⟩` for a quadrature field.
pub fn load_edge_field(mesh: &Mesh, field: &QuadField) -> Vec<f64> {
    let mut out = vec![0.0; mesh.num_edges()];
    for t in 0..mesh.num_tets() {
        let g = TetGeometry::new(mesh, t);
        let te = mesh.tet_edges()[t];
        for (q, l) in QUAD_BARY.iter().enumerate() {
            let f = field.values[t][q];
            for k in 0..6 {
                out[te[k]] += g.volume / 4.0 * dot(&f, &g.whitney(k, l));
            }
        }
    }
    out
}

/// `⟨F, curl w_i⟩` for a quadrature field.
pub fn load_curl_field(mesh: &Mesh, field: &QuadField) -> Vec<f64> {
    let mut out = vec![0.0; mesh.num_edges()];
    for t in 0..mesh.num_tets() {
        let g = TetGeometry::new(mesh, t);
        let te = mesh.tet_edges()[t];
        let mean = field.cell_mean(t);
        for k in 0..6 {
            out[te[k]] += g.volume * dot(&mean, &g.whitney_curl(k));
        }
    }
    out
}

/// `⟨F, ∇φ_i⟩` for a quadrature field.
pub fn load_gradient_field(mesh: &Mesh, field: &QuadField) -> Vec<f64> {
    let mut out = vec![0.0; mesh.num_vertices()];
    for (t, verts) in mesh.tets().iter().enumerate() {
        let g = TetGeometry::new(mesh, t);
        let mean = field.cell_mean(t);
        for i in 0..4 {
            out[verts[i]] += g.volume * dot(&mean, &g.grads[i]);
        }
    }
    out
}

/// `⟨g, φ_i⟩` for a scalar quadrature field.
pub fn load_node_field(mesh: &Mesh, field: &ScalarQuadField) -> Vec<f64> {
    let mut out = vec![0.0; mesh.num_vertices()];
    for (t, verts) in mesh.tets().iter().enumerate() {
        let v = mesh.tet_volume(t);
        for (q, l) in QUAD_BARY.iter().enumerate() {
            for i in 0..4 {
                out[verts[i]] += v / 4.0 * field.values[t][q] * l[i];
            }
        }
    }
    out
}

/// The forms needed by the decomposition and static solvers for one
/// `(mesh, ε)` pair, on all (unconstrained) unknowns.
#[derive(Clone, Debug)]
pub struct AssembledForms {
    /// `M_ε`.
    pub mass_edge: CsrMatrix,
    /// `M_I`.
    pub mass_edge_identity: CsrMatrix,
    /// `K` with unit weight.
    pub curlcurl: CsrMatrix,
    /// `K` weighted by `ε⁻¹`.
    pub curlcurl_inv: CsrMatrix,
    pub mass_node: CsrMatrix,
    /// `∫ ε ∇φ_i · ∇φ_j`.
    pub stiffness_node: CsrMatrix,
}

impl AssembledForms {
    pub fn new(mesh: &Mesh, eps: &MaterialField) -> Self {
        AssembledForms {
            mass_edge: mass_edge(mesh, eps),
            mass_edge_identity: mass_edge(mesh, &MaterialField::identity(mesh)),
            curlcurl: curlcurl(mesh, None),
            curlcurl_inv: curlcurl(mesh, Some(&eps.inverted())),
            mass_node: mass_node(mesh),
            stiffness_node: stiffness_node(mesh, eps),
        }
    }
}

/// A vector field sampled at the four quadrature points of every tet.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadField {
    pub values: Vec<[Vec3; 4]>,
}

/// A scalar field sampled at the four quadrature points of every tet.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarQuadField {
    pub values: Vec<[f64; 4]>,
}

impl QuadField {
    pub fn zeros(num_tets: usize) -> Self {
        QuadField { values: vec![[[0.0; 3]; 4]; num_tets] }
    }

    pub fn from_fn(mesh: &Mesh, f: impl Fn(Point) -> Vec3) -> Self {
        let values = (0..mesh.num_tets())
            .map(|t| {
                let g = TetGeometry::new(mesh, t);
                QUAD_BARY.map(|l| f(g.point(&l)))
            })
            .collect();
        QuadField { values }
    }

    /// Field of the edge-element function with the given global coefficients.
    pub fn from_edge(mesh: &Mesh, coeffs: &[f64]) -> Self {
        let values = (0..mesh.num_tets())
            .map(|t| {
                let g = TetGeometry::new(mesh, t);
                let te = mesh.tet_edges()[t];
                QUAD_BARY.map(|l| {
                    let mut v = [0.0; 3];
                    for k in 0..6 {
                        let w = g.whitney(k, &l);
                        for d in 0..3 {
                            v[d] += coeffs[te[k]] * w[d];
                        }
                    }
                    v
                })
            })
            .collect();
        QuadField { values }
    }

    /// Curl of the edge-element function, constant per tet.
    pub fn curl_of_edge(mesh: &Mesh, coeffs: &[f64]) -> Self {
        Self::from_cell_constants(&cell_curls(mesh, coeffs))
    }

    /// Gradient of the nodal function with the given vertex values.
    pub fn gradient_of_nodal(mesh: &Mesh, nodal: &[f64]) -> Self {
        let c: Vec<Vec3> = mesh
            .tets()
            .iter()
            .enumerate()
            .map(|(t, verts)| {
                let g = TetGeometry::new(mesh, t);
                let mut v = [0.0; 3];
                for i in 0..4 {
                    for d in 0..3 {
                        v[d] += nodal[verts[i]] * g.grads[i][d];
                    }
                }
                v
            })
            .collect();
        Self::from_cell_constants(&c)
    }

    pub fn from_cell_constants(c: &[Vec3]) -> Self {
        QuadField { values: c.iter().map(|v| [*v; 4]).collect() }
    }

    pub fn num_tets(&self) -> usize {
        self.values.len()
    }

    pub fn cell_mean(&self, t: usize) -> Vec3 {
        let v = &self.values[t];
        let mut m = [0.0; 3];
        for q in v {
            for d in 0..3 {
                m[d] += 0.25 * q[d];
            }
        }
        m
    }

    /// `ε·F` per cell.
    pub fn apply(&self, eps: &MaterialField) -> Self {
        QuadField {
            values: self.values.iter().enumerate().map(|(t, v)| v.map(|x| eps.apply(t, &x))).collect(),
        }
    }

    /// `ε⁻¹·F` per cell.
    pub fn apply_inverse(&self, eps: &MaterialField) -> Self {
        QuadField {
            values: self.values.iter().enumerate().map(|(t, v)| v.map(|x| eps.apply_inverse(t, &x))).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        QuadField { values: self.values.iter().map(|v| v.map(|x| [s * x[0], s * x[1], s * x[2]])).collect() }
    }

    /// `self + s·other`.
    pub fn combine(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.values.len(), other.values.len());
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| {
                let mut out = *a;
                for q in 0..4 {
                    for d in 0..3 {
                        out[q][d] += s * b[q][d];
                    }
                }
                out
            })
            .collect();
        QuadField { values }
    }

    /// `∫ (W a)·b` by the four-point rule; `W = I` when `weight` is `None`.
    pub fn inner(&self, mesh: &Mesh, other: &Self, weight: Option<&MaterialField>) -> f64 {
        let mut s = 0.0;
        for t in 0..mesh.num_tets() {
            let v = mesh.tet_volume(t) / 4.0;
            for q in 0..4 {
                let a = match weight {
                    Some(w) => w.apply(t, &self.values[t][q]),
                    None => self.values[t][q],
                };
                s += v * dot(&a, &other.values[t][q]);
            }
        }
        s
    }

    pub fn norm(&self, mesh: &Mesh, weight: Option<&MaterialField>) -> f64 {
        self.inner(mesh, self, weight).max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl ScalarQuadField {
    pub fn zeros(num_tets: usize) -> Self {
        ScalarQuadField { values: vec![[0.0; 4]; num_tets] }
    }

    pub fn from_fn(mesh: &Mesh, f: impl Fn(Point) -> f64) -> Self {
        let values = (0..mesh.num_tets())
            .map(|t| {
                let g = TetGeometry::new(mesh, t);
                QUAD_BARY.map(|l| f(g.point(&l)))
            })
            .collect();
        ScalarQuadField { values }
    }

    pub fn from_cell_constants(c: &[f64]) -> Self {
        ScalarQuadField { values: c.iter().map(|v| [*v; 4]).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        ScalarQuadField { values: self.values.iter().map(|v| v.map(|x| s * x)).collect() }
    }

    pub fn combine(&self, other: &Self, s: f64) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]])
            .collect();
        ScalarQuadField { values }
    }

    pub fn integral(&self, mesh: &Mesh) -> f64 {
        (0..mesh.num_tets()).map(|t| mesh.tet_volume(t) / 4.0 * self.values[t].iter().sum::<f64>()).sum()
    }

    pub fn inner(&self, mesh: &Mesh, other: &Self) -> f64 {
        (0..mesh.num_tets())
            .map(|t| {
                mesh.tet_volume(t) / 4.0 * (0..4).map(|q| self.values[t][q] * other.values[t][q]).sum::<f64>()
            })
            .sum()
    }

    pub fn norm(&self, mesh: &Mesh) -> f64 {
        self.inner(mesh, self).max(0.0).sqrt()
    }
}

/// Per-tet curls of an edge-element function.
pub fn cell_curls(mesh: &Mesh, coeffs: &[f64]) -> Vec<Vec3> {
    (0..mesh.num_tets())
        .map(|t| {
            let g = TetGeometry::new(mesh, t);
            let te = mesh.tet_edges()[t];
            let mut v = [0.0; 3];
            for k in 0..6 {
                let c = g.whitney_curl(k);
                for d in 0..3 {
                    v[d] += coeffs[te[k]] * c[d];
                }
            }
            v
        })
        .collect()
}

/// The fields entering `E = ∇u + E_ℋ + ε⁻¹ rot H`, evaluated per cell.
#[derive(Clone, Debug)]
pub struct CellwiseFields {
    pub e: QuadField,
    pub grad_u: QuadField,
    /// `rot H`, constant per cell.
    pub rot_h: Vec<Vec3>,
    pub eps_inv_rot_h: QuadField,
}

/// Evaluates the edge field `E`, `∇u`, `rot H` and `ε⁻¹ rot H` on every
/// cell. All coefficient vectors are global (unconstrained) vectors.
pub fn cellwise_fields(mesh: &Mesh, e: &[f64], h: &[f64], u: &[f64], eps: &MaterialField) -> CellwiseFields {
    assert_eq!(e.len(), mesh.num_edges(), "E coefficient length");
    assert_eq!(h.len(), mesh.num_edges(), "H coefficient length");
    assert_eq!(u.len(), mesh.num_vertices(), "u coefficient length");
    let rot_h = cell_curls(mesh, h);
    let rot_field = QuadField::from_cell_constants(&rot_h);
    CellwiseFields {
        e: QuadField::from_edge(mesh, e),
        grad_u: QuadField::gradient_of_nodal(mesh, u),
        eps_inv_rot_h: rot_field.apply_inverse(eps),
        rot_h,
    }
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fespace::IncidenceOperators;
    use crate::mesh::{generate_cube, BoundaryTag, BoundaryTri, BoxFace};
    use nalgebra::Matrix3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference_tet() -> Mesh {
        let tri = |v| BoundaryTri { vertices: v, tag: BoundaryTag::Tau };
        Mesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            vec![[0, 1, 2, 3]],
            vec![tri([1, 2, 3]), tri([0, 2, 3]), tri([0, 1, 3]), tri([0, 1, 2])],
        )
        .unwrap()
    }

    /// `∫ λ^a` over a tet by the monomial formula `a! 3! V / (Σa + 3)!`.
    fn monomial(v: f64, pow: [u32; 4]) -> f64 {
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>();
        let s: u32 = pow.iter().sum();
        v * 6.0 * pow.iter().map(|&p| fact(p)).product::<f64>() / fact(s + 3)
    }

    #[test]
    fn reference_nodal_mass() {
        let m = reference_tet();
        let mn = mass_node(&m).to_dense();
        let v = 1.0 / 6.0;
        for i in 0..4 {
            for j in 0..4 {
                let mut pow = [0; 4];
                pow[i] += 1;
                pow[j] += 1;
                assert!((mn[(i, j)] - monomial(v, pow)).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn quadrature_is_exact_for_quadratics() {
        let m = reference_tet();
        let g = TetGeometry::new(&m, 0);
        for i in 0..4 {
            for j in 0..4 {
                let q: f64 = QUAD_BARY.iter().map(|l| g.volume / 4.0 * l[i] * l[j]).sum();
                let mut pow = [0; 4];
                pow[i] += 1;
                pow[j] += 1;
                assert!((q - monomial(g.volume, pow)).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn edge_mass_matches_monomial_integrals() {
        // ∫ w_a·w_b expands into λ_iλ_j ∇λ·∇λ terms.
        let m = reference_tet();
        let g = TetGeometry::new(&m, 0);
        let me = mass_edge(&m, &MaterialField::identity(&m)).to_dense();
        let te = m.tet_edges()[0];
        let lam2 = |i: usize, j: usize| {
            let mut pow = [0; 4];
            pow[i] += 1;
            pow[j] += 1;
            monomial(g.volume, pow)
        };
        for a in 0..6 {
            for b in 0..6 {
                let [i, j] = g.edge_ends[a];
                let [k, l] = g.edge_ends[b];
                let gd = |p: usize, q: usize| dot(&g.grads[p], &g.grads[q]);
                let exact = lam2(i, k) * gd(j, l) - lam2(i, l) * gd(j, k) - lam2(j, k) * gd(i, l) + lam2(j, l) * gd(i, k);
                assert!((me[(te[a], te[b])] - exact).abs() < 1e-15, "{a} {b}");
            }
        }
    }

    #[test]
    fn gradients_are_curl_free() {
        let m = reference_tet();
        let ops = IncidenceOperators::build(&m);
        let k = curlcurl(&m, None);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let e = ops.g.to_f64().matvec(&u);
        assert!(k.matvec(&e).iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn mass_is_linear_in_eps() {
        let m = generate_cube(1, &BoxFace::ALL.into_iter().collect()).unwrap();
        let m1 = mass_edge(&m, &MaterialField::identity(&m));
        let m2 = mass_edge(&m, &MaterialField::scalar(&m, 2.0).unwrap());
        for ((_, _, a), (_, _, b)) in m1.triplets().zip(m2.triplets()) {
            assert!((2.0 * a - b).abs() <= 1e-15 * b.abs().max(1.0));
        }
    }

    #[test]
    fn constant_load_matches_barycentric_integral() {
        let m = generate_cube(1, &BoxFace::ALL.into_iter().collect()).unwrap();
        let c = [0.3, -1.2, 0.7];
        let l = load_edge(&m, |_| c);
        let mut oracle = vec![0.0; m.num_edges()];
        for t in 0..m.num_tets() {
            let g = TetGeometry::new(&m, t);
            for k in 0..6 {
                let [i, j] = g.edge_ends[k];
                // ∫ w = V/4 (∇λ_j − ∇λ_i)
                let w: Vec3 = [0, 1, 2].map(|d| g.volume / 4.0 * (g.grads[j][d] - g.grads[i][d]));
                oracle[m.tet_edges()[t][k]] += dot(&c, &w);
            }
        }
        for (a, b) in l.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(load_edge(&m, |_| [0.0; 3]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unit_load_sums_to_volume() {
        let m = generate_cube(2, &BoxFace::ALL.into_iter().collect()).unwrap();
        let s: f64 = load_node(&m, |_| 1.0).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn stiffness_equals_gt_m_g() {
        let m = generate_cube(2, &BoxFace::ALL.into_iter().collect()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cells = (0..m.num_tets())
            .map(|_| {
                let a = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
                let s = a * a.transpose() + Matrix3::identity() * 0.5;
                (s + s.transpose()) * 0.5
            })
            .collect();
        let eps = MaterialField::from_cells(&m, cells).unwrap();
        let g = IncidenceOperators::build(&m).g.to_f64();
        let l = g.transpose().matmul(&mass_edge(&m, &eps).matmul(&g));
        let direct = stiffness_node(&m, &eps);
        let scale = direct.max_abs();
        let diff = l.add_scaled(&direct, -1.0).max_abs();
        assert!(diff <= 1e-13 * scale, "{diff}");
    }

    #[test]
    fn cellwise_fields_basic_cases() {
        let m = generate_cube(1, &BoxFace::ALL.into_iter().collect()).unwrap();
        let eps = MaterialField::identity(&m);
        let zero_e = vec![0.0; m.num_edges()];
        let zero_u = vec![0.0; m.num_vertices()];
        let f = cellwise_fields(&m, &zero_e, &zero_e, &zero_u, &eps);
        assert_eq!(f.e.max_abs(), 0.0);
        assert_eq!(f.grad_u.max_abs(), 0.0);

        let u: Vec<f64> = m.vertices().iter().map(|p| p[0]).collect();
        let f = cellwise_fields(&m, &zero_e, &zero_e, &u, &eps);
        for v in f.grad_u.values.iter().flatten() {
            assert!((v[0] - 1.0).abs() < 1e-14 && v[1].abs() < 1e-14 && v[2].abs() < 1e-14);
        }

        let h = IncidenceOperators::build(&m).g.to_f64().matvec(&u);
        let f = cellwise_fields(&m, &zero_e, &h, &zero_u, &eps);
        assert!(f.rot_h.iter().flatten().all(|v| v.abs() < 1e-14));
    }
}
