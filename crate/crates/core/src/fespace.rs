//! Degrees of freedom of the lowest-order spaces and the incidence matrices
//! of the discrete de Rham complex.
//!
//! Nodal, edge, face and cell unknowns carry one value per vertex, edge,
//! face and tetrahedron. A [`DofMap`] splits them into free and constrained
//! sets according to a boundary side: on the `Tau` side every entity lying
//! in a `Tau` triangle (vertices, edges and the triangle itself) is
//! constrained, symmetrically for `Nu`.

use crate::mesh::{BoundaryTag, Mesh, Point};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Nodal,
    Edge,
    Face,
    Cell,
}

/// Which boundary part carries the essential condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Tau,
    Nu,
    None,
}

impl Side {
    pub fn swapped(self) -> Side {
        match self {
            Side::Tau => Side::Nu,
            Side::Nu => Side::Tau,
            Side::None => Side::None,
        }
    }

    fn tag(self) -> Option<BoundaryTag> {
        match self {
            Side::Tau => Some(BoundaryTag::Tau),
            Side::Nu => Some(BoundaryTag::Nu),
            Side::None => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    kind: SpaceKind,
    side: Side,
    free: Vec<usize>,
    constrained: Vec<usize>,
    to_free: Vec<Option<usize>>,
}

impl DofMap {
    fn from_mask(kind: SpaceKind, side: Side, constrained_mask: &[bool]) -> Self {
        let mut free = Vec::new();
        let mut constrained = Vec::new();
        let mut to_free = vec![None; constrained_mask.len()];
        for (i, &c) in constrained_mask.iter().enumerate() {
            if c {
                constrained.push(i);
            } else {
                to_free[i] = Some(free.len());
                free.push(i);
            }
        }
        DofMap { kind, side, free, constrained, to_free }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }
    pub fn side(&self) -> Side {
        self.side
    }
    pub fn free(&self) -> &[usize] {
        &self.free
    }
    pub fn constrained(&self) -> &[usize] {
        &self.constrained
    }
    pub fn num_free(&self) -> usize {
        self.free.len()
    }
    pub fn num_total(&self) -> usize {
        self.to_free.len()
    }
    /// Position of global entity `i` among the free DOFs.
    pub fn free_index(&self, i: usize) -> Option<usize> {
        self.to_free[i]
    }
    pub fn is_free(&self, i: usize) -> bool {
        self.to_free[i].is_some()
    }

    /// Free entries of a global vector.
    pub fn restrict(&self, global: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| global[i]).collect()
    }

    /// Global vector with the given free values and zero constrained values.
    pub fn extend(&self, free: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.num_total()];
        for (&i, &v) in self.free.iter().zip(free) {
            g[i] = v;
        }
        g
    }

    /// Copy of `global` with the free entries set to zero.
    pub fn zero_free(&self, global: &[f64]) -> Vec<f64> {
        let mut g = global.to_vec();
        for &i in &self.free {
            g[i] = 0.0;
        }
        g
    }
}

/// Every (kind, side) map of one mesh.
#[derive(Clone, Debug)]
pub struct DofMaps {
    maps: Vec<DofMap>,
}

fn slot(kind: SpaceKind, side: Side) -> usize {
    let k = match kind {
        SpaceKind::Nodal => 0,
        SpaceKind::Edge => 1,
        SpaceKind::Face => 2,
        SpaceKind::Cell => 3,
    };
    let s = match side {
        Side::Tau => 0,
        Side::Nu => 1,
        Side::None => 2,
    };
    3 * k + s
}

impl DofMaps {
    pub fn build(mesh: &Mesh) -> Self {
        let mut maps = Vec::with_capacity(12);
        for kind in [SpaceKind::Nodal, SpaceKind::Edge, SpaceKind::Face, SpaceKind::Cell] {
            for side in [Side::Tau, Side::Nu, Side::None] {
                maps.push(build_map(mesh, kind, side));
            }
        }
        DofMaps { maps }
    }

    pub fn get(&self, kind: SpaceKind, side: Side) -> &DofMap {
        &self.maps[slot(kind, side)]
    }

    pub fn nodal(&self, side: Side) -> &DofMap {
        self.get(SpaceKind::Nodal, side)
    }
    pub fn edge(&self, side: Side) -> &DofMap {
        self.get(SpaceKind::Edge, side)
    }
    pub fn face(&self, side: Side) -> &DofMap {
        self.get(SpaceKind::Face, side)
    }
}

fn build_map(mesh: &Mesh, kind: SpaceKind, side: Side) -> DofMap {
    let n = match kind {
        SpaceKind::Nodal => mesh.num_vertices(),
        SpaceKind::Edge => mesh.num_edges(),
        SpaceKind::Face => mesh.num_faces(),
        SpaceKind::Cell => mesh.num_tets(),
    };
    let mut mask = vec![false; n];
    if let (Some(tag), false) = (side.tag(), kind == SpaceKind::Cell) {
        for b in mesh.boundary().iter().filter(|b| b.tag == tag) {
            let [p, q, r] = b.vertices;
            match kind {
                SpaceKind::Nodal => {
                    for v in [p, q, r] {
                        mask[v] = true;
                    }
                }
                SpaceKind::Edge => {
                    for (a, c) in [(p, q), (p, r), (q, r)] {
                        mask[mesh.edge_index(a, c).expect("boundary edge exists")] = true;
                    }
                }
                SpaceKind::Face => mask[mesh.face_index([p, q, r]).expect("boundary face exists")] = true,
                SpaceKind::Cell => unreachable!(),
            }
        }
    }
    DofMap::from_mask(kind, side, &mask)
}

/// Signed incidence matrices `G` (edges × vertices), `C` (faces × edges) and
/// `D` (tets × faces).
#[derive(Clone, Debug)]
pub struct IncidenceOperators {
    pub g: CsrMatrix<i32>,
    pub c: CsrMatrix<i32>,
    pub d: CsrMatrix<i32>,
}

impl IncidenceOperators {
    pub fn build(mesh: &Mesh) -> Self {
        let g = CsrMatrix::from_triplets(
            mesh.num_edges(),
            mesh.num_vertices(),
            mesh.edges().iter().enumerate().flat_map(|(e, &[a, b])| [(e, a, -1), (e, b, 1)]),
        );
        let c = CsrMatrix::from_triplets(
            mesh.num_faces(),
            mesh.num_edges(),
            mesh.faces().iter().enumerate().flat_map(|(f, &[a, b, c])| {
                let e = |x, y| mesh.edge_index(x, y).expect("face edge exists");
                [(f, e(a, b), 1), (f, e(b, c), 1), (f, e(a, c), -1)]
            }),
        );
        let mut dt = Vec::with_capacity(4 * mesh.num_tets());
        for (t, verts) in mesh.tets().iter().enumerate() {
            for i in 0..4 {
                let mut face: Vec<usize> = (0..4).filter(|&k| k != i).map(|k| verts[k]).collect();
                let parity = sort_parity(&mut face);
                let sign = if i % 2 == 0 { parity } else { -parity };
                dt.push((t, mesh.tet_faces()[t][i], sign));
            }
        }
        let d = CsrMatrix::from_triplets(mesh.num_tets(), mesh.num_faces(), dt);
        IncidenceOperators { g, c, d }
    }

    /// `G` restricted to free edges and free vertices of `side`.
    pub fn g_restricted(&self, maps: &DofMaps, side: Side) -> CsrMatrix<i32> {
        self.g.submatrix(maps.edge(side).free(), maps.nodal(side).free())
    }

    pub fn c_restricted(&self, maps: &DofMaps, side: Side) -> CsrMatrix<i32> {
        self.c.submatrix(maps.face(side).free(), maps.edge(side).free())
    }

    pub fn d_restricted(&self, maps: &DofMaps, side: Side) -> CsrMatrix<i32> {
        let cells: Vec<usize> = (0..self.d.nrows()).collect();
        self.d.submatrix(&cells, maps.face(side).free())
    }

    /// `G` with all edge rows and the free vertex columns of `side`, as reals.
    pub fn gradient(&self, maps: &DofMaps, side: Side) -> CsrMatrix {
        let rows: Vec<usize> = (0..self.g.nrows()).collect();
        self.g.submatrix(&rows, maps.nodal(side).free()).to_f64()
    }
}

/// Sorts `v` in place and returns the parity of the permutation.
fn sort_parity(v: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

/// Vertex values of `f`.
pub fn interpolate_nodal(mesh: &Mesh, f: impl Fn(Point) -> f64) -> Vec<f64> {
    mesh.vertices().iter().map(|&p| f(p)).collect()
}

/// Tangential line integrals of `f` along each edge (low to high vertex),
/// by two-point Gauss quadrature.
pub fn interpolate_edge(mesh: &Mesh, f: impl Fn(Point) -> [f64; 3]) -> Vec<f64> {
    let s = 0.5 / 3f64.sqrt();
    mesh.edges()
        .iter()
        .map(|&[a, b]| {
            let pa = mesh.vertices()[a];
            let pb = mesh.vertices()[b];
            let t = [pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]];
            [0.5 - s, 0.5 + s]
                .iter()
                .map(|&x| {
                    let v = f([pa[0] + x * t[0], pa[1] + x * t[1], pa[2] + x * t[2]]);
                    0.5 * (v[0] * t[0] + v[1] * t[1] + v[2] * t[2])
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_cube, generate_half_cube, BoxFace, HalfCubeCase};
    use nalgebra::DMatrix;

    fn all() -> std::collections::BTreeSet<BoxFace> {
        BoxFace::ALL.into_iter().collect()
    }

    #[test]
    fn cube_free_vertex_counts() {
        let m1 = generate_cube(1, &all()).unwrap();
        assert_eq!(DofMaps::build(&m1).nodal(Side::Tau).num_free(), 0);
        let m2 = generate_cube(2, &all()).unwrap();
        let maps = DofMaps::build(&m2);
        let free = maps.nodal(Side::Tau).free();
        assert_eq!(free.len(), 1);
        assert_eq!(m2.vertices()[free[0]], [0.5, 0.5, 0.5]);
        // Lattice oracle: interior points of the (n+1)³ grid.
        let m3 = generate_cube(3, &all()).unwrap();
        assert_eq!(DofMaps::build(&m3).nodal(Side::Tau).num_free(), 8);
        assert_eq!(maps.nodal(Side::None).num_free(), 27);
        assert_eq!(maps.nodal(Side::Nu).num_free(), 27);
    }

    #[test]
    fn half_cube_nu_edges_are_top_face_edges() {
        let m = generate_half_cube(2, HalfCubeCase::B0).unwrap();
        let maps = DofMaps::build(&m);
        let on_top = |v: usize| m.vertices()[v][2] == 0.0;
        let expected: Vec<usize> =
            m.edges().iter().enumerate().filter(|(_, e)| on_top(e[0]) && on_top(e[1])).map(|(i, _)| i).collect();
        assert_eq!(maps.edge(Side::Nu).constrained(), &expected[..]);
    }

    #[test]
    fn single_tet_gradient_rank() {
        let m = Mesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            vec![[0, 1, 2, 3]],
            vec![
                crate::mesh::BoundaryTri { vertices: [1, 2, 3], tag: BoundaryTag::Tau },
                crate::mesh::BoundaryTri { vertices: [0, 2, 3], tag: BoundaryTag::Tau },
                crate::mesh::BoundaryTri { vertices: [0, 1, 3], tag: BoundaryTag::Tau },
                crate::mesh::BoundaryTri { vertices: [0, 1, 2], tag: BoundaryTag::Tau },
            ],
        )
        .unwrap();
        let ops = IncidenceOperators::build(&m);
        assert_eq!((ops.g.nrows(), ops.g.ncols()), (6, 4));
        let dense: DMatrix<f64> = ops.g.to_f64().to_dense();
        assert_eq!(dense.rank(1e-10), 3);
        assert_eq!(ops.c.matmul(&ops.g).max_abs(), 0);
        assert_eq!(ops.d.matmul(&ops.c).max_abs(), 0);
        // The single tet has positive outward flux through all four faces.
        assert!(ops.d.data().iter().all(|&s| s == 1 || s == -1));
    }

    #[test]
    fn gradient_of_affine_is_edge_extent() {
        let m = generate_cube(2, &all()).unwrap();
        let ops = IncidenceOperators::build(&m);
        let u = interpolate_nodal(&m, |p| p[0]);
        let gu = ops.g.to_f64().matvec(&u);
        for (e, &[a, b]) in m.edges().iter().enumerate() {
            assert_eq!(gu[e], m.vertices()[b][0] - m.vertices()[a][0]);
        }
    }

    #[test]
    fn constant_field_edge_interpolation() {
        let m = generate_cube(1, &all()).unwrap();
        let e = interpolate_edge(&m, |_| [1.0, 0.0, 0.0]);
        for (i, &[a, b]) in m.edges().iter().enumerate() {
            let d = m.vertices()[b][0] - m.vertices()[a][0];
            assert!((e[i] - d).abs() < 1e-15);
        }
    }

    #[test]
    fn commuting_diagram_for_quadratic() {
        let m = generate_cube(2, &all()).unwrap();
        let ops = IncidenceOperators::build(&m);
        let lhs = interpolate_edge(&m, |p| [p[1], p[0], 0.0]);
        let rhs = ops.g.to_f64().matvec(&interpolate_nodal(&m, |p| p[0] * p[1]));
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() <= 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn restricted_sequences_are_exact() {
        let tau: std::collections::BTreeSet<_> = [BoxFace::XMinus, BoxFace::YPlus].into_iter().collect();
        let m = generate_cube(2, &tau).unwrap();
        let maps = DofMaps::build(&m);
        let ops = IncidenceOperators::build(&m);
        for side in [Side::Tau, Side::Nu, Side::None] {
            let g = ops.g_restricted(&maps, side);
            let c = ops.c_restricted(&maps, side);
            let d = ops.d_restricted(&maps, side);
            assert_eq!(c.matmul(&g).max_abs(), 0);
            assert_eq!(d.matmul(&c).max_abs(), 0);
        }
    }
}
