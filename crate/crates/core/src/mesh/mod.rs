//! Tetrahedral meshes with a tangential/normal boundary partition.
//!
//! A [`Mesh`] owns its vertices, positively oriented tetrahedra and tagged
//! boundary triangles. Edges and faces are derived on construction and
//! numbered lexicographically on their sorted vertex tuples, so two meshes
//! with the same vertex ordering always produce the same numbering.

mod generate;
mod meshlite;
mod refine;
mod validate;

pub use generate::{
    generate, generate_cavity_cube, generate_cube, generate_half_cube, generate_torus_ring,
    generate_two_brick, BoxFace, DomainKind, DomainSpec, HalfCubeCase, TagAll,
};
pub use meshlite::{load_meshlite, parse_meshlite, save_meshlite, MeshParts};
pub use refine::refine_uniform;
pub use validate::{validate_parts, ValidationReport, Violation, ViolationKind};

use crate::error::Result;

pub type Point = [f64; 3];

/// Which boundary condition a boundary triangle carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// Tangential trace prescribed (`Γτ`).
    Tau,
    /// Normal trace prescribed (`Γν`).
    Nu,
}

impl BoundaryTag {
    pub fn code(self) -> u8 {
        match self {
            BoundaryTag::Tau => 1,
            BoundaryTag::Nu => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            1 => Some(BoundaryTag::Tau),
            2 => Some(BoundaryTag::Nu),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTri {
    pub vertices: [usize; 3],
    pub tag: BoundaryTag,
}

/// Geometric description of one boundary triangle, handed to re-tagging rules.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryFaceInfo {
    pub corners: [Point; 3],
    pub centroid: Point,
    /// Unit outward normal.
    pub normal: Point,
    /// Centroid of the tetrahedron owning the face.
    pub owner_centroid: Point,
    pub tag: BoundaryTag,
}

/// Local edges of a tetrahedron as pairs of local vertex indices.
pub const LOCAL_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    tets: Vec<[usize; 4]>,
    boundary: Vec<BoundaryTri>,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    tet_edges: Vec<[usize; 6]>,
    tet_faces: Vec<[usize; 4]>,
    face_tets: Vec<Vec<usize>>,
    face_tag: Vec<Option<BoundaryTag>>,
}

impl Mesh {
    /// Builds a mesh after checking every invariant; the first violation is
    /// returned as an error.
    pub fn new(vertices: Vec<Point>, tets: Vec<[usize; 4]>, boundary: Vec<BoundaryTri>) -> Result<Self> {
        let report = validate_parts(&vertices, &tets, &boundary);
        if let Some(v) = report.violations.first() {
            return Err(v.to_error());
        }
        Ok(Self::build(vertices, tets, boundary))
    }

    /// Builds connectivity without validation. Indices must be in range.
    pub(crate) fn build(vertices: Vec<Point>, tets: Vec<[usize; 4]>, mut boundary: Vec<BoundaryTri>) -> Self {
        for b in &mut boundary {
            b.vertices.sort_unstable();
        }
        boundary.sort_by(|a, b| a.vertices.cmp(&b.vertices));

        let mut edges: Vec<[usize; 2]> = Vec::with_capacity(tets.len() * 2);
        let mut faces: Vec<[usize; 3]> = Vec::with_capacity(tets.len() * 3);
        for t in &tets {
            for e in LOCAL_EDGES {
                edges.push(sorted2(t[e[0]], t[e[1]]));
            }
            for k in 0..4 {
                faces.push(opposite_face(t, k));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        faces.sort_unstable();
        faces.dedup();

        let mut tet_edges = Vec::with_capacity(tets.len());
        let mut tet_faces = Vec::with_capacity(tets.len());
        let mut face_tets = vec![Vec::new(); faces.len()];
        for (ti, t) in tets.iter().enumerate() {
            let mut te = [0; 6];
            for (slot, e) in LOCAL_EDGES.iter().enumerate() {
                te[slot] = edges.binary_search(&sorted2(t[e[0]], t[e[1]])).unwrap();
            }
            let mut tf = [0; 4];
            for (k, slot) in tf.iter_mut().enumerate() {
                let fi = faces.binary_search(&opposite_face(t, k)).unwrap();
                *slot = fi;
                face_tets[fi].push(ti);
            }
            tet_edges.push(te);
            tet_faces.push(tf);
        }
        let mut face_tag = vec![None; faces.len()];
        for b in &boundary {
            if let Ok(fi) = faces.binary_search(&b.vertices) {
                face_tag[fi] = Some(b.tag);
            }
        }
        Mesh { vertices, tets, boundary, edges, faces, tet_edges, tet_faces, face_tets, face_tag }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }
    pub fn boundary(&self) -> &[BoundaryTri] {
        &self.boundary
    }
    /// Edges as sorted vertex pairs, lexicographically ordered.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }
    /// Faces as sorted vertex triples, lexicographically ordered.
    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }
    /// Global edge index of each local edge (see [`LOCAL_EDGES`]).
    pub fn tet_edges(&self) -> &[[usize; 6]] {
        &self.tet_edges
    }
    /// Global face index of the face opposite each local vertex.
    pub fn tet_faces(&self) -> &[[usize; 4]] {
        &self.tet_faces
    }
    pub fn face_tets(&self, face: usize) -> &[usize] {
        &self.face_tets[face]
    }
    pub fn face_tag(&self, face: usize) -> Option<BoundaryTag> {
        self.face_tag[face]
    }
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&sorted2(a, b)).ok()
    }

    pub fn face_index(&self, mut f: [usize; 3]) -> Option<usize> {
        f.sort_unstable();
        self.faces.binary_search(&f).ok()
    }

    pub fn count_tag(&self, tag: BoundaryTag) -> usize {
        self.boundary.iter().filter(|b| b.tag == tag).count()
    }

    pub fn tet_corners(&self, t: usize) -> [Point; 4] {
        let v = &self.tets[t];
        [self.vertices[v[0]], self.vertices[v[1]], self.vertices[v[2]], self.vertices[v[3]]]
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        let c = self.tet_corners(t);
        signed_volume(&c[0], &c[1], &c[2], &c[3])
    }

    pub fn tet_centroid(&self, t: usize) -> Point {
        let c = self.tet_corners(t);
        let mut m = [0.0; 3];
        for p in &c {
            for d in 0..3 {
                m[d] += 0.25 * p[d];
            }
        }
        m
    }

    pub fn total_volume(&self) -> f64 {
        compensated_sum((0..self.num_tets()).map(|t| self.tet_volume(t)))
    }

    pub fn boundary_area(&self) -> f64 {
        compensated_sum(self.boundary.iter().map(|b| {
            let [a, bb, c] = b.vertices.map(|i| self.vertices[i]);
            0.5 * norm(&cross(&sub(&bb, &a), &sub(&c, &a)))
        }))
    }

    /// Geometry of boundary triangle `i` with its outward normal.
    pub fn boundary_info(&self, i: usize) -> BoundaryFaceInfo {
        let b = &self.boundary[i];
        let corners = b.vertices.map(|v| self.vertices[v]);
        let centroid = centroid3(&corners);
        let fi = self.faces.binary_search(&b.vertices).expect("boundary triangle is a face");
        let owner = self.face_tets[fi][0];
        let owner_centroid = self.tet_centroid(owner);
        let mut n = cross(&sub(&corners[1], &corners[0]), &sub(&corners[2], &corners[0]));
        let len = norm(&n);
        for x in &mut n {
            *x /= len;
        }
        if dot(&n, &sub(&centroid, &owner_centroid)) < 0.0 {
            for x in &mut n {
                *x = -*x;
            }
        }
        BoundaryFaceInfo { corners, centroid, normal: n, owner_centroid, tag: b.tag }
    }

    /// Returns a copy whose boundary tags are recomputed by `rule`.
    pub fn retagged(&self, rule: impl Fn(&BoundaryFaceInfo) -> BoundaryTag) -> Mesh {
        let mut out = self.clone();
        for i in 0..self.boundary.len() {
            let tag = rule(&self.boundary_info(i));
            out.boundary[i].tag = tag;
        }
        for (fi, slot) in out.face_tag.iter_mut().enumerate() {
            if slot.is_some() {
                let pos = out.boundary.binary_search_by(|b| b.vertices.cmp(&out.faces[fi])).unwrap();
                *slot = Some(out.boundary[pos].tag);
            }
        }
        out
    }

    /// All boundary triangles tagged `tag`.
    pub fn with_all_tags(&self, tag: BoundaryTag) -> Mesh {
        self.retagged(|_| tag)
    }

    /// Swaps the roles of `Tau` and `Nu`.
    pub fn swapped_tags(&self) -> Mesh {
        self.retagged(|info| match info.tag {
            BoundaryTag::Tau => BoundaryTag::Nu,
            BoundaryTag::Nu => BoundaryTag::Tau,
        })
    }

    pub fn validate(&self) -> ValidationReport {
        validate_parts(&self.vertices, &self.tets, &self.boundary)
    }

    /// Largest edge length.
    pub fn max_edge_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| norm(&sub(&self.vertices[e[1]], &self.vertices[e[0]])))
            .fold(0.0, f64::max)
    }

    /// Diameter of the vertex bounding box.
    pub fn bounding_diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.vertices {
            for d in 0..3 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        norm(&sub(&hi, &lo))
    }
}

/// Neumaier summation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + carry
}

pub(crate) fn sorted2(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

/// Sorted face opposite local vertex `k`.
pub(crate) fn opposite_face(t: &[usize; 4], k: usize) -> [usize; 3] {
    let mut f = [0; 3];
    let mut j = 0;
    for (i, &v) in t.iter().enumerate() {
        if i != k {
            f[j] = v;
            j += 1;
        }
    }
    f.sort_unstable();
    f
}

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: &Point, b: &Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn centroid3(c: &[Point; 3]) -> Point {
    let mut m = [0.0; 3];
    for p in c {
        for d in 0..3 {
            m[d] += p[d] / 3.0;
        }
    }
    m
}

pub fn signed_volume(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    dot(&sub(b, a), &cross(&sub(c, a), &sub(d, a))) / 6.0
}
