use std::collections::HashMap;
use std::fmt;

use super::{opposite_face, signed_volume, BoundaryTag, BoundaryTri, Point};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    NonFiniteVertex,
    IndexOutOfRange,
    NegativeVolume,
    UncoveredBoundary,
    /// A face shared by more than two tetrahedra.
    NonManifoldFace,
    /// A triangle listed twice, possibly with both tags.
    DuplicateBoundary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl Violation {
    fn new(kind: ViolationKind, message: impl Into<String>) -> Self {
        Violation { kind, message: message.into() }
    }

    pub fn to_error(&self) -> Error {
        match self.kind {
            ViolationKind::IndexOutOfRange => Error::IndexOutOfRange(self.message.clone()),
            ViolationKind::NegativeVolume => Error::NegativeVolume(self.message.clone()),
            ViolationKind::NonFiniteVertex => Error::InvalidResolution(self.message.clone()),
            ViolationKind::UncoveredBoundary
            | ViolationKind::NonManifoldFace
            | ViolationKind::DuplicateBoundary => Error::UncoveredBoundary(self.message.clone()),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

/// Every invariant violation found in a mesh; empty iff the mesh is valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

/// Checks raw mesh parts against every mesh invariant.
pub fn validate_parts(vertices: &[Point], tets: &[[usize; 4]], boundary: &[BoundaryTri]) -> ValidationReport {
    let mut out = Vec::new();
    let nv = vertices.len();
    for (i, p) in vertices.iter().enumerate() {
        if p.iter().any(|x| !x.is_finite()) {
            out.push(Violation::new(ViolationKind::NonFiniteVertex, format!("vertex {i} is not finite")));
        }
    }

    let mut face_count: HashMap<[usize; 3], usize> = HashMap::new();
    for (ti, t) in tets.iter().enumerate() {
        if let Some(&bad) = t.iter().find(|&&v| v >= nv) {
            out.push(Violation::new(
                ViolationKind::IndexOutOfRange,
                format!("tet {ti} references vertex {bad} of {nv}"),
            ));
            continue;
        }
        let mut s = *t;
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            out.push(Violation::new(ViolationKind::NegativeVolume, format!("tet {ti} {t:?} is degenerate")));
            continue;
        }
        let vol = signed_volume(&vertices[t[0]], &vertices[t[1]], &vertices[t[2]], &vertices[t[3]]);
        if !(vol > 0.0) {
            out.push(Violation::new(ViolationKind::NegativeVolume, format!("tet {ti} has signed volume {vol:e}")));
        }
        for k in 0..4 {
            *face_count.entry(opposite_face(t, k)).or_insert(0) += 1;
        }
    }

    let mut seen: HashMap<[usize; 3], BoundaryTag> = HashMap::new();
    for (bi, b) in boundary.iter().enumerate() {
        if let Some(&bad) = b.vertices.iter().find(|&&v| v >= nv) {
            out.push(Violation::new(
                ViolationKind::IndexOutOfRange,
                format!("boundary triangle {bi} references vertex {bad} of {nv}"),
            ));
            continue;
        }
        let mut s = b.vertices;
        s.sort_unstable();
        if let Some(prev) = seen.insert(s, b.tag) {
            out.push(Violation::new(
                ViolationKind::DuplicateBoundary,
                format!("boundary triangle {s:?} listed twice (tags {prev:?}, {:?})", b.tag),
            ));
        }
        match face_count.get(&s) {
            Some(1) => {}
            Some(_) => out.push(Violation::new(
                ViolationKind::UncoveredBoundary,
                format!("boundary triangle {s:?} is an interior face"),
            )),
            None => out.push(Violation::new(
                ViolationKind::UncoveredBoundary,
                format!("boundary triangle {s:?} is not a face of any tet"),
            )),
        }
    }

    let mut faces: Vec<_> = face_count.into_iter().collect();
    faces.sort_unstable();
    for (f, c) in faces {
        if c > 2 {
            out.push(Violation::new(ViolationKind::NonManifoldFace, format!("face {f:?} shared by {c} tets")));
        } else if c == 1 && !seen.contains_key(&f) {
            out.push(Violation::new(
                ViolationKind::UncoveredBoundary,
                format!("boundary face {f:?} carries no tag"),
            ));
        }
    }
    ValidationReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tet() -> (Vec<Point>, Vec<[usize; 4]>, Vec<BoundaryTri>) {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let b = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
            .map(|vertices| BoundaryTri { vertices, tag: BoundaryTag::Tau })
            .to_vec();
        (v, vec![[0, 1, 2, 3]], b)
    }

    #[test]
    fn valid_tet_has_empty_report() {
        let (v, t, b) = unit_tet();
        assert!(validate_parts(&v, &t, &b).is_valid());
    }

    #[test]
    fn each_violation_is_reported() {
        let (mut v, t, mut b) = unit_tet();
        b.push(BoundaryTri { vertices: [0, 1, 2], tag: BoundaryTag::Nu });
        assert!(validate_parts(&v, &t, &b).has(ViolationKind::DuplicateBoundary));

        let (_, _, mut b) = unit_tet();
        b.pop();
        assert!(validate_parts(&v, &t, &b).has(ViolationKind::UncoveredBoundary));

        let (_, _, b) = unit_tet();
        assert!(validate_parts(&v, &[[0, 2, 1, 3]], &b).has(ViolationKind::NegativeVolume));
        assert!(validate_parts(&v, &[[0, 1, 2, 2]], &b).has(ViolationKind::NegativeVolume));
        assert!(validate_parts(&v, &[[0, 1, 2, 4]], &b).has(ViolationKind::IndexOutOfRange));

        v.push([0.3, 0.3, 0.3]);
        let (_, _, mut b) = unit_tet();
        b.push(BoundaryTri { vertices: [0, 1, 4], tag: BoundaryTag::Tau });
        assert!(validate_parts(&v, &t, &b).has(ViolationKind::UncoveredBoundary));

        v[4] = [f64::NAN, 0.0, 0.0];
        assert!(validate_parts(&v, &t, &unit_tet().2).has(ViolationKind::NonFiniteVertex));
    }

    #[test]
    fn shared_face_beyond_two_tets_is_non_manifold() {
        let v = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
            [0.1, 0.1, 2.0],
        ];
        let t = vec![[0, 1, 2, 3], [0, 2, 1, 4], [0, 1, 2, 5]];
        let report = validate_parts(&v, &t, &[]);
        assert!(report.has(ViolationKind::NonManifoldFace));
    }
}
