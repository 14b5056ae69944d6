//! The `meshlite` ASCII format.
//!
//! ```text
//! meshlite 1
//! vertices N
//! x y z            (N lines)
//! tets M
//! v0 v1 v2 v3      (M lines, 0-based)
//! btris K
//! v0 v1 v2 tag     (K lines, tag 1 = Tau, 2 = Nu)
//! ```
//!
//! Tokens are whitespace separated; lines starting with `#` are comments.

use std::fmt::Write as _;

use super::{BoundaryTag, BoundaryTri, Mesh, Point};
use crate::error::{Error, Result};

pub fn save_meshlite(mesh: &Mesh) -> String {
    let mut s = String::new();
    s.push_str("meshlite 1\n");
    writeln!(s, "vertices {}", mesh.num_vertices()).unwrap();
    for p in mesh.vertices() {
        // `{:?}` prints the shortest representation that round-trips.
        writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]).unwrap();
    }
    writeln!(s, "tets {}", mesh.num_tets()).unwrap();
    for t in mesh.tets() {
        writeln!(s, "{} {} {} {}", t[0], t[1], t[2], t[3]).unwrap();
    }
    writeln!(s, "btris {}", mesh.boundary().len()).unwrap();
    for b in mesh.boundary() {
        let v = b.vertices;
        writeln!(s, "{} {} {} {}", v[0], v[1], v[2], b.tag.code()).unwrap();
    }
    s
}

/// Raw contents of a meshlite file, not yet checked against mesh invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshParts {
    pub vertices: Vec<Point>,
    pub tets: Vec<[usize; 4]>,
    pub boundary: Vec<BoundaryTri>,
}

pub fn load_meshlite(text: &str) -> Result<Mesh> {
    let parts = parse_meshlite(text)?;
    Mesh::new(parts.vertices, parts.tets, parts.boundary)
}

/// Syntax-only parse; see [`super::validate_parts`] for the geometric checks.
pub fn parse_meshlite(text: &str) -> Result<MeshParts> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut next = |what: &str| -> Result<(usize, Vec<&str>)> {
        let (no, l) = lines.next().ok_or_else(|| Error::MalformedHeader {
            line: 0,
            msg: format!("unexpected end of input, expected {what}"),
        })?;
        Ok((no, l.split_whitespace().collect()))
    };

    let (no, head) = next("header")?;
    if head != ["meshlite", "1"] {
        return Err(Error::MalformedHeader { line: no, msg: "expected `meshlite 1`".into() });
    }
    let count = |no: usize, toks: &[&str], key: &str| -> Result<usize> {
        if toks.len() != 2 || toks[0] != key {
            return Err(Error::MalformedHeader { line: no, msg: format!("expected `{key} <count>`") });
        }
        toks[1].parse().map_err(|_| Error::MalformedHeader { line: no, msg: format!("bad {key} count") })
    };
    fn parse<T: std::str::FromStr>(no: usize, tok: &str) -> Result<T> {
        tok.parse().map_err(|_| Error::MalformedHeader { line: no, msg: format!("cannot parse `{tok}`") })
    }
    let arity = |no: usize, toks: &[&str], n: usize| -> Result<()> {
        if toks.len() != n {
            return Err(Error::MalformedHeader { line: no, msg: format!("expected {n} fields") });
        }
        Ok(())
    };

    let (no, toks) = next("vertices")?;
    let nv = count(no, &toks, "vertices")?;
    let mut vertices: Vec<Point> = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (no, t) = next("vertex")?;
        arity(no, &t, 3)?;
        vertices.push([parse(no, t[0])?, parse(no, t[1])?, parse(no, t[2])?]);
    }

    let (no, toks) = next("tets")?;
    let nt = count(no, &toks, "tets")?;
    let mut tets = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (no, t) = next("tet")?;
        arity(no, &t, 4)?;
        tets.push([parse(no, t[0])?, parse(no, t[1])?, parse(no, t[2])?, parse(no, t[3])?]);
    }

    let (no, toks) = next("btris")?;
    let nb = count(no, &toks, "btris")?;
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (no, t) = next("boundary triangle")?;
        arity(no, &t, 4)?;
        let code: u8 = parse(no, t[3])?;
        let tag = BoundaryTag::from_code(code)
            .ok_or_else(|| Error::MalformedHeader { line: no, msg: format!("unknown tag {code}") })?;
        boundary.push(BoundaryTri { vertices: [parse(no, t[0])?, parse(no, t[1])?, parse(no, t[2])?], tag });
    }
    if let Some((no, _)) = lines.next() {
        return Err(Error::MalformedHeader { line: no, msg: "trailing content".into() });
    }
    Ok(MeshParts { vertices, tets, boundary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_cube, generate_half_cube, BoxFace, HalfCubeCase};

    #[test]
    fn round_trip() {
        for m in [
            generate_cube(1, &BoxFace::ALL.into_iter().collect()).unwrap(),
            generate_half_cube(2, HalfCubeCase::B0Plus).unwrap(),
        ] {
            let back = load_meshlite(&save_meshlite(&m)).unwrap();
            assert_eq!(back.vertices(), m.vertices());
            assert_eq!(back.tets(), m.tets());
            assert_eq!(back.boundary(), m.boundary());
            assert_eq!(back.edges(), m.edges());
        }
    }

    const CUBE_TAIL: &str = "tets 1\n0 1 2 3\nbtris 4\n0 1 2 1\n0 1 3 1\n0 2 3 1\n1 2 3 2\n";
    const VERTS: &str = "meshlite 1\n# unit tet\nvertices 4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n";

    #[test]
    fn single_tet_with_comments() {
        let m = load_meshlite(&format!("{VERTS}{CUBE_TAIL}")).unwrap();
        assert_eq!((m.num_tets(), m.num_edges(), m.num_faces()), (1, 6, 4));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(load_meshlite("meshlite 2\n"), Err(Error::MalformedHeader { line: 1, .. })));
        assert!(matches!(load_meshlite(VERTS), Err(Error::MalformedHeader { .. })));
        let bad_tag = format!("{VERTS}tets 1\n0 1 2 3\nbtris 1\n0 1 2 7\n");
        assert!(matches!(load_meshlite(&bad_tag), Err(Error::MalformedHeader { .. })));
        let trailing = format!("{VERTS}{CUBE_TAIL}extra\n");
        assert!(matches!(load_meshlite(&trailing), Err(Error::MalformedHeader { .. })));
    }

    #[test]
    fn invalid_geometry_is_rejected() {
        let degenerate = format!("{VERTS}tets 1\n0 1 2 2\nbtris 0\n");
        assert!(matches!(
            load_meshlite(&degenerate),
            Err(Error::IndexOutOfRange(_) | Error::NegativeVolume(_))
        ));
        let out_of_range = format!("{VERTS}tets 1\n0 1 2 9\nbtris 0\n");
        assert!(matches!(load_meshlite(&out_of_range), Err(Error::IndexOutOfRange(_))));
        let inverted = format!("{VERTS}tets 1\n0 2 1 3\nbtris 4\n0 1 2 1\n0 1 3 1\n0 2 3 1\n1 2 3 2\n");
        assert!(matches!(load_meshlite(&inverted), Err(Error::NegativeVolume(_))));
        let missing = format!("{VERTS}tets 1\n0 1 2 3\nbtris 3\n0 1 2 1\n0 1 3 1\n0 2 3 1\n");
        assert!(matches!(load_meshlite(&missing), Err(Error::UncoveredBoundary(_))));
    }
}
