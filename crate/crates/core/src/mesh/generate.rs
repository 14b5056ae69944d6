//! Structured domain generators.
//!
//! Every domain is a union of axis-aligned hexahedral cells of a lattice,
//! each split into six tetrahedra around its main diagonal (Kuhn split). The
//! split is the same in every cell, so neighbouring cells always agree on the
//! diagonal of their shared face.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::{opposite_face, signed_volume, BoundaryTag, BoundaryTri, Mesh, Point};
use crate::error::{Error, Result};

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// One of the six faces of an axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoxFace {
    XMinus,
    XPlus,
    YMinus,
    YPlus,
    ZMinus,
    ZPlus,
}

impl BoxFace {
    pub const ALL: [BoxFace; 6] =
        [BoxFace::XMinus, BoxFace::XPlus, BoxFace::YMinus, BoxFace::YPlus, BoxFace::ZMinus, BoxFace::ZPlus];

    pub fn axis(self) -> usize {
        match self {
            BoxFace::XMinus | BoxFace::XPlus => 0,
            BoxFace::YMinus | BoxFace::YPlus => 1,
            BoxFace::ZMinus | BoxFace::ZPlus => 2,
        }
    }

    pub fn is_plus(self) -> bool {
        matches!(self, BoxFace::XPlus | BoxFace::YPlus | BoxFace::ZPlus)
    }

    /// Parses a face list such as `all`, `none` or `-x,+y`.
    pub fn parse_list(s: &str) -> Result<BTreeSet<BoxFace>> {
        let s = s.trim();
        match s {
            "all" => return Ok(BoxFace::ALL.into_iter().collect()),
            "none" | "" => return Ok(BTreeSet::new()),
            _ => {}
        }
        s.split(',').map(|t| t.trim().parse()).collect()
    }

    pub fn format_list(faces: &BTreeSet<BoxFace>) -> String {
        if faces.len() == 6 {
            "all".into()
        } else if faces.is_empty() {
            "none".into()
        } else {
            faces.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(",")
        }
    }
}

impl FromStr for BoxFace {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "-x" => BoxFace::XMinus,
            "+x" | "x" => BoxFace::XPlus,
            "-y" => BoxFace::YMinus,
            "+y" | "y" => BoxFace::YPlus,
            "-z" => BoxFace::ZMinus,
            "+z" | "z" => BoxFace::ZPlus,
            _ => return Err(Error::InvalidResolution(format!("unknown box face `{s}`"))),
        })
    }
}

impl fmt::Display for BoxFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BoxFace::XMinus => "-x",
            BoxFace::XPlus => "+x",
            BoxFace::YMinus => "-y",
            BoxFace::YPlus => "+y",
            BoxFace::ZMinus => "-z",
            BoxFace::ZPlus => "+z",
        };
        f.write_str(s)
    }
}

/// Which part of the top face `x₃ = 0` of the half-cube carries the normal
/// condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfCubeCase {
    Empty,
    B0,
    B0Plus,
    B0Minus,
}

impl FromStr for HalfCubeCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "empty" | "none" => HalfCubeCase::Empty,
            "b0" => HalfCubeCase::B0,
            "b0plus" | "b0_plus" | "b0+" => HalfCubeCase::B0Plus,
            "b0minus" | "b0_minus" | "b0-" => HalfCubeCase::B0Minus,
            _ => return Err(Error::InvalidResolution(format!("unknown half-cube case `{s}`"))),
        })
    }
}

impl fmt::Display for HalfCubeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HalfCubeCase::Empty => "empty",
            HalfCubeCase::B0 => "b0",
            HalfCubeCase::B0Plus => "b0plus",
            HalfCubeCase::B0Minus => "b0minus",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainKind {
    /// Unit cube with the listed faces tangential.
    Cube { tau: BTreeSet<BoxFace> },
    HalfCube { case: HalfCubeCase },
    /// Two bricks glued along a square; `Tau` on the lower brick when
    /// `lower_tau` is set, everything `Tau` otherwise.
    TwoBrick { lower_tau: bool },
    TorusRing { tau: TagAll },
    CavityCube { tau: TagAll },
}

/// Uniform tagging for the generated domains without face structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TagAll {
    Tau,
    Nu,
}

impl From<TagAll> for BoundaryTag {
    fn from(t: TagAll) -> Self {
        match t {
            TagAll::Tau => BoundaryTag::Tau,
            TagAll::Nu => BoundaryTag::Nu,
        }
    }
}

/// Domain kind plus resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub n: usize,
}

impl DomainSpec {
    /// Parses `kind:n[:rule]`, e.g. `cube:2:tau=-x,-y`, `half_cube:2:nu=b0plus`,
    /// `torus_ring:1:tau=none`, `two_brick:1:lower`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() < 2 {
            return Err(Error::InvalidResolution(format!("domain spec `{s}` needs kind:n")));
        }
        let n: usize = parts[1]
            .parse()
            .map_err(|_| Error::InvalidResolution(format!("bad resolution `{}`", parts[1])))?;
        let rule = parts.get(2).copied().unwrap_or("");
        Self::from_parts(parts[0], n, rule)
    }

    /// Builds a spec from a kind name, resolution and tagging rule (`tau=...`,
    /// `nu=...`, `lower`, or empty for the default).
    pub fn from_parts(kind: &str, n: usize, rule: &str) -> Result<Self> {
        check_n(n)?;
        let (key, value) = rule.split_once('=').unwrap_or((rule, ""));
        let uniform = |default: TagAll| -> Result<TagAll> {
            match (key, value) {
                ("", _) => Ok(default),
                ("tau", "all") | ("nu", "none") => Ok(TagAll::Tau),
                ("tau", "none") | ("nu", "all") => Ok(TagAll::Nu),
                _ => Err(Error::InvalidResolution(format!("unsupported tagging rule `{rule}` for {kind}"))),
            }
        };
        let kind = match kind {
            "cube" => {
                let tau = match key {
                    "" => BoxFace::ALL.into_iter().collect(),
                    "tau" => BoxFace::parse_list(value)?,
                    "nu" => {
                        let nu = BoxFace::parse_list(value)?;
                        BoxFace::ALL.into_iter().filter(|f| !nu.contains(f)).collect()
                    }
                    _ => return Err(Error::InvalidResolution(format!("unsupported cube rule `{rule}`"))),
                };
                DomainKind::Cube { tau }
            }
            "half_cube" => {
                let case = match key {
                    "" => HalfCubeCase::Empty,
                    "nu" => value.parse()?,
                    _ => return Err(Error::InvalidResolution(format!("unsupported half-cube rule `{rule}`"))),
                };
                DomainKind::HalfCube { case }
            }
            "two_brick" => DomainKind::TwoBrick {
                lower_tau: match key {
                    "lower" => true,
                    "" | "tau" if value.is_empty() || value == "all" => false,
                    _ => return Err(Error::InvalidResolution(format!("unsupported two-brick rule `{rule}`"))),
                },
            },
            "torus_ring" => DomainKind::TorusRing { tau: uniform(TagAll::Tau)? },
            "cavity_cube" => DomainKind::CavityCube { tau: uniform(TagAll::Tau)? },
            other => return Err(Error::InvalidResolution(format!("unknown domain kind `{other}`"))),
        };
        Ok(DomainSpec { kind, n })
    }

    pub fn build(&self) -> Result<Mesh> {
        generate(self)
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let all_none = |t: &TagAll| match t {
            TagAll::Tau => "tau=all",
            TagAll::Nu => "tau=none",
        };
        match &self.kind {
            DomainKind::Cube { tau } => write!(f, "cube:{}:tau={}", self.n, BoxFace::format_list(tau)),
            DomainKind::HalfCube { case } => write!(f, "half_cube:{}:nu={}", self.n, case),
            DomainKind::TwoBrick { lower_tau: true } => write!(f, "two_brick:{}:lower", self.n),
            DomainKind::TwoBrick { lower_tau: false } => write!(f, "two_brick:{}:tau=all", self.n),
            DomainKind::TorusRing { tau } => write!(f, "torus_ring:{}:{}", self.n, all_none(tau)),
            DomainKind::CavityCube { tau } => write!(f, "cavity_cube:{}:{}", self.n, all_none(tau)),
        }
    }
}

pub fn generate(spec: &DomainSpec) -> Result<Mesh> {
    let n = spec.n;
    match &spec.kind {
        DomainKind::Cube { tau } => generate_cube(n, tau),
        DomainKind::HalfCube { case } => generate_half_cube(n, *case),
        DomainKind::TwoBrick { lower_tau } => {
            let m = generate_two_brick(n)?;
            Ok(if *lower_tau {
                m.retagged(|info| if info.owner_centroid[2] < 0.0 { BoundaryTag::Tau } else { BoundaryTag::Nu })
            } else {
                m
            })
        }
        DomainKind::TorusRing { tau } => Ok(generate_torus_ring(n)?.with_all_tags((*tau).into())),
        DomainKind::CavityCube { tau } => Ok(generate_cavity_cube(n)?.with_all_tags((*tau).into())),
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidResolution("resolution must be at least 1".into()));
    }
    Ok(())
}

/// Unit cube `(0,1)³` with `n` cells per axis; triangles on the listed faces
/// are `Tau`, all others `Nu`.
pub fn generate_cube(n: usize, tau_faces: &BTreeSet<BoxFace>) -> Result<Mesh> {
    check_n(n)?;
    let lattice = Lattice { origin: [0.0; 3], extent: [1.0; 3], cells: [n; 3] };
    let tau_faces = tau_faces.clone();
    Ok(lattice.build(
        |_| true,
        move |corners, _| {
            let on = |face: BoxFace| {
                let target = if face.is_plus() { 1.0 } else { 0.0 };
                corners.iter().all(|p| p[face.axis()] == target)
            };
            if tau_faces.iter().any(|&f| on(f)) {
                BoundaryTag::Tau
            } else {
                BoundaryTag::Nu
            }
        },
    ))
}

/// Half-cube `(-1,1)² × (-1,0)` with `n` cells per axis. The normal
/// condition sits on the selected part of the top face `x₃ = 0`.
pub fn generate_half_cube(n: usize, case: HalfCubeCase) -> Result<Mesh> {
    check_n(n)?;
    if matches!(case, HalfCubeCase::B0Plus | HalfCubeCase::B0Minus) && n % 2 != 0 {
        return Err(Error::InvalidResolution(format!(
            "half-cube case {case} needs even n so that x1 = 0 is a mesh plane (got {n})"
        )));
    }
    let lattice = Lattice { origin: [-1.0, -1.0, -1.0], extent: [2.0, 2.0, 1.0], cells: [n; 3] };
    Ok(lattice.build(
        |_| true,
        move |corners, _| {
            let top = corners.iter().all(|p| p[2] == 0.0);
            let cx = (corners[0][0] + corners[1][0] + corners[2][0]) / 3.0;
            let nu = top
                && match case {
                    HalfCubeCase::Empty => false,
                    HalfCubeCase::B0 => true,
                    HalfCubeCase::B0Plus => cx > 0.0,
                    HalfCubeCase::B0Minus => cx < 0.0,
                };
            if nu {
                BoundaryTag::Nu
            } else {
                BoundaryTag::Tau
            }
        },
    ))
}

/// Interior of `([-1,1]×[-1,0]×[-1,0]) ∪ ([-1,0]×[-1,1]×[0,1])` with `n`
/// cells per unit length. The bricks share the square `[-1,0]²×{0}`.
pub fn generate_two_brick(n: usize) -> Result<Mesh> {
    check_n(n)?;
    let lattice = Lattice { origin: [-1.0; 3], extent: [2.0; 3], cells: [2 * n; 3] };
    Ok(lattice.build(
        |c| {
            let lower = c[1] < 0.0 && c[2] < 0.0;
            let upper = c[0] < 0.0 && c[2] > 0.0;
            lower || upper
        },
        |_, _| BoundaryTag::Tau,
    ))
}

/// `(-2,2)² × (0,1)` minus the closed column `[-1,1]² × [0,1]`: a solid torus.
pub fn generate_torus_ring(n: usize) -> Result<Mesh> {
    check_n(n)?;
    let lattice = Lattice { origin: [-2.0, -2.0, 0.0], extent: [4.0, 4.0, 1.0], cells: [4 * n, 4 * n, n] };
    Ok(lattice.build(|c| !(c[0].abs() < 1.0 && c[1].abs() < 1.0), |_, _| BoundaryTag::Tau))
}

/// `(0,3)³` minus the closed cube `[1,2]³`: two boundary components.
pub fn generate_cavity_cube(n: usize) -> Result<Mesh> {
    check_n(n)?;
    let lattice = Lattice { origin: [0.0; 3], extent: [3.0; 3], cells: [3 * n; 3] };
    Ok(lattice.build(|c| !c.iter().all(|&x| x > 1.0 && x < 2.0), |_, _| BoundaryTag::Tau))
}

struct Lattice {
    origin: Point,
    extent: Point,
    cells: [usize; 3],
}

impl Lattice {
    fn coord(&self, idx: [usize; 3]) -> Point {
        let mut p = [0.0; 3];
        for d in 0..3 {
            // Exact at both ends of every axis.
            p[d] = self.origin[d] + self.extent[d] * (idx[d] as f64 / self.cells[d] as f64);
        }
        p
    }

    /// Keeps the cells whose centre satisfies `include`, Kuhn-splits them and
    /// tags every boundary triangle by `tag(corners, owner_centroid)`.
    fn build(
        &self,
        include: impl Fn(Point) -> bool,
        tag: impl Fn(&[Point; 3], Point) -> BoundaryTag,
    ) -> Mesh {
        let [nx, ny, nz] = self.cells;
        let mut cells = Vec::new();
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let lo = self.coord([i, j, k]);
                    let hi = self.coord([i + 1, j + 1, k + 1]);
                    let centre = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])];
                    if include(centre) {
                        cells.push([i, j, k]);
                    }
                }
            }
        }

        // Lattice points keyed by (k, j, i) so numbering is x-fastest.
        let mut ids: BTreeMap<[usize; 3], usize> = BTreeMap::new();
        for c in &cells {
            for dz in 0..2 {
                for dy in 0..2 {
                    for dx in 0..2 {
                        ids.insert([c[2] + dz, c[1] + dy, c[0] + dx], 0);
                    }
                }
            }
        }
        let mut vertices = Vec::with_capacity(ids.len());
        for (n, (key, id)) in ids.iter_mut().enumerate() {
            *id = n;
            vertices.push(self.coord([key[2], key[1], key[0]]));
        }

        let mut tets = Vec::with_capacity(6 * cells.len());
        for c in &cells {
            for perm in PERMUTATIONS {
                let mut idx = *c;
                let mut t = [0usize; 4];
                t[0] = ids[&[idx[2], idx[1], idx[0]]];
                for (s, &axis) in perm.iter().enumerate() {
                    idx[axis] += 1;
                    t[s + 1] = ids[&[idx[2], idx[1], idx[0]]];
                }
                let v = signed_volume(&vertices[t[0]], &vertices[t[1]], &vertices[t[2]], &vertices[t[3]]);
                if v < 0.0 {
                    t.swap(2, 3);
                }
                tets.push(t);
            }
        }

        let mut owner: BTreeMap<[usize; 3], (usize, usize)> = BTreeMap::new();
        for (ti, t) in tets.iter().enumerate() {
            for k in 0..4 {
                owner.entry(opposite_face(t, k)).or_insert((0, ti)).0 += 1;
            }
        }
        let mut boundary = Vec::new();
        for (f, (count, ti)) in owner {
            if count == 1 {
                let corners = f.map(|v| vertices[v]);
                let t = &tets[ti];
                let mut oc = [0.0; 3];
                for &v in t {
                    for d in 0..3 {
                        oc[d] += 0.25 * vertices[v][d];
                    }
                }
                boundary.push(BoundaryTri { vertices: f, tag: tag(&corners, oc) });
            }
        }
        Mesh::build(vertices, tets, boundary)
    }
}
