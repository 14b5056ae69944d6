//! Mesh and coefficient selection shared by the subcommands.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use mixbc::mesh::{load_meshlite, refine_uniform};
use mixbc::{DomainSpec, MaterialField, Mesh};
use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::Failure;

#[derive(Args, Debug, Clone)]
pub struct MeshArgs {
    /// meshlite file or domain spec such as `cube:2:tau=-x,-y`
    #[arg(long, conflicts_with = "kind")]
    pub mesh: Option<String>,
    /// cube, half_cube, two_brick, torus_ring or cavity_cube
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Tangential part: face list (`-x,+y`, `all`, `none`) or `lower` for two_brick
    #[arg(long, allow_hyphen_values = true, conflicts_with = "nu")]
    pub tau: Option<String>,
    /// Normal part: face list for cubes, `b0`, `b0plus`, `b0minus` or `empty` for half_cube
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
}

#[derive(Clone, Debug)]
pub enum MeshSource {
    Spec(DomainSpec),
    File(PathBuf),
}

impl MeshArgs {
    pub fn source(&self) -> Result<MeshSource, Failure> {
        if let Some(m) = &self.mesh {
            if Path::new(m).is_file() {
                return Ok(MeshSource::File(PathBuf::from(m)));
            }
            return Ok(MeshSource::Spec(DomainSpec::parse(m)?));
        }
        let kind = self
            .kind
            .as_deref()
            .ok_or_else(|| Failure::Usage("either --mesh or --kind is required".into()))?;
        let rule = match (&self.tau, &self.nu) {
            (Some(t), _) if t == "lower" => "lower".to_string(),
            (Some(t), _) => format!("tau={t}"),
            (None, Some(v)) => format!("nu={v}"),
            (None, None) => String::new(),
        };
        Ok(MeshSource::Spec(DomainSpec::from_parts(kind, self.n, &rule)?))
    }
}

impl MeshSource {
    /// Level `l` regenerates a domain spec at `n·2^l`; a file is red-refined
    /// `l` times.
    pub fn build(&self, level: u32) -> Result<Mesh, Failure> {
        match self {
            MeshSource::Spec(spec) => {
                let mut s = spec.clone();
                s.n *= 1 << level;
                Ok(s.build()?)
            }
            MeshSource::File(path) => {
                let mut m = load_meshlite(&std::fs::read_to_string(path)?)?;
                for _ in 0..level {
                    m = refine_uniform(&m);
                }
                Ok(m)
            }
        }
    }
}

impl fmt::Display for MeshSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshSource::Spec(s) => write!(f, "{s}"),
            MeshSource::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// `identity`, `scalar:λ`, `diag:a,b,c`, `random` (seeded) or a file of six
/// reals per tet.
#[derive(Clone, Debug, PartialEq)]
pub enum EpsSpec {
    Identity,
    Scalar(f64),
    Diag([f64; 3]),
    Random,
    File(PathBuf),
}

impl EpsSpec {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        let bad = || Failure::Usage(format!("cannot parse eps `{s}`"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        Ok(match s {
            "identity" => EpsSpec::Identity,
            "random" => EpsSpec::Random,
            _ if s.starts_with("scalar:") => EpsSpec::Scalar(num(&s[7..])?),
            _ if s.starts_with("diag:") => {
                let v: Vec<f64> = s[5..].split(',').map(num).collect::<Result<_, _>>()?;
                if v.len() != 3 {
                    return Err(bad());
                }
                EpsSpec::Diag([v[0], v[1], v[2]])
            }
            _ if Path::new(s).is_file() => EpsSpec::File(PathBuf::from(s)),
            _ => return Err(bad()),
        })
    }

    pub fn build(&self, mesh: &Mesh, rng: &mut ChaCha8Rng) -> Result<MaterialField, Failure> {
        Ok(match self {
            EpsSpec::Identity => MaterialField::identity(mesh),
            EpsSpec::Scalar(v) => MaterialField::scalar(mesh, *v)?,
            EpsSpec::Diag(d) => MaterialField::constant(mesh, Matrix3::from_diagonal(&Vector3::from(*d)))?,
            EpsSpec::Random => {
                let cells = (0..mesh.num_tets())
                    .map(|_| {
                        let a = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
                        let s = a * a.transpose() + Matrix3::identity() * 0.5;
                        (s + s.transpose()) * 0.5
                    })
                    .collect();
                MaterialField::from_cells(mesh, cells)?
            }
            EpsSpec::File(p) => MaterialField::parse_cells(mesh, &std::fs::read_to_string(p)?)?,
        })
    }
}

impl fmt::Display for EpsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsSpec::Identity => f.write_str("identity"),
            EpsSpec::Scalar(v) => write!(f, "scalar:{v:?}"),
            EpsSpec::Diag(d) => write!(f, "diag:{:?},{:?},{:?}", d[0], d[1], d[2]),
            EpsSpec::Random => f.write_str("random"),
            EpsSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// The single matrix of a cellwise-constant field, if every cell agrees.
pub fn uniform_matrix(eps: &MaterialField) -> Option<Matrix3<f64>> {
    let first = *eps.cells().first()?;
    eps.cells().iter().all(|m| *m == first).then_some(first)
}
