use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;
mod setup;

use setup::MeshArgs;

#[derive(Parser, Debug)]
#[command(name = "mixbc", version, about = "Discrete Maxwell toolkit for mixed tangential/normal boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate or check meshes
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Helmholtz decomposition of a sample field
    Decompose(DecomposeArgs),
    /// Dimension of the harmonic field space
    Cohomology(CohomologyArgs),
    /// Static Maxwell problem over a sequence of mesh levels
    SolveStatic(SolveArgs),
    /// Poincaré and Maxwell constants per mesh level
    Constants(ConstantsArgs),
    /// Spectral potential checks on a periodic grid
    #[command(subcommand)]
    Fourier(FourierCommand),
}

#[derive(Subcommand, Debug)]
enum MeshCommand {
    Gen(GenArgs),
    Validate(ValidateArgs),
}

#[derive(Subcommand, Debug)]
enum FourierCommand {
    Check(FourierArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    /// Red refinements applied after generation
    #[arg(long, default_value_t = 0)]
    refine: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// meshlite file
    file: PathBuf,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    /// identity, scalar:λ, diag:a,b,c, random or a file of six reals per tet
    #[arg(long, default_value = "identity")]
    eps: String,
    #[arg(long, value_enum, default_value_t = FieldKind::Random)]
    field: FieldKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix for `<prefix>.csv` (and `<prefix>.vtk` with --vtk)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, requires = "out")]
    vtk: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FieldKind {
    /// Independent random values at every quadrature point
    Random,
    /// The smooth field (sin πy, sin πz, sin πx)
    Smooth,
}

#[derive(Args, Debug)]
struct CohomologyArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long, default_value = "identity")]
    eps: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long, default_value = "identity")]
    eps: String,
    #[arg(long, value_enum, default_value_t = Case::Manufactured)]
    case: Case,
    /// Cell data for `--case file`: one line `fx fy fz g` per tet
    #[arg(long, required_if_eq("case", "file"))]
    data: Option<PathBuf>,
    /// Number of additional levels, each halving the mesh size
    #[arg(long, default_value_t = 0)]
    refine: u32,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix for `<prefix>_residuals.csv`, `<prefix>_errors.csv` and VTK files
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, requires = "out")]
    vtk: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Case {
    Manufactured,
    Zero,
    File,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[command(flatten)]
    mesh: MeshArgs,
    #[arg(long, default_value = "identity")]
    eps: String,
    /// Number of mesh levels
    #[arg(long, default_value_t = 1)]
    levels: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FourierArgs {
    /// Grid points per direction (power of two, at least 4)
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest accepted residual
    #[arg(long, default_value_t = 1e-11)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Everything that ends a run early.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(mixbc::Error),
    /// A completed computation whose result fails its check.
    Check(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(mixbc::Error::NotConverged { .. }) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(s) | Failure::Check(s) => f.write_str(s),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<mixbc::Error> for Failure {
    fn from(e: mixbc::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(mixbc::Error::Io(e))
    }
}

/// Normalized run configuration, echoed to stderr before any work.
pub struct RunConfig {
    command: &'static str,
    entries: Vec<(&'static str, String)>,
}

impl RunConfig {
    pub fn new(command: &'static str) -> Self {
        RunConfig { command, entries: Vec::new() }
    }

    pub fn with(mut self, key: &'static str, value: impl fmt::Display) -> Self {
        self.entries.push((key, value.to_string()));
        self
    }

    pub fn flag(mut self, key: &'static str) -> Self {
        self.entries.push((key, String::new()));
        self
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.command)?;
        for (k, v) in &self.entries {
            if v.is_empty() {
                write!(f, " --{k}")?;
            } else {
                write!(f, " --{k} {v}")?;
            }
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Mesh(MeshCommand::Gen(a)) => commands::mesh_gen(&a),
        Command::Mesh(MeshCommand::Validate(a)) => commands::mesh_validate(&a),
        Command::Decompose(a) => commands::decompose(&a),
        Command::Cohomology(a) => commands::cohomology(&a),
        Command::SolveStatic(a) => commands::solve_static(&a),
        Command::Constants(a) => commands::constants(&a),
        Command::Fourier(FourierCommand::Check(a)) => commands::fourier_check(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
