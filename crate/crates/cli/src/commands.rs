use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use mixbc::decompose::cohomology_basis;
use mixbc::fourier::{self, FourierCheck};
use mixbc::mesh::{parse_meshlite, refine_uniform, save_meshlite, validate_parts};
use mixbc::statics::maxwell_constant;
use mixbc::vtk::{to_vtk, CellData};
use mixbc::{BoundaryTag, Decomposer, DofMaps, Mesh, QuadField, ScalarQuadField, StaticProblem, StaticSolver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::{write_atomic, Cell, Csv};
use crate::setup::{uniform_matrix, EpsSpec};
use crate::{
    Case, CohomologyArgs, ConstantsArgs, DecomposeArgs, Failure, FieldKind, FourierArgs, GenArgs, RunConfig,
    SolveArgs, ValidateArgs,
};

fn smooth_field(p: [f64; 3]) -> [f64; 3] {
    [(PI * p[1]).sin(), (PI * p[2]).sin(), (PI * p[0]).sin()]
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn echo(config: &RunConfig) {
    eprintln!("config: {config}");
}

pub fn mesh_gen(a: &GenArgs) -> Result<(), Failure> {
    let source = a.mesh.source()?;
    echo(&RunConfig::new("mesh gen").with("mesh", &source).with("refine", a.refine).with("out", a.out.display()));
    let mut mesh = source.build(0)?;
    for _ in 0..a.refine {
        mesh = refine_uniform(&mesh);
    }
    write_atomic(&a.out, &save_meshlite(&mesh))?;
    let mut csv = Csv::new("vertices,edges,faces,tets,tau_triangles,nu_triangles");
    csv.row(&[
        Cell::Int(mesh.num_vertices()),
        Cell::Int(mesh.num_edges()),
        Cell::Int(mesh.num_faces()),
        Cell::Int(mesh.num_tets()),
        Cell::Int(mesh.count_tag(BoundaryTag::Tau)),
        Cell::Int(mesh.count_tag(BoundaryTag::Nu)),
    ]);
    print!("{}", csv.as_str());
    Ok(())
}

pub fn mesh_validate(a: &ValidateArgs) -> Result<(), Failure> {
    echo(&RunConfig::new("mesh validate").with("file", a.file.display()));
    let parts = parse_meshlite(&std::fs::read_to_string(&a.file)?)?;
    let report = validate_parts(&parts.vertices, &parts.tets, &parts.boundary);
    println!("valid,{}", report.is_valid());
    println!("vertices,{}", parts.vertices.len());
    println!("tets,{}", parts.tets.len());
    println!("boundary_triangles,{}", parts.boundary.len());
    for v in &report.violations {
        println!("violation,{:?},{}", v.kind, v.message.replace(',', ";"));
    }
    if report.is_valid() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} violation(s)", report.violations.len())))
    }
}

pub fn decompose(a: &DecomposeArgs) -> Result<(), Failure> {
    let source = a.mesh.source()?;
    let eps_spec = EpsSpec::parse(&a.eps)?;
    let mut config = RunConfig::new("decompose")
        .with("mesh", &source)
        .with("eps", &eps_spec)
        .with("field", format!("{:?}", a.field).to_lowercase())
        .with("seed", a.seed);
    if let Some(out) = &a.out {
        config = config.with("out", out.display());
    }
    if a.vtk {
        config = config.flag("vtk");
    }
    echo(&config);

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mesh = source.build(0)?;
    let eps = eps_spec.build(&mesh, &mut rng)?;
    let e = match a.field {
        FieldKind::Smooth => QuadField::from_fn(&mesh, smooth_field),
        FieldKind::Random => {
            let mut f = QuadField::zeros(mesh.num_tets());
            for cell in &mut f.values {
                for p in cell.iter_mut() {
                    *p = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                }
            }
            f
        }
    };
    let dec = Decomposer::new(&mesh, &eps)?;
    let d = dec.helmholtz(&e)?;
    let [ng, nh, nr] = d.component_norms(&mesh, &eps);
    let diag = &d.diagnostics;
    let mut csv = Csv::new(
        "dim,norm_e,norm_grad,norm_harmonic,norm_rot,grad_vs_harmonic,grad_vs_rot,harmonic_vs_rot,reconstruction,moment_defect",
    );
    csv.row(&[
        Cell::Int(dec.cohomology.dim),
        Cell::Float(e.norm(&mesh, Some(&eps))),
        Cell::Float(ng),
        Cell::Float(nh),
        Cell::Float(nr),
        Cell::Float(diag.grad_vs_harmonic),
        Cell::Float(diag.grad_vs_rot),
        Cell::Float(diag.harmonic_vs_rot),
        Cell::Float(diag.reconstruction),
        Cell::Float(diag.moment_defect),
    ]);
    print!("{}", csv.as_str());
    if let Some(out) = &a.out {
        write_atomic(&suffixed(out, ".csv"), csv.as_str())?;
        if a.vtk {
            let data = CellData::default()
                .with_field("E", &e)
                .with_field("grad_u", &d.grad_u)
                .with_field("harmonic", &d.harmonic)
                .with_field("rot_part", &d.rot_part);
            write_atomic(&suffixed(out, ".vtk"), &to_vtk(&mesh, "mixbc decompose", &data))?;
        }
    }
    Ok(())
}

pub fn cohomology(a: &CohomologyArgs) -> Result<(), Failure> {
    let source = a.mesh.source()?;
    let eps_spec = EpsSpec::parse(&a.eps)?;
    echo(&RunConfig::new("cohomology").with("mesh", &source).with("eps", &eps_spec).with("seed", a.seed));
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mesh = source.build(0)?;
    let eps = eps_spec.build(&mesh, &mut rng)?;
    let maps = DofMaps::build(&mesh);
    let basis = cohomology_basis(&mesh, &eps, &maps)?;
    println!("dim,{}", basis.dim);
    println!("method,{}", basis.method);
    println!("free_edges,{}", maps.edge(mixbc::Side::Tau).num_free());
    Ok(())
}

/// `div(εE)` of the smooth field for a constant matrix `ε`.
fn smooth_field_div(eps: nalgebra::Matrix3<f64>) -> impl Fn([f64; 3]) -> f64 {
    move |p| {
        PI * (eps[(1, 0)] * (PI * p[1]).cos() + eps[(2, 1)] * (PI * p[2]).cos() + eps[(0, 2)] * (PI * p[0]).cos())
    }
}

fn read_cell_data(path: &Path, mesh: &Mesh) -> Result<(QuadField, ScalarQuadField), Failure> {
    let text = std::fs::read_to_string(path)?;
    let mut f = Vec::new();
    let mut g = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::Usage(format!("{}:{}: expected four reals", path.display(), no + 1)))?;
        if v.len() != 4 {
            return Err(Failure::Usage(format!("{}:{}: expected four reals", path.display(), no + 1)));
        }
        f.push([v[0], v[1], v[2]]);
        g.push(v[3]);
    }
    if f.len() != mesh.num_tets() {
        return Err(Failure::Usage(format!("{} data rows for {} tets", f.len(), mesh.num_tets())));
    }
    Ok((QuadField::from_cell_constants(&f), ScalarQuadField::from_cell_constants(&g)))
}

pub fn solve_static(a: &SolveArgs) -> Result<(), Failure> {
    let source = a.mesh.source()?;
    let eps_spec = EpsSpec::parse(&a.eps)?;
    let mut config = RunConfig::new("solve-static")
        .with("mesh", &source)
        .with("eps", &eps_spec)
        .with("case", format!("{:?}", a.case).to_lowercase());
    if let Some(d) = &a.data {
        config = config.with("data", d.display());
    }
    config = config.with("refine", a.refine).with("tol", format!("{:e}", a.tol)).with("seed", a.seed);
    if let Some(out) = &a.out {
        config = config.with("out", out.display());
    }
    if a.vtk {
        config = config.flag("vtk");
    }
    echo(&config);
    if a.case == Case::File && a.refine > 0 {
        return Err(Failure::Usage("--case file holds data for one mesh; use --refine 0".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut residuals =
        Csv::new("level,tets,h,curl,divergence,normal,tangential,moments,compatibility,energy_norm,data_norm");
    let mut errors = Csv::new("level,h,l2_error,ratio");
    let mut last_error: Option<f64> = None;
    let mut unconverged = None;
    for level in 0..=a.refine {
        let mesh = source.build(level)?;
        let eps = eps_spec.build(&mesh, &mut rng)?;
        let solver = StaticSolver::new(&mesh, &eps)?;
        let problem = match a.case {
            Case::Manufactured => {
                let m = uniform_matrix(&eps)
                    .ok_or_else(|| Failure::Usage("the manufactured case needs a uniform eps".into()))?;
                solver.manufactured(smooth_field, smooth_field_div(m))
            }
            Case::Zero => StaticProblem::homogeneous(&mesh, &eps, solver.cohomology_dim()),
            Case::File => {
                let path = a.data.as_ref().expect("clap requires --data for --case file");
                let (f, g) = read_cell_data(path, &mesh)?;
                let mut p = StaticProblem::homogeneous(&mesh, &eps, solver.cohomology_dim());
                p.f = f;
                p.g = g;
                p
            }
        };
        let sol = solver.solve(&problem, a.tol)?;
        if !sol.reports[0].converged && unconverged.is_none() {
            unconverged = Some(sol.reports[0].clone());
        }
        let h = mesh.max_edge_length();
        let r = &sol.residuals;
        let c = &sol.compatibility;
        residuals.row(&[
            Cell::Int(level as usize),
            Cell::Int(mesh.num_tets()),
            Cell::Float(h),
            Cell::Float(r.curl),
            Cell::Float(r.divergence),
            Cell::Float(r.normal),
            Cell::Float(r.tangential),
            Cell::Float(r.moments),
            Cell::Float(c.curl_residual.max(c.constant_residual)),
            Cell::Float(sol.energy_norm),
            Cell::Float(sol.data_norm),
        ]);
        let mut data = CellData::default().with_field("E", &sol.field);
        if a.case == Case::Manufactured {
            let exact = QuadField::from_fn(&mesh, smooth_field);
            let err = exact.sub(&sol.field).norm(&mesh, None);
            let ratio = last_error.map_or(Cell::Text(String::new()), |prev| Cell::Float(err / prev));
            errors.row(&[Cell::Int(level as usize), Cell::Float(h), Cell::Float(err), ratio]);
            last_error = Some(err);
            data = data.with_field("E_exact", &exact);
        }
        if let (Some(out), true) = (&a.out, a.vtk) {
            let path = suffixed(out, &format!("_level{level}.vtk"));
            write_atomic(&path, &to_vtk(&mesh, &format!("mixbc solve-static level {level}"), &data))?;
        }
    }

    print!("{}", residuals.as_str());
    if a.case == Case::Manufactured {
        print!("\n{}", errors.as_str());
    }
    if let Some(out) = &a.out {
        write_atomic(&suffixed(out, "_residuals.csv"), residuals.as_str())?;
        if a.case == Case::Manufactured {
            write_atomic(&suffixed(out, "_errors.csv"), errors.as_str())?;
        }
    }
    match unconverged {
        Some(report) => Err(mixbc::Error::not_converged(&report, None).into()),
        None => Ok(()),
    }
}

pub fn constants(a: &ConstantsArgs) -> Result<(), Failure> {
    let source = a.mesh.source()?;
    let eps_spec = EpsSpec::parse(&a.eps)?;
    let mut config = RunConfig::new("constants")
        .with("mesh", &source)
        .with("eps", &eps_spec)
        .with("levels", a.levels)
        .with("seed", a.seed);
    if let Some(out) = &a.out {
        config = config.with("out", out.display());
    }
    echo(&config);
    if a.levels == 0 {
        return Err(Failure::Usage("--levels must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut csv = Csv::new("level,h,free_nodes,free_edges,lambda_nodal,c_p,lambda_curl,c_m,c0");
    for level in 0..a.levels {
        let mesh = source.build(level)?;
        let eps = eps_spec.build(&mesh, &mut rng)?;
        let r = maxwell_constant(&Decomposer::new(&mesh, &eps)?)?;
        csv.row(&[
            Cell::Int(level as usize),
            Cell::Float(mesh.max_edge_length()),
            Cell::Int(r.free_nodes),
            Cell::Int(r.free_edges),
            Cell::Float(r.lambda_nodal),
            Cell::Float(r.c_p),
            Cell::Float(r.lambda_curl),
            Cell::Float(r.c_m),
            Cell::Float(r.c0),
        ]);
    }
    print!("{}", csv.as_str());
    if let Some(out) = &a.out {
        write_atomic(out, csv.as_str())?;
    }
    Ok(())
}

pub fn fourier_check(a: &FourierArgs) -> Result<(), Failure> {
    let mut config = RunConfig::new("fourier check")
        .with("n", a.n)
        .with("trials", a.trials)
        .with("seed", a.seed)
        .with("tol", format!("{:e}", a.tol));
    if let Some(out) = &a.out {
        config = config.with("out", out.display());
    }
    echo(&config);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let check = fourier::check(a.n, a.trials, &mut rng)?;
    let text = format!("{}\n{}\n", FourierCheck::csv_header(), check.csv_row());
    print!("{text}");
    if let Some(out) = &a.out {
        write_atomic(out, &text)?;
    }
    let worst = check.max_residual();
    if worst > a.tol {
        return Err(Failure::Check(format!("largest residual {worst:e} exceeds {:e}", a.tol)));
    }
    Ok(())
}
