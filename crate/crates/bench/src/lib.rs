//! Fixtures shared by the kernel benchmarks.

use mixbc::fespace::DofMaps;
use mixbc::{assembly, CsrMatrix, DomainSpec, MaterialField, Mesh, Side};

/// Unit cube with `n` cells per side and the tangential condition on `x = 0`.
pub fn cube(n: usize) -> Mesh {
    DomainSpec::parse(&format!("cube:{n}:tau=-x")).unwrap().build().unwrap()
}

/// Nodal stiffness restricted to the nodes off the tangential faces, with a
/// right-hand side of ones.
pub fn nodal_system(mesh: &Mesh) -> (CsrMatrix, Vec<f64>) {
    let eps = MaterialField::identity(mesh);
    let k = assembly::stiffness_node(mesh, &eps);
    let maps = DofMaps::build(mesh);
    let free = maps.nodal(Side::Tau).free();
    let a = k.submatrix(free, free);
    let b = vec![1.0; free.len()];
    (a, b)
}
