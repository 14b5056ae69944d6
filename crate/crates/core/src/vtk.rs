//! Legacy ASCII VTK output of tetrahedral meshes with per-cell data.

use std::fmt::Write;

use crate::assembly::QuadField;
use crate::mesh::Mesh;

/// Per-cell arrays attached to a VTK file.
#[derive(Clone, Debug, Default)]
pub struct CellData {
    pub vectors: Vec<(String, Vec<[f64; 3]>)>,
    pub scalars: Vec<(String, Vec<f64>)>,
}

impl CellData {
    /// Adds the cell means of a quadrature field.
    pub fn with_field(mut self, name: &str, field: &QuadField) -> Self {
        let means = (0..field.num_tets()).map(|t| field.cell_mean(t)).collect();
        self.vectors.push((name.to_string(), means));
        self
    }

    pub fn with_scalar(mut self, name: &str, values: Vec<f64>) -> Self {
        self.scalars.push((name.to_string(), values));
        self
    }
}

/// `UNSTRUCTURED_GRID` with cell type 10 (tetrahedron).
pub fn to_vtk(mesh: &Mesh, title: &str, data: &CellData) -> String {
    let mut s = String::new();
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(s, "# vtk DataFile Version 2.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID").unwrap();
    writeln!(s, "POINTS {} double", mesh.num_vertices()).unwrap();
    for p in mesh.vertices() {
        writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]).unwrap();
    }
    writeln!(s, "CELLS {} {}", mesh.num_tets(), 5 * mesh.num_tets()).unwrap();
    for t in mesh.tets() {
        writeln!(s, "4 {} {} {} {}", t[0], t[1], t[2], t[3]).unwrap();
    }
    writeln!(s, "CELL_TYPES {}", mesh.num_tets()).unwrap();
    for _ in mesh.tets() {
        writeln!(s, "10").unwrap();
    }
    if !data.vectors.is_empty() || !data.scalars.is_empty() {
        writeln!(s, "CELL_DATA {}", mesh.num_tets()).unwrap();
    }
    for (name, vals) in &data.vectors {
        assert_eq!(vals.len(), mesh.num_tets(), "cell array {name}");
        writeln!(s, "VECTORS {} double", sanitize(name)).unwrap();
        for v in vals {
            writeln!(s, "{:?} {:?} {:?}", v[0], v[1], v[2]).unwrap();
        }
    }
    for (name, vals) in &data.scalars {
        assert_eq!(vals.len(), mesh.num_tets(), "cell array {name}");
        writeln!(s, "SCALARS {} double 1\nLOOKUP_TABLE default", sanitize(name)).unwrap();
        for v in vals {
            writeln!(s, "{v:?}").unwrap();
        }
    }
    s
}

fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_cube, BoxFace};

    #[test]
    fn counts_and_sections() {
        let m = generate_cube(1, &BoxFace::ALL.into_iter().collect()).unwrap();
        let f = QuadField::from_fn(&m, |x| x);
        let text = to_vtk(&m, "unit cube", &CellData::default().with_field("E field", &f));
        assert!(text.starts_with("# vtk DataFile Version 2.0\nunit cube\nASCII\n"));
        assert!(text.contains("POINTS 8 double"));
        assert!(text.contains("CELLS 6 30"));
        assert_eq!(text.lines().filter(|l| *l == "10").count(), 6);
        assert!(text.contains("CELL_DATA 6\nVECTORS E_field double"));
    }
}
