//! Piecewise constant coefficient fields.

use nalgebra::{Matrix3, SymmetricEigen};

use crate::error::{Error, Result};
use crate::mesh::Mesh;

const SYMMETRY_TOL: f64 = 1e-14;

/// One symmetric positive definite 3×3 matrix per tetrahedron.
#[derive(Clone, Debug, PartialEq)]
pub struct MaterialField {
    cells: Vec<Matrix3<f64>>,
    inverses: Vec<Matrix3<f64>>,
    lower_bound: f64,
}

impl MaterialField {
    pub fn identity(mesh: &Mesh) -> Self {
        Self::scalar(mesh, 1.0).expect("1 is positive")
    }

    pub fn scalar(mesh: &Mesh, value: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NotPositiveDefinite { cell: 0, min_eigenvalue: value });
        }
        let m = Matrix3::identity() * value;
        let inv = Matrix3::identity() * (1.0 / value);
        Ok(MaterialField {
            cells: vec![m; mesh.num_tets()],
            inverses: vec![inv; mesh.num_tets()],
            lower_bound: value,
        })
    }

    /// Same matrix in every cell.
    pub fn constant(mesh: &Mesh, m: Matrix3<f64>) -> Result<Self> {
        Self::from_cells(mesh, vec![m; mesh.num_tets()])
    }

    pub fn from_cells(mesh: &Mesh, cells: Vec<Matrix3<f64>>) -> Result<Self> {
        if cells.len() != mesh.num_tets() {
            return Err(Error::DimensionMismatch(format!(
                "{} material matrices for {} tets",
                cells.len(),
                mesh.num_tets()
            )));
        }
        let mut lower = f64::INFINITY;
        let mut inverses = Vec::with_capacity(cells.len());
        for (i, m) in cells.iter().enumerate() {
            let dev = (m - m.transpose()).amax();
            if !(dev <= SYMMETRY_TOL) {
                return Err(Error::NonSymmetric { cell: i, deviation: dev });
            }
            let min = min_eigenvalue(m);
            if !(min > 0.0) {
                return Err(Error::NotPositiveDefinite { cell: i, min_eigenvalue: min });
            }
            lower = lower.min(min);
            inverses.push(m.try_inverse().ok_or(Error::NotPositiveDefinite { cell: i, min_eigenvalue: min })?);
        }
        if cells.is_empty() {
            lower = 1.0;
        }
        Ok(MaterialField { cells, inverses, lower_bound: lower })
    }

    /// Reads one line of six reals `a11 a12 a13 a22 a23 a33` per tet.
    pub fn parse_cells(mesh: &Mesh, text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::MalformedHeader { line: no + 1, msg: "expected six reals".into() })?;
            if vals.len() != 6 {
                return Err(Error::MalformedHeader { line: no + 1, msg: "expected six reals".into() });
            }
            let [a11, a12, a13, a22, a23, a33] = [vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]];
            cells.push(Matrix3::new(a11, a12, a13, a12, a22, a23, a13, a23, a33));
        }
        Self::from_cells(mesh, cells)
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, t: usize) -> &Matrix3<f64> {
        &self.cells[t]
    }

    pub fn inverse(&self, t: usize) -> &Matrix3<f64> {
        &self.inverses[t]
    }

    pub fn cells(&self) -> &[Matrix3<f64>] {
        &self.cells
    }

    /// Uniform lower eigenvalue bound `c₀`.
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    /// Largest eigenvalue over all cells.
    pub fn upper_bound(&self) -> f64 {
        self.cells
            .iter()
            .map(|m| SymmetricEigen::new(*m).eigenvalues.max())
            .fold(0.0, f64::max)
    }

    /// The field of inverse matrices `ε⁻¹`.
    pub fn inverted(&self) -> Self {
        let upper = self.cells.iter().map(|m| SymmetricEigen::new(*m).eigenvalues.max()).fold(0.0, f64::max);
        MaterialField { cells: self.inverses.clone(), inverses: self.cells.clone(), lower_bound: 1.0 / upper }
    }

    /// `λ·ε`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::NotPositiveDefinite { cell: 0, min_eigenvalue: factor });
        }
        Ok(MaterialField {
            cells: self.cells.iter().map(|m| m * factor).collect(),
            inverses: self.inverses.iter().map(|m| m / factor).collect(),
            lower_bound: self.lower_bound * factor,
        })
    }

    pub fn apply(&self, t: usize, v: &[f64; 3]) -> [f64; 3] {
        mul3(&self.cells[t], v)
    }

    pub fn apply_inverse(&self, t: usize, v: &[f64; 3]) -> [f64; 3] {
        mul3(&self.inverses[t], v)
    }
}

/// Returns `c₀`, the smallest eigenvalue over all cells.
pub fn admissibility_check(field: &MaterialField) -> Result<f64> {
    let mut lower = f64::INFINITY;
    let mut at = 0;
    for (i, m) in field.cells.iter().enumerate() {
        let e = min_eigenvalue(m);
        if e < lower {
            lower = e;
            at = i;
        }
    }
    if field.cells.is_empty() {
        return Ok(field.lower_bound);
    }
    if !(lower > 0.0) {
        return Err(Error::NotPositiveDefinite { cell: at, min_eigenvalue: lower });
    }
    Ok(lower)
}

fn min_eigenvalue(m: &Matrix3<f64>) -> f64 {
    if m.iter().any(|x| !x.is_finite()) {
        return f64::NAN;
    }
    // Exact for multiples of the identity and for diagonal matrices.
    if m[(0, 1)] == 0.0 && m[(0, 2)] == 0.0 && m[(1, 2)] == 0.0 {
        return m[(0, 0)].min(m[(1, 1)]).min(m[(2, 2)]);
    }
    SymmetricEigen::new(*m).eigenvalues.min()
}

pub(crate) fn mul3(m: &Matrix3<f64>, v: &[f64; 3]) -> [f64; 3] {
    [
        m[(0, 0)] * v[0] + m[(0, 1)] * v[1] + m[(0, 2)] * v[2],
        m[(1, 0)] * v[0] + m[(1, 1)] * v[1] + m[(1, 2)] * v[2],
        m[(2, 0)] * v[0] + m[(2, 1)] * v[1] + m[(2, 2)] * v[2],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_cube, BoxFace};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mesh() -> Mesh {
        generate_cube(1, &BoxFace::ALL.into_iter().collect()).unwrap()
    }

    /// Smallest root of det(A − λI) by bisection on the characteristic cubic.
    fn cubic_min_root(a: &Matrix3<f64>) -> f64 {
        let tr = a.trace();
        let m2 = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)] - a[(0, 2)] * a[(2, 0)]
            + a[(1, 1)] * a[(2, 2)]
            - a[(1, 2)] * a[(2, 1)];
        let det = a.determinant();
        let p = |l: f64| -l * l * l + tr * l * l - m2 * l + det;
        // Gershgorin bound below every eigenvalue.
        let mut lo = (0..3)
            .map(|i| a[(i, i)] - (0..3).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
            - 1.0;
        // p(lo) > 0 for lo below the spectrum; step up until the sign flips.
        let mut hi = lo;
        let step = (tr.abs() + 1.0) / 4096.0;
        while p(hi) > 0.0 {
            lo = hi;
            hi += step;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn identity_and_scalar_bounds() {
        let m = mesh();
        assert_eq!(admissibility_check(&MaterialField::identity(&m)).unwrap(), 1.0);
        assert_eq!(admissibility_check(&MaterialField::scalar(&m, 2.0).unwrap()).unwrap(), 2.0);
        assert_eq!(MaterialField::scalar(&m, 2.0).unwrap().cell(3), &(Matrix3::identity() * 2.0));
    }

    #[test]
    fn diagonal_cells() {
        let m = mesh();
        let f = MaterialField::constant(&m, Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 2.0, 3.0))).unwrap();
        assert_eq!(admissibility_check(&f).unwrap(), 1.0);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = mesh();
        let bad = Matrix3::new(1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(MaterialField::constant(&m, bad), Err(Error::NonSymmetric { .. })));
    }

    #[test]
    fn rejects_indefinite() {
        let m = mesh();
        let bad = Matrix3::new(1.0, 2.0, 0.0, 2.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(MaterialField::constant(&m, bad), Err(Error::NotPositiveDefinite { .. })));
        assert!(MaterialField::scalar(&m, 0.0).is_err());
    }

    #[test]
    fn random_spd_matches_characteristic_polynomial() {
        let m = mesh();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cells: Vec<_> = (0..m.num_tets())
            .map(|_| {
                let a = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
                a * a.transpose() + Matrix3::identity() * 0.3
            })
            .collect();
        let oracle = cells.iter().map(cubic_min_root).fold(f64::INFINITY, f64::min);
        let f = MaterialField::from_cells(&m, cells).unwrap();
        let c0 = admissibility_check(&f).unwrap();
        assert!((c0 - oracle).abs() <= 1e-12 * oracle.max(1.0), "{c0} vs {oracle}");
    }

    #[test]
    fn parse_six_reals() {
        let m = mesh();
        let text = "2 0 0 2 0 2\n".repeat(m.num_tets());
        let f = MaterialField::parse_cells(&m, &text).unwrap();
        assert_eq!(f.lower_bound(), 2.0);
        assert!(MaterialField::parse_cells(&m, "1 0 0 1 0\n").is_err());
    }
}
