use num_complex::Complex64;

use super::grid::{PeriodicGrid, VectorField};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn norm2(xi: &[f64; 3]) -> f64 {
    xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]
}

/// Curl-free `V` with `div V = h − mean(h)`: `V̂ = −iξ ĥ/|ξ|²`.
pub fn div_potential(grid: &PeriodicGrid, h: &[f64]) -> VectorField {
    let hh = grid.forward(h);
    [0, 1, 2].map(|d| grid.inverse_real(&grid.multiply(&hh, |xi, c| -I * xi[d] * c / norm2(&xi))))
}

/// Divergence-free `A` whose curl is the solenoidal mean-free part of `H`:
/// `Â = i ξ × Ĥ/|ξ|²`.
pub fn curl_potential(grid: &PeriodicGrid, h: &VectorField) -> VectorField {
    let hh = [0, 1, 2].map(|d| grid.forward(&h[d]));
    let comp = |a: usize, b: usize| -> Vec<f64> {
        let spec: Vec<Complex64> = (0..grid.len())
            .map(|i| match grid.frequency(i) {
                Some(xi) => I * (xi[a] * hh[b][i] - xi[b] * hh[a][i]) / norm2(&xi),
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        grid.inverse_real(&spec)
    };
    [comp(1, 2), comp(2, 0), comp(0, 1)]
}

/// Mean-free `u` whose gradient is the curl-free part of `E`:
/// `û = −i ξ·Ê/|ξ|²`.
pub fn grad_potential(grid: &PeriodicGrid, e: &VectorField) -> Vec<f64> {
    let eh = [0, 1, 2].map(|d| grid.forward(&e[d]));
    let spec: Vec<Complex64> = (0..grid.len())
        .map(|i| match grid.frequency(i) {
            Some(xi) => -I * (xi[0] * eh[0][i] + xi[1] * eh[1][i] + xi[2] * eh[2][i]) / norm2(&xi),
            None => Complex64::new(0.0, 0.0),
        })
        .collect();
    grid.inverse_real(&spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::grid::vector_sub;
    use std::f64::consts::PI;

    #[test]
    fn single_cosine_divergence_potential() {
        let g = PeriodicGrid::new(8).unwrap();
        let h = g.sample(|x| (2.0 * PI * x[0]).cos());
        let v = div_potential(&g, &h);
        let expect = g.sample_vector(|x| [(2.0 * PI * x[0]).sin() / (2.0 * PI), 0.0, 0.0]);
        assert!(g.vector_norm(&vector_sub(&v, &expect)) < 1e-14);
        let zero = div_potential(&g, &vec![0.0; g.len()]);
        assert!(zero.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn solenoidal_single_mode_curl_potential() {
        let g = PeriodicGrid::new(8).unwrap();
        let h = g.sample_vector(|x| [0.0, 0.0, (2.0 * PI * x[0]).cos()]);
        let a = curl_potential(&g, &h);
        assert!(g.vector_norm(&vector_sub(&g.curl(&a), &h)) < 1e-13);
        let grad = g.sample_vector(|x| [-(2.0 * PI) * (2.0 * PI * x[0]).sin(), 0.0, 0.0]);
        assert!(g.vector_norm(&g.curl(&curl_potential(&g, &grad))) < 1e-12);
    }

    #[test]
    fn gradient_single_mode() {
        let g = PeriodicGrid::new(8).unwrap();
        let e = g.sample_vector(|x| [0.0, 2.0 * PI * (2.0 * PI * x[1]).cos(), 0.0]);
        let u = grad_potential(&g, &e);
        let expect = g.sample(|x| (2.0 * PI * x[1]).sin());
        let err: f64 = u.iter().zip(&expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-14);
        let sol = g.sample_vector(|x| [0.0, 0.0, (2.0 * PI * x[0]).cos()]);
        assert!(g.norm(&grad_potential(&g, &sol)) < 1e-14);
    }
}
