use num_complex::Complex64;

use super::fft::Fft;
use crate::error::{Error, Result};

/// Three components sampled on the grid.
pub type VectorField = [Vec<f64>; 3];

/// Uniform `N³` sampling of the unit torus `[0,1)³`.
///
/// Sample `(i, j, k)` sits at `(i, j, k)/N` and is stored at
/// `i + N·(j + N·k)`. Spectral coefficients use the same layout with signed
/// wavenumbers in `[−N/2, N/2)`.
#[derive(Clone, Debug)]
pub struct PeriodicGrid {
    n: usize,
    fft: Fft,
}

impl PeriodicGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidResolution(format!("grid size {n} must be a power of two ≥ 4")));
        }
        Ok(PeriodicGrid { n, fft: Fft::new(n) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    fn split(&self, idx: usize) -> [usize; 3] {
        [idx % self.n, (idx / self.n) % self.n, idx / (self.n * self.n)]
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        self.split(idx).map(|i| i as f64 / self.n as f64)
    }

    /// Signed integer wavenumber of spectral index `idx`.
    pub fn wavenumber(&self, idx: usize) -> [i64; 3] {
        let n = self.n as i64;
        self.split(idx).map(|i| {
            let i = i as i64;
            if i >= n / 2 {
                i - n
            } else {
                i
            }
        })
    }

    /// `ξ = 2πk` for modes carried by the multipliers; `None` for the zero
    /// mode and for modes touching the Nyquist index.
    pub fn frequency(&self, idx: usize) -> Option<[f64; 3]> {
        let k = self.wavenumber(idx);
        let nyq = -(self.n as i64) / 2;
        if k == [0, 0, 0] || k.contains(&nyq) {
            return None;
        }
        Some(k.map(|v| 2.0 * std::f64::consts::PI * v as f64))
    }

    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.point(i))).collect()
    }

    pub fn sample_vector(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> VectorField {
        let vals: Vec<[f64; 3]> = (0..self.len()).map(|i| f(self.point(i))).collect();
        [0, 1, 2].map(|d| vals.iter().map(|v| v[d]).collect())
    }

    /// Normalized coefficients `f̂_k = N⁻³ Σ f(x) e^{−2πik·x}`.
    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        assert_eq!(f.len(), self.len());
        let mut data: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, false);
        let s = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|v| *v *= s);
        data
    }

    /// `f(x) = Σ f̂_k e^{2πik·x}`.
    pub fn inverse(&self, fh: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(fh.len(), self.len());
        let mut data = fh.to_vec();
        self.transform(&mut data, true);
        data
    }

    /// Real part of [`Self::inverse`].
    pub fn inverse_real(&self, fh: &[Complex64]) -> Vec<f64> {
        self.inverse(fh).into_iter().map(|c| c.re).collect()
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..3 {
            let stride = n.pow(axis as u32);
            for base in 0..self.len() {
                if (base / stride) % n != 0 {
                    continue;
                }
                for (m, l) in line.iter_mut().enumerate() {
                    *l = data[base + m * stride];
                }
                if inverse {
                    self.fft.backward(&mut line);
                } else {
                    self.fft.forward(&mut line);
                }
                for (m, l) in line.iter().enumerate() {
                    data[base + m * stride] = *l;
                }
            }
        }
    }

    /// Applies a multiplier that maps each active mode's coefficient to a new
    /// coefficient; inactive modes map to zero.
    pub(crate) fn multiply(&self, fh: &[Complex64], m: impl Fn([f64; 3], Complex64) -> Complex64) -> Vec<Complex64> {
        (0..self.len())
            .map(|i| match self.frequency(i) {
                Some(xi) => m(xi, fh[i]),
                None => Complex64::new(0.0, 0.0),
            })
            .collect()
    }

    /// Spectral partial derivative along `axis`.
    pub fn derivative(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let fh = self.forward(f);
        let d = self.multiply(&fh, |xi, c| Complex64::new(0.0, xi[axis]) * c);
        self.inverse_real(&d)
    }

    pub fn gradient(&self, u: &[f64]) -> VectorField {
        [0, 1, 2].map(|d| self.derivative(u, d))
    }

    pub fn divergence(&self, v: &VectorField) -> Vec<f64> {
        let mut out = self.derivative(&v[0], 0);
        for d in 1..3 {
            for (o, x) in out.iter_mut().zip(self.derivative(&v[d], d)) {
                *o += x;
            }
        }
        out
    }

    pub fn curl(&self, v: &VectorField) -> VectorField {
        let dd = |c: usize, a: usize| self.derivative(&v[c], a);
        let sub = |a: Vec<f64>, b: Vec<f64>| a.iter().zip(&b).map(|(x, y)| x - y).collect::<Vec<_>>();
        [sub(dd(2, 1), dd(1, 2)), sub(dd(0, 2), dd(2, 0)), sub(dd(1, 0), dd(0, 1))]
    }

    pub fn mean(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() / f.len() as f64
    }

    /// Discrete `L²(torus)` norm, `(N⁻³ Σ f²)^{1/2}`.
    pub fn norm(&self, f: &[f64]) -> f64 {
        (f.iter().map(|v| v * v).sum::<f64>() / f.len() as f64).sqrt()
    }

    pub fn vector_norm(&self, v: &VectorField) -> f64 {
        (v.iter().map(|c| self.norm(c).powi(2)).sum::<f64>()).sqrt()
    }
}

/// `a − b` componentwise.
pub fn vector_sub(a: &VectorField, b: &VectorField) -> VectorField {
    [0, 1, 2].map(|d| a[d].iter().zip(&b[d]).map(|(x, y)| x - y).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_sizes() {
        assert!(PeriodicGrid::new(2).is_err());
        assert!(PeriodicGrid::new(12).is_err());
        assert!(PeriodicGrid::new(8).is_ok());
    }

    #[test]
    fn round_trip() {
        let g = PeriodicGrid::new(16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = g.inverse_real(&g.forward(&f));
        let err = g.norm(&f.iter().zip(&back).map(|(a, b)| a - b).collect::<Vec<_>>());
        assert!(err <= 1e-13 * g.norm(&f));
    }

    #[test]
    fn single_mode_coefficients() {
        let g = PeriodicGrid::new(8).unwrap();
        let f = g.sample(|x| (2.0 * std::f64::consts::PI * (x[0] + 2.0 * x[2])).cos());
        let fh = g.forward(&f);
        for (i, c) in fh.iter().enumerate() {
            let k = g.wavenumber(i);
            let expect = if k == [1, 0, 2] || k == [-1, 0, -2] { 0.5 } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-14 && c.im.abs() < 1e-14, "{k:?}");
        }
    }

    #[test]
    fn derivative_of_sine() {
        let g = PeriodicGrid::new(16).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        let f = g.sample(|x| (tau * 3.0 * x[1]).sin());
        let d = g.derivative(&f, 1);
        for (i, v) in d.iter().enumerate() {
            let x = g.point(i);
            assert!((v - 3.0 * tau * (tau * 3.0 * x[1]).cos()).abs() < 1e-11);
        }
        assert!(g.derivative(&f, 0).iter().all(|v| v.abs() < 1e-12));
    }
}
