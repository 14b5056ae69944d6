use rand::Rng;

use super::grid::{PeriodicGrid, VectorField};

/// One real Fourier mode `a cos(2πk·x) + b sin(2πk·x)` with vector amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub k: [i64; 3],
    pub cos: [f64; 3],
    pub sin: [f64; 3],
}

/// A finite sum of real modes with closed-form Helmholtz projections.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSum {
    pub modes: Vec<Mode>,
}

impl ModeSum {
    /// `count` modes with nonzero wavenumbers in `[−kmax, kmax]³` and
    /// standard normal-ish amplitudes.
    pub fn random(rng: &mut impl Rng, kmax: i64, count: usize) -> Self {
        let modes = (0..count)
            .map(|_| {
                let k = loop {
                    let k = [0; 3].map(|_: i64| rng.gen_range(-kmax..=kmax));
                    if k != [0, 0, 0] {
                        break k;
                    }
                };
                Mode { k, cos: [0.0; 3].map(|_: f64| rng.gen_range(-1.0..1.0)), sin: [0.0; 3].map(|_: f64| rng.gen_range(-1.0..1.0)) }
            })
            .collect();
        ModeSum { modes }
    }

    fn map_amplitudes(&self, f: impl Fn(&[i64; 3], &[f64; 3]) -> [f64; 3]) -> Self {
        ModeSum {
            modes: self.modes.iter().map(|m| Mode { k: m.k, cos: f(&m.k, &m.cos), sin: f(&m.k, &m.sin) }).collect(),
        }
    }

    /// `(I − kkᵀ/|k|²)` applied per mode.
    pub fn solenoidal_part(&self) -> Self {
        self.map_amplitudes(|k, a| {
            let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            let ka = (k[0] as f64 * a[0] + k[1] as f64 * a[1] + k[2] as f64 * a[2]) / kk;
            [0, 1, 2].map(|d| a[d] - k[d] as f64 * ka)
        })
    }

    /// `kkᵀ/|k|²` applied per mode.
    pub fn gradient_part(&self) -> Self {
        self.map_amplitudes(|k, a| {
            let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            let ka = (k[0] as f64 * a[0] + k[1] as f64 * a[1] + k[2] as f64 * a[2]) / kk;
            [0, 1, 2].map(|d| k[d] as f64 * ka)
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map_amplitudes(|_, a| a.map(|v| v * s))
    }

    pub fn eval_vector(&self, x: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for m in &self.modes {
            let t = 2.0 * std::f64::consts::PI * (m.k[0] as f64 * x[0] + m.k[1] as f64 * x[1] + m.k[2] as f64 * x[2]);
            let (s, c) = t.sin_cos();
            for d in 0..3 {
                out[d] += m.cos[d] * c + m.sin[d] * s;
            }
        }
        out
    }

    /// The first amplitude component read as a scalar field.
    pub fn eval_scalar(&self, x: [f64; 3]) -> f64 {
        self.eval_vector(x)[0]
    }

    pub fn sample_vector(&self, grid: &PeriodicGrid) -> VectorField {
        grid.sample_vector(|x| self.eval_vector(x))
    }

    pub fn sample_scalar(&self, grid: &PeriodicGrid) -> Vec<f64> {
        grid.sample(|x| self.eval_scalar(x))
    }
}
