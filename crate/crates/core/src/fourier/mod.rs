//! Periodic-grid Fourier potentials for gradient, curl and divergence.
//!
//! All multipliers discard the zero mode and any mode touching the Nyquist
//! index, so inputs are read modulo constants.

mod fft;
mod grid;
mod modes;
mod potentials;

pub use fft::Fft;
pub use grid::{vector_sub, PeriodicGrid, VectorField};
pub use modes::{Mode, ModeSum};
pub use potentials::{curl_potential, div_potential, grad_potential};

use rand::Rng;

use crate::error::Result;

/// Worst residuals over a batch of random band-limited inputs, each
/// relative to the input norm.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FourierCheck {
    pub n: usize,
    pub trials: usize,
    pub round_trip: f64,
    pub div_of_div_potential: f64,
    pub curl_of_div_potential: f64,
    pub curl_of_curl_potential: f64,
    pub div_of_curl_potential: f64,
    pub grad_of_grad_potential: f64,
    pub helmholtz_split: f64,
}

impl FourierCheck {
    pub fn max_residual(&self) -> f64 {
        [
            self.round_trip,
            self.div_of_div_potential,
            self.curl_of_div_potential,
            self.curl_of_curl_potential,
            self.div_of_curl_potential,
            self.grad_of_grad_potential,
            self.helmholtz_split,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn csv_header() -> &'static str {
        "n,trials,round_trip,div_td,rot_td,rot_tr,div_tr,grad_tn,split"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.n,
            self.trials,
            self.round_trip,
            self.div_of_div_potential,
            self.curl_of_div_potential,
            self.curl_of_curl_potential,
            self.div_of_curl_potential,
            self.grad_of_grad_potential,
            self.helmholtz_split
        )
    }
}

/// Runs the potential identities on `trials` random inputs with
/// wavenumbers below `n/4`; projections are evaluated mode by mode.
pub fn check(n: usize, trials: usize, rng: &mut impl Rng) -> Result<FourierCheck> {
    let grid = PeriodicGrid::new(n)?;
    let kmax = (n as i64 / 4).max(1);
    let mut out = FourierCheck { n, trials, ..Default::default() };
    let up = |slot: &mut f64, v: f64| *slot = slot.max(v);
    for _ in 0..trials {
        let modes = ModeSum::random(rng, kmax, 8);
        let h = modes.sample_scalar(&grid);
        let hn = grid.norm(&h);
        let back = grid.inverse_real(&grid.forward(&h));
        up(&mut out.round_trip, grid.norm(&h.iter().zip(&back).map(|(a, b)| a - b).collect::<Vec<_>>()) / hn);

        let v = div_potential(&grid, &h);
        let dv = grid.divergence(&v);
        up(&mut out.div_of_div_potential, grid.norm(&dv.iter().zip(&h).map(|(a, b)| a - b).collect::<Vec<_>>()) / hn);
        up(&mut out.curl_of_div_potential, grid.vector_norm(&grid.curl(&v)) / hn);

        let f = modes.sample_vector(&grid);
        let fnorm = grid.vector_norm(&f);
        let a = curl_potential(&grid, &f);
        let sol = modes.solenoidal_part().sample_vector(&grid);
        up(&mut out.curl_of_curl_potential, grid.vector_norm(&vector_sub(&grid.curl(&a), &sol)) / fnorm);
        up(&mut out.div_of_curl_potential, grid.norm(&grid.divergence(&a)) / fnorm);

        let u = grad_potential(&grid, &f);
        let gradpart = modes.gradient_part().sample_vector(&grid);
        let gu = grid.gradient(&u);
        up(&mut out.grad_of_grad_potential, grid.vector_norm(&vector_sub(&gu, &gradpart)) / fnorm);

        let rebuilt: VectorField = {
            let ra = grid.curl(&a);
            [0, 1, 2].map(|d| gu[d].iter().zip(&ra[d]).map(|(x, y)| x + y).collect())
        };
        up(&mut out.helmholtz_split, grid.vector_norm(&vector_sub(&rebuilt, &f)) / fnorm);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_grid_check_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = check(8, 3, &mut rng).unwrap();
        assert!(r.max_residual() < 1e-12, "{r:?}");
        assert_eq!(FourierCheck::csv_header().split(',').count(), r.csv_row().split(',').count());
    }
}
