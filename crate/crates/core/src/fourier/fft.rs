use num_complex::Complex64;

/// Iterative radix-2 Cooley–Tukey transform of a fixed power-of-two length.
#[derive(Clone, Debug)]
pub struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    /// Panics unless `n` is a power of two.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        // Exact angles per index keep round-off independent of n.
        let twiddles = (0..n / 2)
            .map(|j| {
                let t = -2.0 * std::f64::consts::PI * j as f64 / n as f64;
                Complex64::new(t.cos(), t.sin())
            })
            .collect();
        Fft { n, twiddles, bitrev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized `X_k = Σ x_j e^{−2πijk/n}`.
    pub fn forward(&self, x: &mut [Complex64]) {
        self.run(x, false);
    }

    /// Unnormalized `x_j = Σ X_k e^{+2πijk/n}`.
    pub fn backward(&self, x: &mut [Complex64]) {
        self.run(x, true);
    }

    fn run(&self, x: &mut [Complex64], inverse: bool) {
        assert_eq!(x.len(), self.n);
        for i in 0..self.n {
            let j = self.bitrev[i];
            if i < j {
                x.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.n {
            let stride = self.n / len;
            for start in (0..self.n).step_by(len) {
                for k in 0..len / 2 {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = x[start + k];
                    let b = x[start + k + len / 2] * w;
                    x[start + k] = a + b;
                    x[start + k + len / 2] = a - b;
                }
            }
            len <<= 1;
        }
    }
}
