//! Radix-2 complex FFT for the power-of-two grids used by [`crate::grw`].
//!
//! Forward transform is unnormalized; [`Fft::inverse`] divides by `n`.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{Error, Result};

/// Precomputed plan for one transform length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<u32>,
}

impl Fft {
    /// `n` must be a power of two and at least 2.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() || n > u32::MAX as usize {
            return Err(Error::invalid("fft length", "must be a power of two >= 2"));
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let a = -2.0 * core::f64::consts::PI * k as f64 / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n as u32).map(|i| i.reverse_bits() >> (32 - bits)).collect();
        Ok(Self { n, twiddles, bitrev })
    }

    /// Transform length.
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; plans have at least two points.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place `X_k = Σ x_j e^{−2πijk/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// In-place `x_j = (1/n) Σ X_k e^{+2πijk/n}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, true);
        let s = 1.0 / self.n as f64;
        data.iter_mut().for_each(|x| *x *= s);
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.n, "buffer length does not match plan");
        for (i, &j) in self.bitrev.iter().enumerate() {
            let j = j as usize;
            if i < j {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.n {
            let half = len / 2;
            let stride = self.n / len;
            for start in (0..self.n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// Angular wavenumbers `2π·fftfreq(n, dx)` in FFT order.
pub fn wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    let dk = 2.0 * core::f64::consts::PI / (n as f64 * dx);
    (0..n).map(|i| if i < n / 2 { i as f64 } else { i as f64 - n as f64 } * dk).collect()
}
