//! Complex FFT engine: iterative radix-2 with a Bluestein fallback so every
//! transform length is supported, not just powers of two.
//!
//! The public surface of this module is crate-private; `spectral` wraps it
//! with the image-level DFT conventions.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;

const PI: f64 = core::f64::consts::PI;

/// Direction of a transform. `Inverse` conjugates the twiddles but applies
/// no scale factor; callers divide by the logical length themselves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => -1.0,
            Direction::Inverse => 1.0,
        }
    }
}

/// Reusable plan for one transform length.
pub struct Plan {
    n: usize,
    kind: PlanKind,
}

enum PlanKind {
    /// n is a power of two: twiddles for the iterative Danielson-Lanczos
    /// passes, separately for each direction.
    Radix2 {
        fwd: Vec<Complex<f64>>,
        inv: Vec<Complex<f64>>,
    },
    /// Arbitrary n: Bluestein's chirp-z reduction onto a power of two.
    Bluestein {
        m: usize,
        /// chirp[k] = exp(-i*pi*k^2/n) for k < n (forward direction).
        chirp: Vec<Complex<f64>>,
        /// Forward FFT (length m) of the zero-padded conjugate chirp.
        kernel_fft: Vec<Complex<f64>>,
        inner_fwd: Vec<Complex<f64>>,
        inner_inv: Vec<Complex<f64>>,
    },
}

impl Plan {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "transform length must be positive");
        if n.is_power_of_two() {
            Plan {
                n,
                kind: PlanKind::Radix2 {
                    fwd: radix2_twiddles(n, Direction::Forward),
                    inv: radix2_twiddles(n, Direction::Inverse),
                },
            }
        } else {
            let m = (2 * n - 1).next_power_of_two();
            // Quadratic phase with the exponent reduced mod 2n *in integers*
            // so the chirp stays accurate for large k.
            let chirp: Vec<Complex<f64>> = (0..n)
                .map(|k| {
                    let e = ((k as u64) * (k as u64)) % (2 * n as u64);
                    Complex::from_polar(1.0, -PI * e as f64 / n as f64)
                })
                .collect();
            let inner_fwd = radix2_twiddles(m, Direction::Forward);
            let inner_inv = radix2_twiddles(m, Direction::Inverse);
            let mut kernel = vec![Complex::new(0.0, 0.0); m];
            kernel[0] = chirp[0].conj();
            for k in 1..n {
                let v = chirp[k].conj();
                kernel[k] = v;
                kernel[m - k] = v;
            }
            radix2_in_place(&mut kernel, &inner_fwd);
            Plan {
                n,
                kind: PlanKind::Bluestein {
                    m,
                    chirp,
                    kernel_fft: kernel,
                    inner_fwd,
                    inner_inv,
                },
            }
        }
    }

    /// Unnormalized transform of `data` (length `n`) in place.
    pub fn transform(&self, data: &mut [Complex<f64>], dir: Direction) {
        assert_eq!(data.len(), self.n);
        match &self.kind {
            PlanKind::Radix2 { fwd, inv } => {
                let tw = match dir {
                    Direction::Forward => fwd,
                    Direction::Inverse => inv,
                };
                radix2_in_place(data, tw);
            }
            PlanKind::Bluestein {
                m,
                chirp,
                kernel_fft,
                inner_fwd,
                inner_inv,
            } => {
                let n = self.n;
                let mut buf = vec![Complex::new(0.0, 0.0); *m];
                // Inverse direction = conjugate input and output around the
                // forward chirp machinery.
                let conj_io = dir == Direction::Inverse;
                for k in 0..n {
                    let x = if conj_io { data[k].conj() } else { data[k] };
                    buf[k] = x * chirp[k];
                }
                radix2_in_place(&mut buf, inner_fwd);
                for (b, k) in buf.iter_mut().zip(kernel_fft.iter()) {
                    *b *= *k;
                }
                radix2_in_place(&mut buf, inner_inv);
                let scale = 1.0 / *m as f64;
                for k in 0..n {
                    let y = buf[k] * scale * chirp[k];
                    data[k] = if conj_io { y.conj() } else { y };
                }
            }
        }
    }
}

/// Twiddle table for radix-2 passes: for each stage of size `len`, the
/// `len/2` roots are stored contiguously; total n-1 entries.
fn radix2_twiddles(n: usize, dir: Direction) -> Vec<Complex<f64>> {
    let mut tw = Vec::with_capacity(n.max(1) - 1);
    let mut len = 2;
    while len <= n {
        let step = dir.sign() * 2.0 * PI / len as f64;
        for j in 0..len / 2 {
            tw.push(Complex::from_polar(1.0, step * j as f64));
        }
        len <<= 1;
    }
    tw
}

fn radix2_in_place(data: &mut [Complex<f64>], twiddles: &[Complex<f64>]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    let mut tw_base = 0;
    while len <= n {
        let half = len / 2;
        let tw = &twiddles[tw_base..tw_base + half];
        let mut start = 0;
        while start < n {
            for j in 0..half {
                let u = data[start + j];
                let v = data[start + j + half] * tw[j];
                data[start + j] = u + v;
                data[start + j + half] = u - v;
            }
            start += len;
        }
        tw_base += half;
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// O(n^2) reference DFT.
    fn dft_naive(data: &[Complex<f64>], dir: Direction) -> Vec<Complex<f64>> {
        let n = data.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex::new(0.0, 0.0);
                for (j, &x) in data.iter().enumerate() {
                    let ang = dir.sign() * 2.0 * PI * (k * j % n) as f64 / n as f64;
                    acc += x * Complex::from_polar(1.0, ang);
                }
                acc
            })
            .collect()
    }

    fn test_signal(n: usize) -> Vec<Complex<f64>> {
        // Deterministic, irregular, zero-mean-ish signal.
        (0..n)
            .map(|i| {
                let t = i as f64;
                Complex::new((0.7 * t).sin() + 0.3 * (1.3 * t).cos(), (0.11 * t * t).sin())
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_mixed_lengths() {
        for n in [1usize, 2, 3, 4, 5, 7, 8, 12, 16, 25, 27, 31, 64, 100, 255] {
            let plan = Plan::new(n);
            let x = test_signal(n);
            let mut got = x.clone();
            plan.transform(&mut got, Direction::Forward);
            let want = dft_naive(&x, Direction::Forward);
            for (g, w) in got.iter().zip(want.iter()) {
                assert!(
                    (g - w).norm() < 1e-9 * (n as f64).max(1.0),
                    "forward length {n}: {g} vs {w}"
                );
            }
        }
    }

    #[test]
    fn round_trip_restores_input() {
        for n in [2usize, 3, 6, 8, 15, 17, 32, 49, 129, 256] {
            let plan = Plan::new(n);
            let x = test_signal(n);
            let mut data = x.clone();
            plan.transform(&mut data, Direction::Forward);
            plan.transform(&mut data, Direction::Inverse);
            let scale = 1.0 / n as f64;
            for (d, orig) in data.iter().zip(x.iter()) {
                assert!((d * scale - orig).norm() < 1e-10, "round trip length {n}");
            }
        }
    }
}
