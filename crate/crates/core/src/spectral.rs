//! 2D DFT, log-magnitude spectra, and the real cepstrum.
//!
//! The forward transform is unnormalized — the DC bin equals the pixel sum —
//! and the inverse carries the `1/(rows*cols)` factor. Arbitrary image sizes
//! are supported (not just powers of two).

use alloc::vec::Vec;

use num_complex::Complex;
#[cfg_attr(test, allow(unused_imports))] // std shadows these methods in tests
use num_traits::Float;

use crate::error::Result;
use crate::fft::{Direction, Plan};
use crate::image::{normalize, Image};
use crate::mathutil::raw_bin;

/// Stabilizer added to magnitudes before the cepstral log.
pub const CEPSTRUM_EPS: f64 = 1e-12;

/// Imaginary residue above which [`idft2_with_residue`] flags its output.
pub const IMAG_RESIDUE_WARN: f64 = 1e-9;

/// Complex frequency grid produced by [`dft2`].
///
/// Bins are stored row-major; `bin(u, v)` indexes row frequency `u` and
/// column frequency `v` in raw (wrapped) order with DC at `(0, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    rows: usize,
    cols: usize,
    bins: Vec<Complex<f64>>,
}

impl Spectrum {
    pub(crate) fn from_parts(rows: usize, cols: usize, bins: Vec<Complex<f64>>) -> Self {
        debug_assert_eq!(bins.len(), rows * cols);
        Self { rows, cols, bins }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn bin(&self, u: usize, v: usize) -> Complex<f64> {
        self.bins[u * self.cols + v]
    }

    #[inline]
    pub fn set_bin(&mut self, u: usize, v: usize, value: Complex<f64>) {
        self.bins[u * self.cols + v] = value;
    }

    /// Bin addressed by *signed centered* indices in `[-n/2, n/2)`.
    pub fn bin_centered(&self, u: i64, v: i64) -> Complex<f64> {
        self.bin(raw_bin(u, self.rows), raw_bin(v, self.cols))
    }

    pub fn bins(&self) -> &[Complex<f64>] {
        &self.bins
    }

    pub(crate) fn bins_mut(&mut self) -> &mut [Complex<f64>] {
        &mut self.bins
    }
}

/// Unnormalized forward 2D DFT:
/// `bin(u, v) = sum_{r, c} img[r, c] * exp(-2*pi*i*(u*r/rows + v*c/cols))`.
pub fn dft2(img: &Image) -> Spectrum {
    let rows = img.rows();
    let cols = img.cols();
    let mut bins: Vec<Complex<f64>> = img
        .pixels()
        .iter()
        .map(|&p| Complex::new(p, 0.0))
        .collect();
    transform2(&mut bins, rows, cols, Direction::Forward);
    Spectrum::from_parts(rows, cols, bins)
}

/// Inverse 2D DFT with the `1/(rows*cols)` factor, returning the real part
/// together with the largest absolute imaginary residue that was discarded.
///
/// For spectra of real images the residue is numerical noise; values above
/// [`IMAG_RESIDUE_WARN`] indicate the spectrum was not conjugate-symmetric.
pub fn idft2_with_residue(spec: &Spectrum) -> (Image, f64) {
    let rows = spec.rows();
    let cols = spec.cols();
    let mut bins = spec.bins().to_vec();
    transform2(&mut bins, rows, cols, Direction::Inverse);
    let scale = 1.0 / (rows * cols) as f64;
    let mut residue = 0.0_f64;
    let pixels: Vec<f64> = bins
        .iter()
        .map(|b| {
            residue = residue.max((b.im * scale).abs());
            b.re * scale
        })
        .collect();
    (Image::from_parts(rows, cols, 1.0, pixels), residue)
}

/// Inverse 2D DFT, discarding the imaginary residue.
pub fn idft2(spec: &Spectrum) -> Image {
    idft2_with_residue(spec).0
}

/// In-place row/column FFT of a row-major complex grid.
fn transform2(bins: &mut [Complex<f64>], rows: usize, cols: usize, dir: Direction) {
    let row_plan = Plan::new(cols);
    for r in 0..rows {
        row_plan.transform(&mut bins[r * cols..(r + 1) * cols], dir);
    }
    let col_plan = Plan::new(rows);
    let mut column = alloc::vec![Complex::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = bins[r * cols + c];
        }
        col_plan.transform(&mut column, dir);
        for r in 0..rows {
            bins[r * cols + c] = column[r];
        }
    }
}

/// Cyclically shifts an image so index `(0, 0)` moves to the center
/// `(rows/2, cols/2)`. Standard DC-centering shift.
pub fn fftshift(img: &Image) -> Image {
    shift_by(img, img.rows() / 2, img.cols() / 2)
}

/// Inverse of [`fftshift`] (distinct for odd dimensions).
pub fn ifftshift(img: &Image) -> Image {
    shift_by(
        img,
        img.rows() - img.rows() / 2,
        img.cols() - img.cols() / 2,
    )
}

fn shift_by(img: &Image, dr: usize, dc: usize) -> Image {
    let rows = img.rows();
    let cols = img.cols();
    let mut out = alloc::vec![0.0; rows * cols];
    for r in 0..rows {
        let nr = (r + dr) % rows;
        for c in 0..cols {
            let nc = (c + dc) % cols;
            out[nr * cols + nc] = img.at(r, c);
        }
    }
    Image::from_parts(rows, cols, img.range_hint(), out)
}

/// DC-centered, `[0, 1]`-normalized `log(1 + |bin|)` display of a spectrum.
pub fn log_magnitude(spec: &Spectrum) -> Image {
    let raw = Image::from_parts(
        spec.rows(),
        spec.cols(),
        1.0,
        spec.bins().iter().map(|b| b.norm().ln_1p()).collect(),
    );
    normalize(&fftshift(&raw))
}

/// Real cepstrum of an image: `real(idft2(log(eps + |dft2(img)|)))`,
/// DC-centered. The peak structure encodes echo-like periodicities of the
/// log-spectrum, which is what blur-zero combs produce.
pub fn cepstrum2(img: &Image) -> Result<Image> {
    let spec = dft2(img);
    let log_bins: Vec<Complex<f64>> = spec
        .bins()
        .iter()
        .map(|b| Complex::new((CEPSTRUM_EPS + b.norm()).ln(), 0.0))
        .collect();
    let log_spec = Spectrum::from_parts(spec.rows(), spec.cols(), log_bins);
    let (cep, _residue) = idft2_with_residue(&log_spec);
    Ok(fftshift(&cep))
}
