//! Grayscale image buffer and the centered coordinate grid.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major grayscale image with `f64` pixels.
///
/// Construction validates the two structural invariants every operation in
/// this crate relies on: at least one row and column, and finite pixels.
/// `range_hint` records the nominal dynamic range `R` of the data (1.0 for
/// images loaded from normalized sources); quality metrics use it as the
/// peak signal value.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    rows: usize,
    cols: usize,
    range_hint: f64,
    pixels: Vec<f64>,
}

impl Image {
    /// Wraps a row-major pixel buffer. `pixels.len()` must equal
    /// `rows * cols`, and every value must be finite.
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyImage);
        }
        if pixels.len() != rows * cols {
            return Err(Error::InvalidParam(alloc::format!(
                "pixel buffer holds {} values, expected {}",
                pixels.len(),
                rows * cols
            )));
        }
        if !pixels.iter().all(|p| p.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            rows,
            cols,
            range_hint: 1.0,
            pixels,
        })
    }

    /// All-zero image.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows.max(1) * cols.max(1)])
    }

    /// Builds an image by evaluating `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyImage);
        }
        let mut pixels = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                pixels.push(f(r, c));
            }
        }
        Self::new(rows, cols, pixels)
    }

    /// Internal constructor for buffers already known to be valid.
    pub(crate) fn from_parts(rows: usize, cols: usize, range_hint: f64, pixels: Vec<f64>) -> Self {
        debug_assert!(rows > 0 && cols > 0 && pixels.len() == rows * cols);
        Self {
            rows,
            cols,
            range_hint,
            pixels,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Nominal dynamic range `R` used as the peak value by quality metrics.
    pub fn range_hint(&self) -> f64 {
        self.range_hint
    }

    /// Returns the image with a new range hint. The hint must be positive.
    pub fn with_range_hint(mut self, range_hint: f64) -> Result<Self> {
        if !(range_hint.is_finite() && range_hint > 0.0) {
            return Err(Error::InvalidParam(alloc::format!(
                "range hint must be a positive finite number, got {range_hint}"
            )));
        }
        self.range_hint = range_hint;
        Ok(self)
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.pixels[row * self.cols + col] = value;
    }

    /// Row-major pixel slice.
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    /// Sum of all pixels (compensated).
    pub fn mass(&self) -> f64 {
        crate::mathutil::neumaier_sum(self.pixels.iter().copied())
    }

    /// Centered grid matching this image's shape.
    pub fn grid(&self) -> CenteredGrid {
        CenteredGrid::new(self.rows, self.cols)
    }

    /// Checks shape equality against another image.
    pub fn same_shape(&self, other: &Image) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: (self.rows, self.cols),
                got: (other.rows, other.cols),
            });
        }
        Ok(())
    }
}

/// Maps array indices to centered spatial coordinates.
///
/// The origin is the geometric center `((rows-1)/2, (cols-1)/2)`; `x` runs
/// along columns, `y` runs *up* (against the row index). Both half-integer
/// origins are exact in binary floating point, so coordinate sums over a
/// full grid cancel exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenteredGrid {
    origin_row: f64,
    origin_col: f64,
}

impl CenteredGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            origin_row: (rows as f64 - 1.0) / 2.0,
            origin_col: (cols as f64 - 1.0) / 2.0,
        }
    }

    /// Horizontal coordinate of a column index.
    #[inline]
    pub fn x(&self, col: usize) -> f64 {
        col as f64 - self.origin_col
    }

    /// Vertical (upward) coordinate of a row index.
    #[inline]
    pub fn y(&self, row: usize) -> f64 {
        self.origin_row - row as f64
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.origin_row, self.origin_col)
    }
}

/// Affine rescale of pixel values onto `[0, 1]`.
///
/// A constant image maps to all zeros (the degenerate range collapses to
/// the lower bound). The result carries `range_hint = 1`.
pub fn normalize(img: &Image) -> Image {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &p in img.pixels() {
        lo = lo.min(p);
        hi = hi.max(p);
    }
    let span = hi - lo;
    let pixels = if span == 0.0 {
        vec![0.0; img.pixels().len()]
    } else {
        img.pixels().iter().map(|&p| (p - lo) / span).collect()
    };
    Image::from_parts(img.rows(), img.cols(), 1.0, pixels)
}
