//! Core primitives for modelling, estimating, and undoing linear motion blur.
//!
//! Everything in this crate operates on in-memory `f64` buffers and is
//! `no_std`-compatible (allocation is required). File formats, CLI plumbing,
//! and JSON serialization live in the companion `blurtool` crate.
//!
//! Conventions used throughout:
//!
//! * Images are row-major `rows x cols` grids. The spatial frame is the
//!   centered grid: `x` increases with the column index, `y` increases
//!   *upward* (decreasing row index), and the origin sits at the geometric
//!   center `((rows-1)/2, (cols-1)/2)`.
//! * Motion is described by an angle `theta` in degrees, measured
//!   counter-clockwise from the positive x axis and folded into `[0, 180)`,
//!   and a length `L` in pixels.
//! * The forward DFT is unnormalized; the inverse carries the `1/(M*N)`
//!   factor. Frequency bins are indexed `(row bin, col bin)` with signed
//!   "centered" aliases in `[-n/2, n/2)`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod blindest;
pub mod degrade;
pub mod error;
pub mod estimate;
pub mod image;
pub mod invariants;
pub mod psf;
pub mod quality;
pub mod restore;
pub mod spectral;

mod fft;
mod mathutil;

pub use error::{Error, Result};
pub use image::Image;
