//! Frequency-domain restoration from known motion parameters.
//!
//! Both filters divide the blurred spectrum by the model transfer function.
//! The Wiener form regularizes the division with a noise-to-signal weight
//! so noise is not amplified where the transfer is weak; the inverse filter
//! divides outright wherever the transfer exceeds a floor and zeroes the
//! rest. Division in the DFT domain inverts circular convolution exactly;
//! on linearly-convolved data the frame boundary rings.


use alloc::string::String;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::psf::{psf_transfer, MotionParams};
use crate::spectral::{dft2, idft2};

/// How the Wiener filter weighs signal against noise.
#[derive(Clone, Debug, PartialEq)]
pub enum WienerConfig {
    /// Scalar noise-to-signal ratio: the filter is
    /// `conj(H) / (|H|^2 + nsr)`. The practical choice when the spectral
    /// densities are unknown.
    ScalarNsr(f64),
    /// Full form `conj(H) S / (|H|^2 S + N)` with per-bin power spectral
    /// densities, both indexed like raw spectrum bins.
    Psd { signal: Image, noise: Image },
}

impl Default for WienerConfig {
    /// Scalar NSR of 1e-3, a broadly safe regularization for normalized
    /// images with mild noise.
    fn default() -> Self {
        WienerConfig::ScalarNsr(1e-3)
    }
}

/// Wiener deconvolution of a motion blur with known parameters.
///
/// The restored spectrum is `Lambda .* G` with `Lambda` from the config and
/// `H` the model transfer for `params`; the output is the real inverse
/// transform clamped to `[0, inf)`.
///
/// # Errors
/// Scalar `nsr = 0` with exact zeros in `H` makes the division singular.
/// A negative or non-finite `nsr`, or PSDs that are misshapen or negative,
/// are invalid parameters.
pub fn wiener_deblur(blurred: &Image, params: MotionParams, cfg: &WienerConfig) -> Result<Image> {
    let (rows, cols) = (blurred.rows(), blurred.cols());
    let h = psf_transfer(params, rows, cols);
    let g = dft2(blurred);
    let mut spec = g.clone();

    match cfg {
        WienerConfig::ScalarNsr(nsr) => {
            if !nsr.is_finite() || *nsr < 0.0 {
                return Err(Error::InvalidParam(String::from(
                    "Wiener NSR must be finite and non-negative",
                )));
            }
            if *nsr == 0.0 && h.bins().iter().any(|z| z.norm_sqr() == 0.0) {
                return Err(Error::SingularFilter);
            }
            for (out, hb) in spec.bins_mut().iter_mut().zip(h.bins()) {
                let lambda = hb.conj() / (hb.norm_sqr() + nsr);
                *out *= lambda;
            }
        }
        WienerConfig::Psd { signal, noise } => {
            blurred.same_shape(signal)?;
            blurred.same_shape(noise)?;
            if signal.pixels().iter().chain(noise.pixels()).any(|&p| p < 0.0) {
                return Err(Error::InvalidParam(String::from(
                    "power spectral densities must be non-negative",
                )));
            }
            for (i, (out, hb)) in spec.bins_mut().iter_mut().zip(h.bins()).enumerate() {
                let s = signal.pixels()[i];
                let n = noise.pixels()[i];
                let denom = hb.norm_sqr() * s + n;
                // denom = 0 forces the numerator conj(H)*S to 0 as well
                // (s > 0 with h != 0 would make denom positive), so the
                // bin passes nothing.
                let lambda = if denom == 0.0 {
                    Complex::new(0.0, 0.0)
                } else {
                    hb.conj() * s / denom
                };
                *out *= lambda;
            }
        }
    }

    let out = idft2(&spec);
    let pixels = out.pixels().iter().map(|&p| p.max(0.0)).collect();
    Ok(Image::from_parts(rows, cols, blurred.range_hint(), pixels))
}

/// Thresholded inverse filter: divide by the transfer where it is at least
/// `floor` in magnitude, zero the bin otherwise.
///
/// Near-exact on noiseless circular blur away from the transfer's zero
/// lines. No clamping is applied; suppressed bins ring mildly negative.
pub fn inverse_filter(blurred: &Image, params: MotionParams, floor: f64) -> Result<Image> {
    if !floor.is_finite() || floor <= 0.0 {
        return Err(Error::InvalidParam(String::from(
            "inverse-filter floor must be finite and positive",
        )));
    }
    let (rows, cols) = (blurred.rows(), blurred.cols());
    let h = psf_transfer(params, rows, cols);
    let mut spec = dft2(blurred);
    for (out, hb) in spec.bins_mut().iter_mut().zip(h.bins()) {
        if hb.norm() >= floor {
            *out /= hb;
        } else {
            *out = Complex::new(0.0, 0.0);
        }
    }
    let out = idft2(&spec);
    Ok(Image::from_parts(
        rows,
        cols,
        blurred.range_hint(),
        out.pixels().to_vec(),
    ))
}
