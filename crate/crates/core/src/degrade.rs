//! Forward degradation: blur an image with a motion kernel, add noise.
//!
//! The model is `g = f * h + n`: linear convolution with the unit-mass
//! kernel followed by optional additive Gaussian noise. Spatial convolution
//! comes in two boundary treatments and two output extents; a circular
//! (wraparound) variant matches the DFT's periodic geometry exactly and is
//! what the frequency-domain stages invert.

use alloc::vec;
use alloc::vec::Vec;

#[cfg_attr(test, allow(unused_imports))] // std shadows these methods in tests
use num_traits::Float;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::psf::{psf_kernel, MotionParams, Psf};
use crate::spectral::{dft2, idft2};

/// How samples outside the input frame are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Outside pixels are zero. Keeps total mass: nothing is invented.
    Zero,
    /// Outside pixels clamp to the nearest edge pixel. Avoids dark frames
    /// in visual output but adds mass near the border.
    Replicate,
}

/// Output geometry of a convolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extent {
    /// Output matches the input size; the kernel must fit inside it.
    Same,
    /// Output grows to (M+S-1)x(N+S-1) so no support is cropped. With
    /// [`Boundary::Zero`] this conserves the input's total mass, which the
    /// moment identities require.
    Full,
}

/// Additive Gaussian noise: standard deviation and generator seed.
///
/// `sigma = 0` disables the noise term entirely (the output is a bitwise
/// copy). The same `(image, spec)` pair always produces the same output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)] // sigma stored as bits for Eq
pub struct NoiseSpec {
    sigma_bits: u64,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidParam(
                "noise sigma must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            sigma_bits: sigma.to_bits(),
            seed,
        })
    }

    /// No noise term.
    pub fn none() -> Self {
        Self {
            sigma_bits: 0.0_f64.to_bits(),
            seed: 0,
        }
    }

    pub fn sigma(&self) -> f64 {
        f64::from_bits(self.sigma_bits)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// The degradation's own deterministic generator.
///
/// Pinned for cross-language reproducibility: state advances by the 64-bit
/// golden-ratio increment 0x9E3779B97F4A7C15, and each output mixes the new
/// state with xor-shifts by 30/27/31 and multiplies by 0xBF58476D1CE4E5B9
/// and 0x94D049BB133111EB (the splitmix64 finalizer). Uniform doubles take
/// the top 53 bits plus one onto (0, 1], so the Box-Muller logarithm never
/// sees zero.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on (0, 1].
    fn next_open_closed(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// One Box-Muller pair of standard normal samples.
    fn next_gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_open_closed();
        let u2 = self.next_open_closed();
        let r = (-2.0 * u1.ln()).sqrt();
        let a = 2.0 * core::f64::consts::PI * u2;
        (r * a.cos(), r * a.sin())
    }
}

/// Read a pixel with the boundary rule applied.
fn sample(img: &Image, r: i64, c: i64, boundary: Boundary) -> f64 {
    let (rows, cols) = (img.rows() as i64, img.cols() as i64);
    match boundary {
        Boundary::Zero => {
            if r < 0 || r >= rows || c < 0 || c >= cols {
                0.0
            } else {
                img.at(r as usize, c as usize)
            }
        }
        Boundary::Replicate => {
            let rc = r.clamp(0, rows - 1) as usize;
            let cc = c.clamp(0, cols - 1) as usize;
            img.at(rc, cc)
        }
    }
}

/// True 2-D convolution of `img` with the PSF kernel.
///
/// The kernel is index-flipped as convolution demands (a no-op for these
/// centrosymmetric kernels, but the code does not rely on that).
///
/// # Errors
/// `KernelTooLarge` when `Same` output is requested and the kernel exceeds
/// the image in either dimension.
pub fn convolve(img: &Image, psf: &Psf, boundary: Boundary, extent: Extent) -> Result<Image> {
    let k = psf.kernel();
    let (m, n) = (img.rows(), img.cols());
    let s = k.rows();
    let ctr = (s - 1) as i64 / 2;

    // g(x) = sum_i k(i) f(x + base - i). Same keeps the input frame, so the
    // kernel center must land on x itself (base = ctr). Full grows by S-1
    // and anchors index 0 at the first row the kernel can touch (base = 0),
    // which keeps output-centered coordinates equal to input-centered plus
    // kernel-centered ones, exactly as the moment identities assume.
    let (out_rows, out_cols, base) = match extent {
        Extent::Same => {
            if s > m || s > n {
                return Err(Error::KernelTooLarge {
                    kernel: (s, s),
                    image: (m, n),
                });
            }
            (m, n, ctr)
        }
        Extent::Full => (m + s - 1, n + s - 1, 0i64),
    };

    let mut out = vec![0.0_f64; out_rows * out_cols];
    for (idx, o) in out.iter_mut().enumerate() {
        let r = (idx / out_cols) as i64;
        let c = (idx % out_cols) as i64;
        let mut acc = 0.0;
        for i in 0..s as i64 {
            for j in 0..s as i64 {
                let w = k.at(i as usize, j as usize);
                if w == 0.0 {
                    continue;
                }
                acc += w * sample(img, r + base - i, c + base - j, boundary);
            }
        }
        *o = acc;
    }
    Ok(Image::from_parts(out_rows, out_cols, img.range_hint(), out))
}

/// Circular (wraparound) convolution with the PSF kernel.
///
/// Matches the DFT's periodic geometry bin-for-bin: the spectrum of the
/// output is the input's spectrum times the kernel's. Frequency-domain
/// estimation and restoration invert exactly this operation.
pub fn circular_convolve(img: &Image, psf: &Psf) -> Result<Image> {
    let k = psf.kernel();
    let (m, n) = (img.rows(), img.cols());
    let ctr = (k.rows() - 1) / 2;
    let mut embedded = Image::zeros(m, n)?;
    for i in 0..k.rows() {
        for j in 0..k.cols() {
            let r = (i % m + m - ctr % m) % m;
            let c = (j % n + n - ctr % n) % n;
            embedded.set(r, c, embedded.at(r, c) + k.at(i, j));
        }
    }
    let mut spec = dft2(img);
    let kspec = dft2(&embedded);
    for (b, h) in spec.bins_mut().iter_mut().zip(kspec.bins()) {
        *b *= h;
    }
    let out = idft2(&spec);
    Ok(Image::from_parts(
        m,
        n,
        img.range_hint(),
        out.pixels().to_vec(),
    ))
}

/// Add Gaussian noise per `spec`. Deterministic; `sigma = 0` returns the
/// input unchanged.
pub fn add_noise(img: &Image, spec: NoiseSpec) -> Result<Image> {
    let sigma = spec.sigma();
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let mut rng = SplitMix64::new(spec.seed());
    let mut out = Vec::with_capacity(img.pixels().len());
    let mut pending: Option<f64> = None;
    for &p in img.pixels() {
        let g = match pending.take() {
            Some(g) => g,
            None => {
                let (a, b) = rng.next_gaussian_pair();
                pending = Some(b);
                a
            }
        };
        out.push(p + sigma * g);
    }
    Ok(Image::from_parts(
        img.rows(),
        img.cols(),
        img.range_hint(),
        out,
    ))
}

/// Full degradation: blur by the motion parameters, then add noise.
pub fn degrade(
    img: &Image,
    params: MotionParams,
    noise: NoiseSpec,
    boundary: Boundary,
    extent: Extent,
) -> Result<Image> {
    let blurred = convolve(img, &psf_kernel(params), boundary, extent)?;
    add_noise(&blurred, noise)
}
