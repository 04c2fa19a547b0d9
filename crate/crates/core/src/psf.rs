//! Linear-motion blur kernels in spatial, analytic-moment, and frequency form.
//!
//! A motion blur is a uniform line segment of length `L` pixels at angle
//! `theta` degrees, counter-clockwise from the +x axis on the y-up centered
//! grid. The same blur is exposed three ways:
//!
//! * [`psf_kernel`]: a discrete, centrosymmetric, unit-mass kernel,
//! * [`psf_moment`]: exact geometric moments of the continuous segment,
//! * [`psf_transfer`]: the segment's frequency response, a normalized sinc.
//!
//! The kernel and the transfer function are built independently so each can
//! check the other; they agree up to rasterization error, never exactly.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::mathutil::{centered_bin, cos_deg, neumaier_sum, sin_deg};
use crate::spectral::Spectrum;

/// Blur direction and extent.
///
/// Angles are folded into `[0, 180)`: a segment and its reverse are the same
/// blur. Length is in pixels and must be finite and positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionParams {
    theta_deg: f64,
    length_px: f64,
}

impl MotionParams {
    pub fn new(theta_deg: f64, length_px: f64) -> Result<Self> {
        if !theta_deg.is_finite() {
            return Err(Error::InvalidParam("blur angle must be finite".into()));
        }
        if !length_px.is_finite() || length_px <= 0.0 {
            return Err(Error::InvalidParam(
                "blur length must be finite and positive".into(),
            ));
        }
        let mut t = theta_deg % 180.0;
        if t < 0.0 {
            t += 180.0;
        }
        Ok(Self {
            // `% 180` can yield -0.0; adding 0.0 normalizes it away.
            theta_deg: t + 0.0,
            length_px,
        })
    }

    /// Angle in degrees, in `[0, 180)`.
    pub fn theta_deg(&self) -> f64 {
        self.theta_deg
    }

    /// Length in pixels, positive.
    pub fn length_px(&self) -> f64 {
        self.length_px
    }
}

/// How a kernel was rasterized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rasterization {
    /// Each cell receives the exact arc length of the segment inside it.
    ArcCoverage,
}

/// A rasterized motion-blur kernel together with its parameters.
#[derive(Clone, Debug)]
pub struct Psf {
    kernel: Image,
    params: MotionParams,
    rasterization: Rasterization,
}

impl Psf {
    /// The kernel image: odd-sized square, entries >= 0, sum 1 within 1e-12,
    /// exactly centrosymmetric.
    pub fn kernel(&self) -> &Image {
        &self.kernel
    }

    pub fn params(&self) -> MotionParams {
        self.params
    }

    pub fn rasterization(&self) -> Rasterization {
        self.rasterization
    }
}

/// Normalized sinc: `sin(pi x) / (pi x)`, `sinc(0) = 1`.
///
/// Zeros land exactly on nonzero integers: the argument is reduced to its
/// distance from the nearest integer before the sine is taken, so `sinc(k)`
/// returns exact 0.0 and large arguments lose no precision to the sine's
/// period.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        // Series around 0 avoids 0/0 and cancellation.
        return 1.0 - (core::f64::consts::PI * x) * (core::f64::consts::PI * x) / 6.0;
    }
    let k = x.round();
    let r = x - k;
    let sign = if k.abs() % 2.0 == 1.0 { -1.0 } else { 1.0 };
    sign * (core::f64::consts::PI * r).sin() / (core::f64::consts::PI * x)
}

/// Inverse of [`sinc`] on its principal branch.
///
/// `sinc` falls strictly from 1 to 0 on `[0, 1]`; this returns the unique
/// preimage of `y` there, by bisection to well below 1e-12.
///
/// # Errors
/// `SincBranch` if `y` is outside `[0, 1]`: the measured ratio left the
/// principal branch, which signals a blur too long for the probed frequency
/// or noise dominating it.
pub fn asinc(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::SincBranch { value: y });
    }
    if y == 1.0 {
        return Ok(0.0);
    }
    if y == 0.0 {
        return Ok(1.0);
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if sinc(mid) >= y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Squared length deducted from `L^2` before rasterizing.
///
/// Spreading the segment over unit cells adds the cell footprint's own
/// variance, 1/12 per axis, to the raster's second moments. A segment of
/// length sqrt(L^2 - 2) plus that footprint reproduces the line model's
/// rotational second moment m20 + m02 = L^2/12 exactly, which is the
/// quantity the moment-based length estimator reads back. The value also
/// sits on the plateau that maximizes how many (theta, L) cells keep all
/// order-<=4 moments within 5% of the line model; see `calibration_sweep`
/// for the measured table.
const SPAN_TRIM_SQ: f64 = 2.0;

fn effective_span(length_px: f64) -> f64 {
    (length_px * length_px - SPAN_TRIM_SQ).max(0.0).sqrt()
}

/// Kernel side length: odd, wide enough for the nominal segment.
fn kernel_size(length_px: f64) -> usize {
    2 * (length_px / 2.0).ceil() as usize + 1
}

/// Rasterize a centered segment of the given span by exact arc coverage:
/// cell (i, j) receives the fraction of the segment's length that lies in
/// the unit square around it.
///
/// The segment is cut at every crossing of a cell boundary (half-integer x
/// or y); each piece lies in exactly one cell, so coverage is exact up to
/// roundoff in the crossing positions themselves.
fn coverage_kernel(theta_deg: f64, span: f64, size: usize) -> Image {
    let half = (size - 1) / 2;
    let mut pix = vec![0.0_f64; size * size];
    if span <= 0.0 {
        pix[half * size + half] = 1.0;
        return Image::from_parts(size, size, 1.0, pix);
    }

    let dx = cos_deg(theta_deg);
    let dy = sin_deg(theta_deg);
    let t_max = span / 2.0;

    let mut cuts = vec![-t_max, t_max];
    for dir in [dx, dy] {
        if dir != 0.0 {
            let reach = t_max * dir.abs();
            let mut b = 0.5;
            while b < reach {
                cuts.push(b / dir);
                cuts.push(-b / dir);
                b += 1.0;
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("cuts are finite"));

    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let tm = 0.5 * (t0 + t1);
        let col = half as i64 + (tm * dx).round() as i64;
        // y-up grid: positive y is a smaller row index.
        let row = half as i64 - (tm * dy).round() as i64;
        debug_assert!(
            (0..size as i64).contains(&row) && (0..size as i64).contains(&col),
            "segment piece escaped the kernel support"
        );
        pix[row as usize * size + col as usize] += (t1 - t0) / span;
    }

    // Exact centrosymmetry: average every cell with its point reflection.
    for i in 0..size {
        for j in 0..size {
            let (oi, oj) = (size - 1 - i, size - 1 - j);
            if (i, j) < (oi, oj) {
                let m = 0.5 * (pix[i * size + j] + pix[oi * size + oj]);
                pix[i * size + j] = m;
                pix[oi * size + oj] = m;
            }
        }
    }

    let mass = neumaier_sum(pix.iter().copied());
    for v in &mut pix {
        *v /= mass;
    }
    Image::from_parts(size, size, 1.0, pix)
}

/// Rasterize the motion-blur kernel for `params`.
///
/// The kernel is `S x S` with `S = 2*ceil(L/2) + 1`, entries >= 0, sum 1
/// within 1e-12, exactly centrosymmetric. Lengths too short to leave the
/// center cell (including `L = 1`) produce the identity kernel. Axis-aligned
/// angles collapse to a single row or column.
pub fn psf_kernel(params: MotionParams) -> Psf {
    let size = kernel_size(params.length_px());
    let kernel = coverage_kernel(params.theta_deg(), effective_span(params.length_px()), size);
    Psf {
        kernel,
        params,
        rasterization: Rasterization::ArcCoverage,
    }
}

/// Frequency response of the continuous segment on an `rows x cols` grid.
///
/// `H[u, v] = sinc(L * (cv*cos(theta)/cols - cu*sin(theta)/rows))` with
/// `cu`, `cv` the signed centered aliases of the row and column bin. The
/// column frequency pairs with `cos` because the kernel's x axis runs along
/// columns; the row term's sign reflects the y-up convention. `H[0, 0] = 1`
/// exactly, zeros lie exactly where the argument is a nonzero integer, and
/// `H[u, v] = H[-u, -v]`.
///
/// Lengths short enough to rasterize as the identity kernel get the
/// identity transfer, keeping the two blur descriptions consistent; the
/// segment model's first zero lies beyond Nyquist for such lengths anyway.
pub fn psf_transfer(params: MotionParams, rows: usize, cols: usize) -> Spectrum {
    let l = if effective_span(params.length_px()) == 0.0 {
        0.0
    } else {
        params.length_px()
    };
    let cos_t = cos_deg(params.theta_deg());
    let sin_t = sin_deg(params.theta_deg());
    let mut bins = Vec::with_capacity(rows * cols);
    for u in 0..rows {
        let cu = centered_bin(u, rows) as f64;
        for v in 0..cols {
            let cv = centered_bin(v, cols) as f64;
            let arg = l * (cv * cos_t / cols as f64 - cu * sin_t / rows as f64);
            bins.push(Complex::new(sinc(arg), 0.0));
        }
    }
    Spectrum::from_parts(rows, cols, bins)
}

/// Exact geometric moment `m_pq` of the continuous segment.
///
/// `m_pq = (L/2)^(p+q) cos^p(theta) sin^q(theta) / (p+q+1)` for even `p+q`,
/// and 0 for odd `p+q` (the segment is centrosymmetric).
pub fn psf_moment(params: MotionParams, p: u32, q: u32) -> f64 {
    if (p + q) % 2 == 1 {
        return 0.0;
    }
    let half_l = params.length_px() / 2.0;
    let cos_t = cos_deg(params.theta_deg());
    let sin_t = sin_deg(params.theta_deg());
    half_l.powi((p + q) as i32) * cos_t.powi(p as i32) * sin_t.powi(q as i32)
        / (p + q + 1) as f64
}
