//! Moment algebra and frequency-ratio invariants for motion blur.
//!
//! Two facts drive everything here. First, convolution turns image moments
//! into a binomial combination of image and kernel moments, and a motion
//! kernel's odd moments vanish, so low-order moment differences between a
//! sharp and a blurred frame isolate the kernel's second moments and hence
//! the motion parameters. Second, the blurred-to-sharp spectrum ratio at a
//! frequency bin equals the kernel transfer value there, so inverting the
//! sinc at the two unit bins recovers the same parameters from the
//! frequency side. Both directions are exposed, along with quantities that
//! stay fixed under any centrosymmetric blur.

#[cfg_attr(test, allow(unused_imports))] // std shadows these methods in tests
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::estimate::{Diagnostics, EstimateMethod, EstimateReport};
use crate::image::Image;
use crate::mathutil::{binomial, neumaier_sum};
use crate::psf::{asinc, psf_moment, sinc, MotionParams};
use crate::spectral::dft2;

/// Largest supported total moment order. Higher orders amplify grid
/// coordinates to the point where the sums lose the digits the downstream
/// comparisons need.
pub const MAX_MOMENT_ORDER: u32 = 8;

/// Geometric moments `m_pq` of an image, complete for all `p + q` up to a
/// maximum order, taken about the image's geometric center with `y` up.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    max_order: u32,
    values: BTreeMap<(u32, u32), f64>,
}

impl MomentSet {
    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// Moment `m_pq`, if `p + q` is within this set's order.
    pub fn value(&self, p: u32, q: u32) -> Option<f64> {
        self.values.get(&(p, q)).copied()
    }

    /// Moment `m_pq`; panics when the order is out of range.
    pub fn at(&self, p: u32, q: u32) -> f64 {
        self.values[&(p, q)]
    }

    /// All `(p, q) -> value` entries in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }
}

/// Quantities unchanged by convolution with any centrosymmetric unit-mass
/// kernel. Entries of even total order vanish identically by construction;
/// the odd orders carry the image content.
#[derive(Clone, Debug, PartialEq)]
pub struct BlurInvariantSet {
    max_order: u32,
    values: BTreeMap<(u32, u32), f64>,
}

impl BlurInvariantSet {
    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn value(&self, p: u32, q: u32) -> Option<f64> {
        self.values.get(&(p, q)).copied()
    }

    pub fn at(&self, p: u32, q: u32) -> f64 {
        self.values[&(p, q)]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }
}

/// One spectrum-ratio probe: the measured complex ratio `G/F` at a centered
/// bin against the fitted sinc model.
#[derive(Clone, Debug, PartialEq)]
pub struct FreqInvariantSample {
    /// Centered row bin.
    pub u: i64,
    /// Centered column bin.
    pub v: i64,
    /// Measured ratio `G(u,v)/F(u,v)`. Zero when `F` vanishes at the bin.
    pub xi: Complex<f64>,
    /// Model value at the bin under the fitted parameters.
    pub predicted: f64,
    /// `|xi - predicted|`.
    pub residual: f64,
    /// False when `|F|` at the bin is below 1e-3 of the spectrum peak (the
    /// ratio is then noise-dominated and should not be trusted).
    pub conditioned: bool,
}

fn order_guard(max_order: u32) -> Result<()> {
    if max_order > MAX_MOMENT_ORDER {
        return Err(Error::InvalidParam(format!(
            "moment order {max_order} exceeds the supported maximum {MAX_MOMENT_ORDER}"
        )));
    }
    Ok(())
}

/// Geometric moments `m_pq = sum f(x,y) x^p y^q` over the centered grid,
/// complete for all `p + q <= max_order`.
pub fn geometric_moments(img: &Image, max_order: u32) -> Result<MomentSet> {
    order_guard(max_order)?;
    let grid = img.grid();
    let n_orders = max_order as usize + 1;

    // x powers per column, reused across rows.
    let mut xpow = Vec::with_capacity(img.cols());
    for c in 0..img.cols() {
        let x = grid.x(c);
        let mut powers = Vec::with_capacity(n_orders);
        let mut acc = 1.0;
        for _ in 0..n_orders {
            powers.push(acc);
            acc *= x;
        }
        xpow.push(powers);
    }

    // Per-row partial sums sum_c f x^p, then compensated accumulation of
    // y^q times those across rows.
    let mut values = BTreeMap::new();
    for p in 0..=max_order {
        for q in 0..=(max_order - p) {
            values.insert((p, q), Vec::with_capacity(img.rows()));
        }
    }
    let mut row_sums = alloc::vec![0.0_f64; n_orders];
    for r in 0..img.rows() {
        row_sums.iter_mut().for_each(|s| *s = 0.0);
        for c in 0..img.cols() {
            let f = img.at(r, c);
            for (p, s) in row_sums.iter_mut().enumerate() {
                *s += f * xpow[c][p];
            }
        }
        let y = grid.y(r);
        let mut yq = 1.0;
        for q in 0..=max_order {
            for p in 0..=(max_order - q) {
                values
                    .get_mut(&(p, q))
                    .unwrap()
                    .push(row_sums[p as usize] * yq);
            }
            yq *= y;
        }
    }
    let values = values
        .into_iter()
        .map(|(k, terms)| (k, neumaier_sum(terms.into_iter())))
        .collect();
    Ok(MomentSet { max_order, values })
}

/// Moments of a convolution from the moments of its factors:
/// `g_pq = sum_k sum_l C(p,k) C(q,l) h_kl f_{p-k,q-l}`.
///
/// This is an exact algebraic identity of full-extent convolution on
/// centered grids, with no model assumptions about the kernel.
pub fn convolved_moments(f: &MomentSet, h: &MomentSet) -> MomentSet {
    let max_order = f.max_order.min(h.max_order);
    let mut values = BTreeMap::new();
    for p in 0..=max_order {
        for q in 0..=(max_order - p) {
            let mut acc = 0.0;
            for k in 0..=p {
                for l in 0..=q {
                    acc += binomial(p, k) * binomial(q, l) * h.at(k, l) * f.at(p - k, q - l);
                }
            }
            values.insert((p, q), acc);
        }
    }
    MomentSet { max_order, values }
}

/// Predicted moments of a motion-blurred image using the closed-form line
/// kernel moments rather than a rasterized kernel.
pub fn predict_blurred_moments(
    f_moments: &MomentSet,
    params: MotionParams,
    max_order: u32,
) -> Result<MomentSet> {
    order_guard(max_order)?;
    if f_moments.max_order < max_order {
        return Err(Error::InvalidParam(format!(
            "image moments complete to order {} cannot predict order {max_order}",
            f_moments.max_order
        )));
    }
    let mut values = BTreeMap::new();
    for p in 0..=max_order {
        for q in 0..=(max_order - p) {
            let mut acc = 0.0;
            for k in 0..=p {
                for l in 0..=q {
                    let h_kl = psf_moment(params, k, l);
                    if h_kl == 0.0 {
                        continue;
                    }
                    acc += binomial(p, k) * binomial(q, l) * h_kl * f_moments.at(p - k, q - l);
                }
            }
            values.insert((p, q), acc);
        }
    }
    Ok(MomentSet { max_order, values })
}

/// Blur invariants under centrosymmetric kernels, by the recursion
///
/// `I(p,q) = m_pq - (1/m00) * sum C(p,k) C(q,l) I(p-k, q-l) m_kl`
///
/// over all `(k,l)` with `k <= p`, `l <= q` and `k + l` even and positive.
/// Orders 0 and 1 have no such terms and pass through as the raw moments.
/// Because the sum includes `(k,l) = (p,q)` itself at even total orders,
/// every invariant of even order above 0 vanishes identically; the odd
/// orders are the informative ones. A blur kernel's odd moments are zero
/// and its order-0 moment is 1, which is exactly what the recursion needs
/// to cancel all kernel contributions.
///
/// # Errors
/// `NullImage` when `m00 = 0` (the normalization is undefined).
pub fn blur_invariants(img: &Image, max_order: u32) -> Result<BlurInvariantSet> {
    order_guard(max_order)?;
    let m = geometric_moments(img, max_order)?;
    let m00 = m.at(0, 0);
    if m00 == 0.0 {
        return Err(Error::NullImage);
    }
    let mut values: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for order in 0..=max_order {
        for p in (0..=order).rev() {
            let q = order - p;
            let mut correction = 0.0;
            for k in 0..=p {
                for l in 0..=q {
                    let kl = k + l;
                    if kl == 0 || kl % 2 != 0 {
                        continue;
                    }
                    // k <= p and l <= q force (k,l) = (p,q) when kl = order,
                    // and that term refers to I(0,0) = m00.
                    let prior = if kl == order {
                        m00
                    } else {
                        values[&(p - k, q - l)]
                    };
                    correction += binomial(p, k) * binomial(q, l) * prior * m.at(k, l);
                }
            }
            values.insert((p, q), m.at(p, q) - correction / m00);
        }
    }
    // I(0,0) participates as m00 above but is reported as the raw moment.
    values.insert((0, 0), m00);
    Ok(BlurInvariantSet { max_order, values })
}

/// Motion parameters from second-order moment differences between a sharp
/// reference and its blurred counterpart.
///
/// The angle comes from the ratio of the axis moment shifts, the length
/// from their sum; both shifts are independent of where the scene sits in
/// the frame because the kernel's first moments vanish. The blurred frame
/// must contain all the blurred mass (full-extent convolution or
/// equivalent), or the differences are biased.
///
/// The plain angle formula cannot see whether the motion is above or below
/// the x axis; the sign of the `m11` shift settles that, mapping the result
/// into `[0, 180)`.
pub fn estimate_params_moments(reference: &Image, blurred: &Image) -> Result<EstimateReport> {
    let mf = geometric_moments(reference, 2)?;
    let mg = geometric_moments(blurred, 2)?;
    let m00f = mf.at(0, 0);
    if m00f == 0.0 {
        return Err(Error::NullImage);
    }
    let mut diagnostics = Diagnostics::default();

    let mass_drift = (mg.at(0, 0) - m00f).abs() / m00f.abs();
    if mass_drift > 1e-6 {
        diagnostics.warn(format!(
            "mass differs between frames by {mass_drift:.2e} of the reference; \
             moment differences may be biased (was the blur full-extent?)"
        ));
    }

    let d20 = mg.at(2, 0) - mf.at(2, 0);
    let d02 = mg.at(0, 2) - mf.at(0, 2);
    let d11 = mg.at(1, 1) - mf.at(1, 1);
    let floor = 1e-9 * m00f.abs().max(mf.at(2, 0).abs() + mf.at(0, 2).abs());
    for (name, d) in [("m20", d20), ("m02", d02)] {
        if d < -floor {
            diagnostics.warn(format!(
                "negative {name} difference {d:.3e} clamped to zero"
            ));
        }
    }

    let sum = d20 + d02;
    if sum < -1e-9 * m00f.abs() {
        return Err(Error::InconsistentFrames {
            radicand: sum / m00f,
        });
    }
    let length = 2.0 * 3.0_f64.sqrt() * (sum.max(0.0) / m00f).sqrt();
    if length < 2.0 {
        diagnostics.warn(format!("no blur detected (length estimate {length:.3})"));
        return Ok(EstimateReport {
            method: EstimateMethod::MomentRef,
            params: None,
            diagnostics,
        });
    }

    let d20c = d20.max(0.0);
    let d02c = d02.max(0.0);
    let mut theta = if d20c <= floor {
        90.0
    } else if d02c <= floor {
        0.0
    } else {
        (d02c / d20c).sqrt().atan().to_degrees()
    };
    // The m11 shift carries sin(2 theta): negative means the obtuse branch.
    if theta > 0.0 && theta < 90.0 && d11 < -floor {
        theta = 180.0 - theta;
        diagnostics.warn("direction resolved to the obtuse branch via the m11 shift");
    }

    Ok(EstimateReport {
        method: EstimateMethod::MomentRef,
        params: Some(MotionParams::new(theta, length)?),
        diagnostics,
    })
}

/// Real part of `G/F` at a raw bin, regularized as `Re(G conj(F)) / |F|^2`.
///
/// The theoretical ratio is real for centrosymmetric kernels; taking the
/// real part of the regularized quotient discards only model error.
fn real_ratio(
    fspec: &crate::spectral::Spectrum,
    gspec: &crate::spectral::Spectrum,
    row: usize,
    col: usize,
) -> Result<f64> {
    let f = fspec.bin(row, col);
    let denom = f.norm_sqr();
    if denom == 0.0 {
        return Err(Error::LowConfidence(format!(
            "reference spectrum vanishes at probe bin ({row}, {col})"
        )));
    }
    Ok((gspec.bin(row, col) * f.conj()).re / denom)
}

/// Clamp a measured sinc ratio onto the invertible range `[0, 1]`,
/// tolerating up to 0.02 of overshoot from rasterization and boundary
/// effects before declaring the value off the principal branch.
fn clamp_ratio(value: f64, label: &str, diagnostics: &mut Diagnostics) -> Result<f64> {
    const SLACK: f64 = 0.02;
    if !(-SLACK..=1.0 + SLACK).contains(&value) {
        return Err(Error::SincBranch { value });
    }
    if value > 1.0 || value < 0.0 {
        let clamped = value.clamp(0.0, 1.0);
        diagnostics
            .clamps
            .push(format!("{label}: ratio {value:.6} clamped to {clamped}"));
        return Ok(clamped);
    }
    Ok(value)
}

/// Motion parameters from the spectrum ratio at the two unit bins.
///
/// At centered bin `(1, 0)` the model ratio is `sinc(L sin(theta)/rows)`,
/// at `(0, 1)` it is `sinc(L cos(theta)/cols)`; inverting the sinc gives
/// the two axis projections of the motion vector, whose angle and
/// hypotenuse are the parameters. (The hypotenuse agrees with the
/// projection quotients `a*rows/sin` and `b*cols/cos` wherever those are
/// well-conditioned.) The unit-bin ratios are even in the angle, so a probe
/// at `(1, 1)` picks between the acute and obtuse branches.
///
/// Exact only under circular convolution; linear blur with boundary effects
/// perturbs the ratios, which the clamp slack absorbs.
pub fn estimate_params_freq(reference: &Image, blurred: &Image) -> Result<EstimateReport> {
    reference.same_shape(blurred)?;
    let fspec = dft2(reference);
    let gspec = dft2(blurred);
    let mut diagnostics = Diagnostics::default();

    let r10 = clamp_ratio(
        real_ratio(&fspec, &gspec, 1, 0)?,
        "bin (1,0)",
        &mut diagnostics,
    )?;
    let r01 = clamp_ratio(
        real_ratio(&fspec, &gspec, 0, 1)?,
        "bin (0,1)",
        &mut diagnostics,
    )?;
    let a = asinc(r10)?;
    let b = asinc(r01)?;
    diagnostics.a = Some(a);
    diagnostics.b = Some(b);

    if a < 1e-6 && b < 1e-6 {
        diagnostics.warn("no blur detected (both sinc arguments are zero)");
        return Ok(EstimateReport {
            method: EstimateMethod::FreqRef,
            params: None,
            diagnostics,
        });
    }

    let la = a * reference.rows() as f64; // L sin(theta)
    let lb = b * reference.cols() as f64; // L cos(theta)
    let mut theta = la.atan2(lb).to_degrees();
    let length = la.hypot(lb);

    if a >= 1e-6 && b >= 1e-6 {
        match real_ratio(&fspec, &gspec, 1, 1) {
            Ok(r11) => {
                let acute = sinc(b - a);
                let obtuse = sinc(a + b);
                let (da, db) = ((r11 - acute).abs(), (r11 - obtuse).abs());
                diagnostics.residual_max = Some(da.min(db));
                if db < da {
                    theta = 180.0 - theta;
                    diagnostics
                        .warn("direction resolved to the obtuse branch via the (1,1) bin");
                }
            }
            Err(_) => {
                diagnostics.warn(
                    "reference spectrum vanishes at (1,1); acute direction assumed",
                );
            }
        }
    }

    Ok(EstimateReport {
        method: EstimateMethod::FreqRef,
        params: Some(MotionParams::new(theta, length)?),
        diagnostics,
    })
}

/// Measured spectrum ratios `G/F` at the requested centered bins against
/// the fitted sinc model.
///
/// Bins where the reference spectrum vanishes yield `xi = 0` with
/// `conditioned = false` rather than an error, so a sweep over many bins
/// never aborts. Bin indices wrap modulo the image size.
pub fn xi_samples(
    reference: &Image,
    blurred: &Image,
    bins: &[(i64, i64)],
) -> Result<Vec<FreqInvariantSample>> {
    reference.same_shape(blurred)?;
    let report = estimate_params_freq(reference, blurred)?;
    let (theta, length) = match report.params {
        Some(p) => (p.theta_deg(), p.length_px()),
        None => (0.0, 0.0),
    };
    let fspec = dft2(reference);
    let gspec = dft2(blurred);
    let peak = fspec
        .bins()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let (rows, cols) = (reference.rows() as i64, reference.cols() as i64);
    let (ct, st) = (
        crate::mathutil::cos_deg(theta),
        crate::mathutil::sin_deg(theta),
    );

    let mut samples = Vec::with_capacity(bins.len());
    for &(u, v) in bins {
        let row = u.rem_euclid(rows) as usize;
        let col = v.rem_euclid(cols) as usize;
        let f = fspec.bin(row, col);
        let denom = f.norm_sqr();
        let conditioned = f.norm() >= 1e-3 * peak && denom > 0.0;
        let xi = if denom == 0.0 {
            Complex::new(0.0, 0.0)
        } else {
            gspec.bin(row, col) * f.conj() / denom
        };
        let predicted = sinc(length * (v as f64 * ct / cols as f64 - u as f64 * st / rows as f64));
        let residual = (xi - predicted).norm();
        samples.push(FreqInvariantSample {
            u,
            v,
            xi,
            predicted,
            residual,
            conditioned,
        });
    }
    Ok(samples)
}
