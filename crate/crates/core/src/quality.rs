//! Full-reference quality scores: mean SSIM and PSNR.
//!
//! Both treat the images' shared `range_hint` as the nominal dynamic range
//! `R`. SSIM uses the standard 11x11 Gaussian window (sigma 1.5) with
//! stability constants `C1 = (0.01 R)^2`, `C2 = (0.03 R)^2`, averaged over
//! all fully-interior window positions; PSNR is `10 log10(R^2 / MSE)` with
//! an infinite sentinel for identical images.

#[cfg_attr(test, allow(unused_imports))] // std shadows these methods in tests
use num_traits::Float;

use alloc::format;

use crate::error::{Error, Result};
use crate::image::Image;

/// Window side for SSIM.
const WINDOW: usize = 11;
/// Gaussian sigma for the SSIM window weights.
const WINDOW_SIGMA: f64 = 1.5;

/// Paired scores for one test/reference comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QualityScore {
    /// Mean structural similarity in `[-1, 1]`.
    pub ssim: f64,
    /// Peak signal-to-noise ratio in dB; `+inf` for identical images.
    pub psnr: f64,
}

fn check_pair(test: &Image, reference: &Image) -> Result<()> {
    test.same_shape(reference)?;
    if test.range_hint() != reference.range_hint() {
        return Err(Error::InvalidParam(format!(
            "range hints differ: {} vs {}",
            test.range_hint(),
            reference.range_hint()
        )));
    }
    Ok(())
}

/// Normalized 11x11 Gaussian weights.
fn window_weights() -> [f64; WINDOW * WINDOW] {
    let mut w = [0.0; WINDOW * WINDOW];
    let mid = (WINDOW as f64 - 1.0) / 2.0;
    let mut total = 0.0;
    for r in 0..WINDOW {
        for c in 0..WINDOW {
            let dr = r as f64 - mid;
            let dc = c as f64 - mid;
            let v = (-(dr * dr + dc * dc) / (2.0 * WINDOW_SIGMA * WINDOW_SIGMA)).exp();
            w[r * WINDOW + c] = v;
            total += v;
        }
    }
    for v in &mut w {
        *v /= total;
    }
    w
}

/// Mean SSIM between `test` and `reference`.
///
/// # Errors
/// Dimension or range-hint mismatch, or images smaller than the 11x11
/// window.
pub fn ssim(test: &Image, reference: &Image) -> Result<f64> {
    check_pair(test, reference)?;
    if test.rows() < WINDOW || test.cols() < WINDOW {
        return Err(Error::InvalidParam(format!(
            "SSIM needs at least {WINDOW}x{WINDOW} pixels, got {}x{}",
            test.rows(),
            test.cols()
        )));
    }
    let r = test.range_hint();
    let c1 = (0.01 * r) * (0.01 * r);
    let c2 = (0.03 * r) * (0.03 * r);
    let w = window_weights();

    let mut acc = 0.0;
    let mut count = 0u64;
    for top in 0..=(test.rows() - WINDOW) {
        for left in 0..=(test.cols() - WINDOW) {
            let mut mx = 0.0;
            let mut my = 0.0;
            for i in 0..WINDOW {
                for j in 0..WINDOW {
                    let wt = w[i * WINDOW + j];
                    mx += wt * test.at(top + i, left + j);
                    my += wt * reference.at(top + i, left + j);
                }
            }
            let mut vx = 0.0;
            let mut vy = 0.0;
            let mut cov = 0.0;
            for i in 0..WINDOW {
                for j in 0..WINDOW {
                    let wt = w[i * WINDOW + j];
                    let dx = test.at(top + i, left + j) - mx;
                    let dy = reference.at(top + i, left + j) - my;
                    vx += wt * dx * dx;
                    vy += wt * dy * dy;
                    cov += wt * dx * dy;
                }
            }
            let num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
            let den = (mx * mx + my * my + c1) * (vx + vy + c2);
            acc += num / den;
            count += 1;
        }
    }
    Ok(acc / count as f64)
}

/// Peak signal-to-noise ratio in dB, `+inf` when the images are identical.
pub fn psnr(test: &Image, reference: &Image) -> Result<f64> {
    check_pair(test, reference)?;
    let n = test.pixels().len() as f64;
    let mse = test
        .pixels()
        .iter()
        .zip(reference.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    let r = reference.range_hint();
    Ok(10.0 * (r * r / mse).log10())
}

/// Both scores at once.
pub fn quality(test: &Image, reference: &Image) -> Result<QualityScore> {
    Ok(QualityScore {
        ssim: ssim(test, reference)?,
        psnr: psnr(test, reference)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn textured(rows: usize, cols: usize) -> Image {
        Image::from_fn(rows, cols, |r, c| {
            0.5 + 0.3 * ((r * 13 + c * 7) % 11) as f64 / 11.0 - 0.15 * ((r / 3) % 2) as f64
        })
        .unwrap()
    }

    #[test]
    fn self_similarity_is_exactly_one_and_psnr_infinite() {
        let img = textured(32, 24);
        assert_eq!(ssim(&img, &img).unwrap(), 1.0);
        assert_eq!(psnr(&img, &img).unwrap(), f64::INFINITY);
    }

    #[test]
    fn anticorrelated_pattern_scores_nonpositive() {
        let a = Image::from_fn(24, 24, |r, c| ((r / 2 + c / 2) % 2) as f64).unwrap();
        let b = Image::from_fn(24, 24, |r, c| 1.0 - ((r / 2 + c / 2) % 2) as f64).unwrap();
        let s = ssim(&a, &b).unwrap();
        assert!(s <= 0.0, "ssim {s}");
    }

    #[test]
    fn uniform_offset_gives_twenty_decibels() {
        let a = textured(16, 16);
        let b = Image::new(
            16,
            16,
            a.pixels().iter().map(|&p| p + 0.1).collect::<Vec<_>>(),
        )
        .unwrap();
        let got = psnr(&b, &a).unwrap();
        assert!((got - 20.0).abs() < 1e-9, "psnr {got}");
    }

    #[test]
    fn psnr_matches_a_direct_mse_oracle() {
        let a = textured(20, 20);
        let b = Image::from_fn(20, 20, |r, c| {
            a.at(r, c) + 0.01 * (((r * 31 + c * 17) % 13) as f64 - 6.0)
        })
        .unwrap();
        let mut mse = 0.0;
        for r in 0..20 {
            for c in 0..20 {
                let d = b.at(r, c) - a.at(r, c);
                mse += d * d;
            }
        }
        mse /= 400.0;
        let want = 10.0 * (1.0 / mse).log10();
        assert!((psnr(&b, &a).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn ssim_is_symmetric_and_bounded() {
        let a = textured(24, 24);
        let b = Image::from_fn(24, 24, |r, c| a.at(r, c) * 0.9 + 0.03 * ((r + c) % 3) as f64)
            .unwrap();
        let ab = ssim(&a, &b).unwrap();
        let ba = ssim(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
        assert!((-1.0..=1.0).contains(&ab));
        assert!(ab < 1.0);
    }

    #[test]
    fn longer_blur_scores_strictly_worse() {
        use crate::degrade::{convolve, Boundary, Extent};
        use crate::psf::MotionParams;
        let scene = Image::from_fn(64, 64, |r, c| {
            let x = c as f64 / 2.5;
            let y = r as f64 / 3.5;
            0.5 + 0.2 * x.sin() + 0.2 * (y + 0.3 * x).cos()
        })
        .unwrap();
        // Once blur wipes out all structure the score saturates near zero and
        // can tick back up, so stay in the range where detail still survives.
        let mut last = f64::INFINITY;
        for l in [8.0, 16.0, 28.0] {
            let params = MotionParams::new(30.0, l).unwrap();
            let blurred = convolve(
                &scene,
                &crate::psf::psf_kernel(params),
                Boundary::Replicate,
                Extent::Same,
            )
            .unwrap();
            let s = ssim(&blurred, &scene).unwrap();
            assert!(s < last, "ssim {s} did not drop below {last} at L={l}");
            last = s;
        }
        assert!(last < 0.5, "heaviest blur still scored {last}");
    }

    #[test]
    fn undersized_or_mismatched_inputs_are_rejected() {
        let small = textured(8, 8);
        assert!(ssim(&small, &small).is_err());
        let a = textured(16, 16);
        let b = textured(16, 17);
        assert!(ssim(&a, &b).is_err());
        assert!(psnr(&a, &b).is_err());
        let hinted = a.clone().with_range_hint(2.0).unwrap();
        assert!(ssim(&a, &hinted).is_err());
    }
}
