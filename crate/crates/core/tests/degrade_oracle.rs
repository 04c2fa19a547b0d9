//! Convolution checked against independent direct-sum implementations.

mod common;

use blurtool_core::degrade::{
    add_noise, circular_convolve, convolve, degrade, Boundary, Extent, NoiseSpec,
};
use blurtool_core::psf::{psf_kernel, MotionParams};
use blurtool_core::Image;
use common::random_image;
use proptest::prelude::*;

fn params(theta: f64, length: f64) -> MotionParams {
    MotionParams::new(theta, length).unwrap()
}

/// Scatter-form full convolution: every input pixel deposits a copy of the
/// kernel. Built the opposite way round from the library's gather loop.
fn full_convolve_oracle(img: &Image, kernel: &Image) -> Image {
    let (m, n) = (img.rows(), img.cols());
    let s = kernel.rows();
    let mut out = Image::zeros(m + s - 1, n + s - 1).unwrap();
    for r in 0..m {
        for c in 0..n {
            let v = img.at(r, c);
            for i in 0..s {
                for j in 0..s {
                    let acc = out.at(r + i, c + j) + v * kernel.at(i, j);
                    out.set(r + i, c + j, acc);
                }
            }
        }
    }
    out
}

/// Direct wraparound convolution with the kernel centered on each pixel.
fn circular_convolve_oracle(img: &Image, kernel: &Image) -> Image {
    let (m, n) = (img.rows() as i64, img.cols() as i64);
    let s = kernel.rows() as i64;
    let ctr = (s - 1) / 2;
    Image::from_fn(img.rows(), img.cols(), |r, c| {
        let mut acc = 0.0;
        for i in 0..s {
            for j in 0..s {
                let sr = (r as i64 - (i - ctr)).rem_euclid(m) as usize;
                let sc = (c as i64 - (j - ctr)).rem_euclid(n) as usize;
                acc += kernel.at(i as usize, j as usize) * img.at(sr, sc);
            }
        }
        acc
    })
    .unwrap()
}

fn max_abs_diff(a: &Image, b: &Image) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    a.pixels()
        .iter()
        .zip(b.pixels())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn full_convolution_matches_the_scatter_oracle() {
    let img = random_image(13, 17, 0xD06);
    for (theta, length) in [(0.0, 5.0), (30.0, 7.0), (90.0, 4.0), (135.0, 9.5)] {
        let psf = psf_kernel(params(theta, length));
        let got = convolve(&img, &psf, Boundary::Zero, Extent::Full).unwrap();
        let want = full_convolve_oracle(&img, psf.kernel());
        assert!(
            max_abs_diff(&got, &want) < 1e-14,
            "theta={theta} L={length}"
        );
    }
}

#[test]
fn full_extent_conserves_mass_to_ten_digits() {
    let img = random_image(16, 16, 0xBEEF);
    let mass_in = img.mass();
    for (theta, length) in [(0.0, 3.0), (45.0, 12.0), (77.0, 20.0), (150.0, 6.0)] {
        let out = degrade(
            &img,
            params(theta, length),
            NoiseSpec::none(),
            Boundary::Zero,
            Extent::Full,
        )
        .unwrap();
        let rel = (out.mass() - mass_in).abs() / mass_in.abs();
        assert!(rel <= 1e-10, "theta={theta} L={length}: rel drift {rel:.2e}");
    }
}

#[test]
fn circular_convolution_matches_the_direct_wraparound_sum() {
    let img = random_image(12, 15, 0xC1AC);
    for (theta, length) in [(20.0, 5.0), (90.0, 8.0), (160.0, 3.5)] {
        let psf = psf_kernel(params(theta, length));
        let got = circular_convolve(&img, &psf).unwrap();
        let want = circular_convolve_oracle(&img, psf.kernel());
        assert!(
            max_abs_diff(&got, &want) < 1e-11,
            "theta={theta} L={length}"
        );
    }
}

#[test]
fn circular_convolution_wraps_kernels_larger_than_the_image() {
    // A 17-tap kernel on an 8-wide image folds onto itself; the direct sum
    // oracle handles that with plain modular indexing.
    let img = random_image(8, 8, 0xFACE);
    let psf = psf_kernel(params(0.0, 16.0));
    let got = circular_convolve(&img, &psf).unwrap();
    let want = circular_convolve_oracle(&img, psf.kernel());
    assert!(max_abs_diff(&got, &want) < 1e-12);
}

#[test]
fn replicate_boundary_never_dims_the_border() {
    // Zero padding drains mass at the frame; replicate keeps a bright
    // constant border bright.
    let img = Image::from_fn(12, 12, |_, _| 1.0).unwrap();
    let psf = psf_kernel(params(45.0, 7.0));
    let zero = convolve(&img, &psf, Boundary::Zero, Extent::Same).unwrap();
    let repl = convolve(&img, &psf, Boundary::Replicate, Extent::Same).unwrap();
    assert!(zero.at(0, 0) < 0.75, "zero-padded corner {}", zero.at(0, 0));
    assert!((repl.at(0, 0) - 1.0).abs() <= 1e-12);
}

#[test]
fn noise_spreads_across_the_whole_frame() {
    // Box-Muller pairs must not leave the odd tail pixel untouched.
    let img = Image::zeros(3, 3).unwrap();
    let out = add_noise(&img, NoiseSpec::new(1.0, 9).unwrap()).unwrap();
    assert!(out.pixels().iter().all(|&p| p != 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mass_is_conserved_for_arbitrary_params(
        theta in 0.0f64..180.0,
        length in 1.0f64..24.0,
        seed in any::<u64>(),
    ) {
        let img = random_image(11, 14, seed);
        let psf = psf_kernel(params(theta, length));
        let out = convolve(&img, &psf, Boundary::Zero, Extent::Full).unwrap();
        let rel = (out.mass() - img.mass()).abs() / img.mass().abs().max(1.0);
        prop_assert!(rel <= 1e-10, "rel drift {rel:.2e}");
    }

    #[test]
    fn same_extent_is_always_the_central_crop_of_full(
        theta in 0.0f64..180.0,
        length in 1.0f64..10.0,
        seed in any::<u64>(),
    ) {
        let img = random_image(12, 13, seed);
        let psf = psf_kernel(params(theta, length));
        let same = convolve(&img, &psf, Boundary::Zero, Extent::Same).unwrap();
        let full = convolve(&img, &psf, Boundary::Zero, Extent::Full).unwrap();
        let off = (psf.kernel().rows() - 1) / 2;
        for r in 0..img.rows() {
            for c in 0..img.cols() {
                prop_assert_eq!(same.at(r, c), full.at(r + off, c + off));
            }
        }
    }

    #[test]
    fn circular_convolution_agrees_with_the_direct_sum(
        theta in 0.0f64..180.0,
        length in 1.0f64..9.0,
        seed in any::<u64>(),
    ) {
        let img = random_image(9, 11, seed);
        let psf = psf_kernel(params(theta, length));
        let got = circular_convolve(&img, &psf).unwrap();
        let want = circular_convolve_oracle(&img, psf.kernel());
        prop_assert!(max_abs_diff(&got, &want) < 1e-11);
    }
}
