//! Independent checks of the PSF against direct sums and hand derivations.
//!
//! The kernel raster and the analytic moment/transfer formulas are separate
//! code paths on purpose; these tests measure how far apart they are and pin
//! the distances that the estimation and restoration stages rely on.

use blurtool_core::psf::{psf_kernel, psf_moment, psf_transfer, MotionParams};
use blurtool_core::spectral::dft2;
use blurtool_core::Image;
use proptest::prelude::*;

fn params(theta: f64, length: f64) -> MotionParams {
    MotionParams::new(theta, length).unwrap()
}

/// Direct moment sum over the kernel's centered y-up grid.
fn raster_moment(kernel: &Image, p: i32, q: i32) -> f64 {
    let g = kernel.grid();
    let mut acc = 0.0;
    for r in 0..kernel.rows() {
        for c in 0..kernel.cols() {
            acc += kernel.at(r, c) * g.x(c).powi(p) * g.y(r).powi(q);
        }
    }
    acc
}

/// Kernel embedded at the origin of a larger frame with wraparound, so its
/// spectrum carries no phase ramp.
fn embed_origin(kernel: &Image, rows: usize, cols: usize) -> Image {
    let ctr = (kernel.rows() - 1) / 2;
    let mut img = Image::zeros(rows, cols).unwrap();
    for i in 0..kernel.rows() {
        for j in 0..kernel.cols() {
            let r = (i + rows - ctr) % rows;
            let c = (j + cols - ctr) % cols;
            img.set(r, c, img.at(r, c) + kernel.at(i, j));
        }
    }
    img
}

#[test]
fn rotational_second_moment_tracks_length() {
    // m20 + m02 is what the moment-based length estimate reads back; the
    // raster keeps it on L^2/12 once the segment spans a few cells.
    let mut theta = 0.0;
    while theta < 180.0 {
        for l in [9.0, 12.0, 16.0, 20.0, 32.0, 45.0, 61.0] {
            let k = psf_kernel(params(theta, l));
            let got = raster_moment(k.kernel(), 2, 0) + raster_moment(k.kernel(), 0, 2);
            let want = l * l / 12.0;
            assert!(
                (got - want).abs() <= 0.035 * want,
                "theta={theta} L={l}: {got} vs {want}"
            );
        }
        theta += 7.5;
    }

    // On the recovery grid the agreement is an order tighter, which keeps
    // the estimated length well inside its +-10% budget.
    for theta in [30.0, 45.0, 60.0, 85.0] {
        for l in [20.0, 30.0, 40.0, 50.0] {
            let k = psf_kernel(params(theta, l));
            let got = raster_moment(k.kernel(), 2, 0) + raster_moment(k.kernel(), 0, 2);
            let want = l * l / 12.0;
            assert!(
                (got - want).abs() <= 0.01 * want,
                "theta={theta} L={l}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn interior_cells_hold_all_low_order_moments() {
    // Where the segment is long enough to spread across cells in both axes,
    // every even moment of order <= 4 stays within 5% of the line model.
    for theta in [37.0, 45.0, 53.0] {
        for l in [12.0, 16.0, 20.0, 32.0, 61.0] {
            let p = params(theta, l);
            let k = psf_kernel(p);
            for (pp, qq) in [(2, 0), (1, 1), (0, 2), (4, 0), (3, 1), (2, 2), (1, 3), (0, 4)] {
                let want = psf_moment(p, pp as u32, qq as u32);
                let got = raster_moment(k.kernel(), pp, qq);
                assert!(
                    (got - want).abs() <= 0.05 * want.abs(),
                    "theta={theta} L={l} m{pp}{qq}: raster {got} vs line {want}"
                );
            }
        }
    }
}

#[test]
fn odd_moments_vanish_exactly() {
    for (theta, l) in [(0.0, 5.0), (30.0, 9.0), (67.5, 16.0), (120.0, 32.0)] {
        let k = psf_kernel(params(theta, l));
        for (pp, qq) in [(1, 0), (0, 1), (2, 1), (1, 2), (3, 0), (0, 3)] {
            let got = raster_moment(k.kernel(), pp, qq);
            assert!(
                got.abs() <= 1e-12,
                "theta={theta} L={l} m{pp}{qq} = {got}"
            );
            assert_eq!(psf_moment(params(theta, l), pp as u32, qq as u32), 0.0);
        }
    }
}

#[test]
fn transfer_zero_lines_are_exact_across_sizes() {
    // Horizontal blur: zero columns every N/L bins when N/L is an integer.
    let h = psf_transfer(params(0.0, 8.0), 48, 64);
    for k in [8i64, 16, 24, -8, -24] {
        for u in [0i64, 5, -11] {
            assert_eq!(h.bin_centered(u, k).re, 0.0, "u={u} col={k}");
        }
    }
    // Vertical blur against the row axis.
    let v = psf_transfer(params(90.0, 10.0), 40, 32);
    for k in [4i64, 8, 12, -4, -16] {
        for c in [0i64, 3, -9] {
            assert_eq!(v.bin_centered(k, c).re, 0.0, "row={k} col={c}");
        }
    }
}

#[test]
fn transfer_matches_kernel_spectrum_at_low_frequency() {
    // Second configuration of the dual-route check (the unit test covers
    // 30 degrees / L=12): agreement degrades quadratically away from DC, so
    // the inner sixteenth of the band must be tight.
    let p = params(60.0, 16.0);
    let spec = dft2(&embed_origin(psf_kernel(p).kernel(), 128, 128));
    let model = psf_transfer(p, 128, 128);
    let mut worst = 0.0_f64;
    for u in 0..128usize {
        for v in 0..128usize {
            let cu = if u <= 63 { u as i64 } else { u as i64 - 128 };
            let cv = if v <= 63 { v as i64 } else { v as i64 - 128 };
            if cu.abs() <= 8 && cv.abs() <= 8 {
                worst = worst.max((spec.bin(u, v).re - model.bin(u, v).re).abs());
            }
        }
    }
    assert!(worst < 0.02, "low-frequency deviation {worst}");
}

proptest! {
    #[test]
    fn kernel_invariants_hold_for_any_params(theta in 0.0..180.0f64, l in 1.0..64.0f64) {
        let h = psf_kernel(params(theta, l));
        let k = h.kernel();
        prop_assert!(k.rows() % 2 == 1 && k.rows() == k.cols());
        prop_assert!((k.mass() - 1.0).abs() <= 1e-12);
        let s = k.rows();
        for r in 0..s {
            for c in 0..s {
                prop_assert!(k.at(r, c) >= 0.0);
                prop_assert_eq!(
                    k.at(r, c).to_bits(),
                    k.at(s - 1 - r, s - 1 - c).to_bits()
                );
            }
        }
    }

    #[test]
    fn transfer_invariants_hold_for_any_params(theta in 0.0..180.0f64, l in 0.5..64.0f64) {
        let h = psf_transfer(params(theta, l), 17, 24);
        prop_assert_eq!(h.bin(0, 0).re, 1.0);
        for u in -8i64..=8 {
            for v in -11i64..=11 {
                let b = h.bin_centered(u, v);
                prop_assert!(b.im == 0.0);
                prop_assert!(b.re.abs() <= 1.0);
                prop_assert_eq!(b, h.bin_centered(-u, -v));
            }
        }
    }

    #[test]
    fn folded_angles_give_identical_kernels(quarter in 0u32..720, l in 1.0..32.0f64) {
        // Dyadic angles keep theta + 180 exact in floating point, so the
        // fold itself is the only thing under test.
        let theta = quarter as f64 * 0.25;
        let a = psf_kernel(params(theta, l));
        let b = psf_kernel(params(theta + 180.0, l));
        prop_assert_eq!(a.params().theta_deg(), b.params().theta_deg());
        for (x, y) in a.kernel().pixels().iter().zip(b.kernel().pixels()) {
            prop_assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}
