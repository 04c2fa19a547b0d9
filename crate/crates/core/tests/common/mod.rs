//! Shared helpers for integration tests: a small deterministic RNG and
//! image generators. Test-only code; the library itself does not use this.

#![allow(dead_code)]

use blurtool_core::Image;

/// splitmix64 step, used here purely to build reproducible test fixtures.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Random image with values in [0, 1).
pub fn random_image(rows: usize, cols: usize, seed: u64) -> Image {
    let mut rng = TestRng(seed);
    Image::from_fn(rows, cols, |_, _| rng.next_f64()).unwrap()
}

/// Deterministic structured test scene: smooth background, a few blobs
/// and bars of different scales, plus mild speckle. Broad spectrum,
/// non-trivial moments, values in [0, 1].
pub fn test_scene(rows: usize, cols: usize) -> Image {
    scene_with_speckle(rows, cols, 0.03)
}

/// `test_scene` without the speckle pass. Restoration tests use this:
/// pixel-level speckle in the original is unrecoverable detail that only
/// caps similarity scores without exercising anything.
pub fn smooth_scene(rows: usize, cols: usize) -> Image {
    scene_with_speckle(rows, cols, 0.0)
}

fn scene_with_speckle(rows: usize, cols: usize, amp: f64) -> Image {
    let mut rng = TestRng(0x5EED_CAFE_F00D_0001);
    let mut img = Image::from_fn(rows, cols, |r, c| {
        let x = c as f64 / cols as f64;
        let y = r as f64 / rows as f64;
        0.25 + 0.15 * (2.2 * std::f64::consts::PI * x).sin() * (1.7 * std::f64::consts::PI * y).cos()
    })
    .unwrap();

    let blobs: [(f64, f64, f64, f64); 5] = [
        (0.30, 0.25, 0.05, 0.45),
        (0.70, 0.60, 0.09, 0.35),
        (0.45, 0.75, 0.03, 0.50),
        (0.80, 0.20, 0.06, 0.25),
        (0.20, 0.65, 0.12, 0.20),
    ];
    for r in 0..rows {
        for c in 0..cols {
            let x = c as f64 / cols as f64;
            let y = r as f64 / rows as f64;
            let mut v = img.at(r, c);
            for (by, bx, sigma, amp) in blobs {
                let d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
                v += amp * (-d2 / (2.0 * sigma * sigma)).exp();
            }
            // Bars give the spectrum strong directional mid-frequency content.
            if (0.12..0.16).contains(&x) || (0.52..0.55).contains(&y) {
                v += 0.2;
            }
            img.set(r, c, v);
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            let v = img.at(r, c) + amp * (rng.next_f64() - 0.5);
            img.set(r, c, v.clamp(0.0, 1.0));
        }
    }
    img
}
