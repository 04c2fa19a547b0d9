//! Blind motion estimation from a single blurred frame.
//!
//! A linear smear multiplies the image spectrum by an oriented sinc, which
//! cuts a comb of dark stripes across the log-magnitude display. The stripe
//! normal points along the motion direction and the stripe spacing fixes
//! the smear length, so both parameters are readable without a reference
//! frame. Two independent readers are provided: the stripe pipeline
//! ([`estimate_angle_spectrum`] then [`estimate_length_spectrum`]) and a
//! cepstral peak picker ([`estimate_cepstrum`]) kept as a baseline.

#[cfg_attr(test, allow(unused_imports))] // std shadows these methods in tests
use num_traits::Float;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::estimate::{Diagnostics, EstimateMethod, EstimateReport};
use crate::image::Image;
use crate::mathutil::{cos_deg, sin_deg};
use crate::psf::MotionParams;
use crate::spectral::{cepstrum2, dft2, Spectrum};

/// Smallest frame side with enough spectral resolution to read stripes.
const MIN_SIDE: usize = 64;
/// Minimum distance from the scan axis for stripe-edge hits, and the
/// half-size of the cepstral exclusion zone; the transform's central spike
/// and axis-aligned scene ridges dominate everything closer.
const DC_EXCLUDE: i64 = 3;
/// Spacing samples may disagree by at most this fraction of their median
/// before the comb is declared incoherent.
const SPACING_TOLERANCE: f64 = 0.35;
/// A stripe-edge hit must sit at least `-ln(DROP_RATIO)` below the radial
/// envelope in the whitened log spectrum. Stripe flanks fall into dark
/// zero valleys well below the envelope; edges on bright scene ridges sit
/// at or above it and are skipped. Comparing against the envelope keeps
/// the gate meaningful at every radius despite the steep falloff of
/// natural-scene spectra.
const DROP_RATIO: f64 = 0.5;
/// Gaussian presmoothing width (bins) for stripe-edge detection. Averaging
/// nearby bins lifts the stripe valleys out of the per-bin noise floor
/// without moving them: a straight valley smoothed symmetrically widens
/// but keeps its center line. Kept narrow so combs down to ~5-bin spacing
/// survive. Smoothing only feeds the edge tracer; the spacing profile
/// averages whole lines and needs no help.
const EDGE_SMOOTH_SIGMA: f64 = 1.0;
/// Maximum per-line drift (bins) when chaining valley hits on adjacent
/// scan lines into one edge run. The scan axis is chosen so every stripe
/// edge tilts at most 45 degrees from it, bounding the true drift by one
/// bin per line; the margin absorbs sub-bin refinement noise. Hits farther
/// apart belong to different edges of the valley comb.
const RUN_STEP_BINS: f64 = 2.0;

/// Knobs for the stripe pipeline. [`BlindConfig::default`] reproduces the
/// documented defaults; every stage reads only this value, so a fixed
/// config makes the whole pipeline deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct BlindConfig {
    /// Transform the two axis gradients instead of the raw image and merge
    /// their spectra. The stripe comb rides on a flatter baseline there, so
    /// it defaults to on.
    pub gradient: bool,
    /// Apply a raised-cosine window before the transform to keep frame
    /// edges from stamping a bright axis-aligned cross over the stripes.
    pub window: bool,
    /// Percentile of spectral gradient magnitude that counts as a stripe
    /// edge. In (0, 100).
    pub edge_percentile: f64,
    /// Points per fitted edge segment.
    pub segment_len: usize,
    /// Step between segment starts; `segment_len / 2` gives 50% overlap.
    pub stride: usize,
    /// Minimum number of coherent segments for a confident angle.
    pub min_segments: usize,
    /// Largest tolerated median deviation of segment angles from the fused
    /// angle, in degrees.
    pub max_angle_spread_deg: f64,
    /// Largest tolerated RMS perpendicular residual of a segment's line
    /// fit, in bins; segments above it are dropped.
    pub max_segment_rms_bins: f64,
}

impl Default for BlindConfig {
    fn default() -> Self {
        Self {
            gradient: true,
            window: true,
            edge_percentile: 95.0,
            segment_len: 16,
            stride: 8,
            min_segments: 3,
            max_angle_spread_deg: 20.0,
            max_segment_rms_bins: 2.0,
        }
    }
}

impl BlindConfig {
    fn validate(&self) -> Result<()> {
        if !(self.edge_percentile > 0.0 && self.edge_percentile < 100.0) {
            return Err(Error::InvalidParam(format!(
                "edge percentile must lie in (0, 100), got {}",
                self.edge_percentile
            )));
        }
        if self.segment_len < 4 {
            return Err(Error::InvalidParam(format!(
                "segment length must be at least 4, got {}",
                self.segment_len
            )));
        }
        if self.stride == 0 || self.stride > self.segment_len {
            return Err(Error::InvalidParam(format!(
                "stride must lie in 1..=segment_len, got {}",
                self.stride
            )));
        }
        if self.min_segments == 0 {
            return Err(Error::InvalidParam(
                "minimum segment count must be positive".into(),
            ));
        }
        if !(self.max_angle_spread_deg > 0.0 && self.max_angle_spread_deg.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "angle spread gate must be positive and finite, got {}",
                self.max_angle_spread_deg
            )));
        }
        if !(self.max_segment_rms_bins > 0.0 && self.max_segment_rms_bins.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "segment residual gate must be positive and finite, got {}",
                self.max_segment_rms_bins
            )));
        }
        Ok(())
    }
}

fn check_min_side(img: &Image) -> Result<()> {
    if img.rows() < MIN_SIDE || img.cols() < MIN_SIDE {
        return Err(Error::InvalidParam(format!(
            "blind estimation needs at least {MIN_SIDE}x{MIN_SIDE} pixels, got {}x{}",
            img.rows(),
            img.cols()
        )));
    }
    Ok(())
}

/// Angle folded into `[0, 180)`.
fn norm180(a: f64) -> f64 {
    let mut x = a % 180.0;
    if x < 0.0 {
        x += 180.0;
    }
    // One more fold catches x == 180.0 after rounding, and -0.0.
    (x % 180.0) + 0.0
}

/// Circular distance between two axial angles (period 180).
fn circ_dist_180(a: f64, b: f64) -> f64 {
    let d = norm180(a - b);
    d.min(180.0 - d)
}

fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    median_of_sorted(&v)
}

/// Median of axial angles (period 180). Angles are recentered around the
/// doubled-angle mean direction first so the median is immune to the
/// 0/180 wrap.
fn circular_median_180(angles: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for &a in angles {
        let r = 2.0 * a.to_radians();
        s += r.sin();
        c += r.cos();
    }
    let center = 0.5 * s.atan2(c).to_degrees();
    let mut offsets: Vec<f64> = angles
        .iter()
        .map(|&a| {
            let mut d = norm180(a - center);
            if d >= 90.0 {
                d -= 180.0;
            }
            d
        })
        .collect();
    offsets.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    norm180(center + median_of_sorted(&offsets))
}

/// Nearest-rank percentile of a finite sample.
fn percentile(values: &[f64], pct: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((v.len() - 1) as f64 * pct / 100.0).round() as usize;
    v[idx]
}

/// Separable Gaussian blur with index-clamped borders.
fn gaussian_smooth(img: &Image, sigma: f64) -> Image {
    let radius = (3.0 * sigma).ceil() as i64;
    let weights: Vec<f64> = (-radius..=radius)
        .map(|k| (-0.5 * (k as f64 / sigma) * (k as f64 / sigma)).exp())
        .collect();
    let norm: f64 = weights.iter().sum();
    let rows = img.rows();
    let cols = img.cols();
    let horizontal = Image::from_fn(rows, cols, |r, c| {
        let mut acc = 0.0;
        for (w, k) in weights.iter().zip(-radius..=radius) {
            let cc = (c as i64 + k).clamp(0, cols as i64 - 1) as usize;
            acc += w * img.at(r, cc);
        }
        acc / norm
    })
    .expect("source image is valid");
    Image::from_fn(rows, cols, |r, c| {
        let mut acc = 0.0;
        for (w, k) in weights.iter().zip(-radius..=radius) {
            let rr = (r as i64 + k).clamp(0, rows as i64 - 1) as usize;
            acc += w * horizontal.at(rr, c);
        }
        acc / norm
    })
    .expect("source image is valid")
}

/// Magnitude of the central-difference gradient, index-clamped at borders.
fn gradient_magnitude(img: &Image) -> Image {
    let rows = img.rows();
    let cols = img.cols();
    Image::from_fn(rows, cols, |r, c| {
        let up = img.at(r.saturating_sub(1), c);
        let down = img.at((r + 1).min(rows - 1), c);
        let left = img.at(r, c.saturating_sub(1));
        let right = img.at(r, (c + 1).min(cols - 1));
        let gx = 0.5 * (right - left);
        let gy = 0.5 * (down - up);
        (gx * gx + gy * gy).sqrt()
    })
    .expect("source image is valid")
}

/// Separable raised-cosine taper over the full frame.
fn apply_raised_cosine(img: &Image) -> Image {
    let rows = img.rows();
    let cols = img.cols();
    let taper = |i: usize, n: usize| -> f64 {
        0.5 * (1.0 - (2.0 * core::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
    };
    Image::from_fn(rows, cols, |r, c| {
        img.at(r, c) * taper(r, rows) * taper(c, cols)
    })
    .expect("source image is valid")
}

/// Central-difference derivative along one axis, index-clamped at borders.
fn directional_gradient(img: &Image, along_cols: bool) -> Image {
    let rows = img.rows();
    let cols = img.cols();
    Image::from_fn(rows, cols, |r, c| {
        if along_cols {
            let left = img.at(r, c.saturating_sub(1));
            let right = img.at(r, (c + 1).min(cols - 1));
            0.5 * (right - left)
        } else {
            let up = img.at(r.saturating_sub(1), c);
            let down = img.at((r + 1).min(rows - 1), c);
            0.5 * (down - up)
        }
    })
    .expect("source image is valid")
}

/// DC-centered log-magnitude spectrum of the (optionally
/// gradient-preprocessed, optionally windowed) frame. Every stripe reader
/// starts here. Deliberately not normalized: differences between bins stay
/// true log ratios of magnitude, which the valley-darkness gate relies on.
///
/// Gradient preprocessing transforms each derivative component separately
/// and combines the two magnitudes per bin. Each branch is linear, so the
/// blur's zero comb survives exactly; rectifying into a gradient-magnitude
/// image first would intermodulate the comb and stamp spurious stripes at
/// twice the true frequency.
fn stripe_spectrum(img: &Image, cfg: &BlindConfig) -> Image {
    use crate::spectral::fftshift;
    let magnitudes: Vec<f64> = if cfg.gradient {
        let mut gx = directional_gradient(img, true);
        let mut gy = directional_gradient(img, false);
        if cfg.window {
            gx = apply_raised_cosine(&gx);
            gy = apply_raised_cosine(&gy);
        }
        let sx = dft2(&gx);
        let sy = dft2(&gy);
        sx.bins()
            .iter()
            .zip(sy.bins())
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr()).sqrt())
            .collect()
    } else {
        let work = if cfg.window {
            apply_raised_cosine(img)
        } else {
            img.clone()
        };
        dft2(&work).bins().iter().map(|b| b.norm()).collect()
    };
    // True log with a peak-relative floor: eps only keeps exact zeros
    // finite, 9 decades down, far below any leakage floor a finite frame
    // can produce. `ln_1p` would not do here; its +1 offset compresses dim
    // bins and log differences would stop being magnitude ratios.
    let peak = magnitudes.iter().cloned().fold(0.0, f64::max);
    let eps = if peak > 0.0 { peak * 1e-9 } else { 1.0 };
    let logs: Vec<f64> = magnitudes.iter().map(|m| (eps + m).ln()).collect();
    let raw = Image::new(img.rows(), img.cols(), logs).expect("finite by construction");
    fftshift(&raw)
}

/// One first-edge hit scanning outward from the central column or row.
struct EdgeTrace {
    /// (row, col) hit coordinates ordered by the scan axis.
    points: Vec<(f64, f64)>,
}

/// Mean spectrum value per integer-radius ring around the DC bin. Dividing
/// by this envelope removes the radial falloff that every natural scene
/// stamps on its spectrum, leaving angular structure such as stripe
/// valleys.
fn radial_envelope(spec: &Image) -> Vec<f64> {
    let rows = spec.rows();
    let cols = spec.cols();
    let ctr_r = (rows / 2) as f64;
    let ctr_c = (cols / 2) as f64;
    let max_ring = (ctr_r * ctr_r + ctr_c * ctr_c).sqrt().ceil() as usize + 2;
    let mut sums = vec![0.0f64; max_ring];
    let mut counts = vec![0u32; max_ring];
    for r in 0..rows {
        for c in 0..cols {
            let dy = r as f64 - ctr_r;
            let dx = c as f64 - ctr_c;
            let ring = (dx * dx + dy * dy).sqrt().round() as usize;
            sums[ring] += spec.at(r, c);
            counts[ring] += 1;
        }
    }
    sums.iter()
        .zip(&counts)
        .map(|(&s, &n)| if n > 0 { s / n as f64 } else { 0.0 })
        .collect()
}

/// Ring index of a bin for [`radial_envelope`] lookups.
fn ring_of(r: usize, c: usize, rows: usize, cols: usize) -> usize {
    let dy = r as f64 - (rows / 2) as f64;
    let dx = c as f64 - (cols / 2) as f64;
    (dx * dx + dy * dy).sqrt().round() as usize
}

/// Subtract the radial envelope from a log spectrum, bin by bin. What is
/// left measures local contrast against everything else at the same
/// radius: stripe ridges come out positive, blur-zero valleys strongly
/// negative, and the isotropic decay that otherwise dominates gradient
/// statistics cancels entirely, so flank edges compete for the gradient
/// percentile on equal terms at every radius.
fn whiten(spec: &Image) -> Image {
    let envelope = radial_envelope(spec);
    let (rows, cols) = (spec.rows(), spec.cols());
    Image::from_fn(rows, cols, |r, c| {
        spec.at(r, c) - envelope[ring_of(r, c, rows, cols)]
    })
    .expect("spectrum dimensions are valid")
}

/// For each line across the whitened spectrum, start at the line's
/// brightest bin (its crossing of the central bright stripe), walk outward
/// both ways, and record every valley floor where the edge strength clears
/// `threshold` while the spectrum sits at least `-ln(DROP_RATIO)` below
/// its radial envelope. Hits on adjacent lines within [`RUN_STEP_BINS`] of
/// each other chain into runs, one run per contiguous stretch of a stripe
/// edge; the runs come back as separate traces.
///
/// The blur comb is a family of parallel dark valleys, and which members a
/// given line resolves depends on radius: near the scan axis the scene is
/// bright enough to light up the inner valleys, far out only the deep
/// outer ones clear the darkness gate. No single valley is visible on
/// every line, so the tracer keeps them all; every member of the family
/// runs parallel to the motion axis and any run long enough to window
/// carries the angle. Chaining by proximity across lines keeps each run on
/// one member, which is what the collinearity gate downstream needs.
///
/// Three details carry the robustness. The envelope condition
/// distinguishes a stripe flank (an edge falling into a blur-zero valley)
/// from the bright ridge contours the scene's own spectrum puts near DC:
/// ridges sit above the envelope at their radius, valleys far below it.
/// Hits within [`DC_EXCLUDE`] of the scan axis are rejected, since
/// axis-aligned scene ridges (horizons, buildings) shed edge bins that hug
/// the axis through DC. And hits must stay inside the inscribed spectral
/// disk: the square's corners hold frequencies past Nyquist along one
/// axis, where gradient preprocessing and windowing stamp structure of
/// their own.
fn flank_traces(
    whitened: &Image,
    edges: &Image,
    threshold: f64,
    scan_rows: bool,
    floor: f64,
) -> Vec<EdgeTrace> {
    let spec = whitened;
    let rows = spec.rows();
    let cols = spec.cols();
    let ctr = if scan_rows { cols / 2 } else { rows / 2 } as i64;
    let span = if scan_rows { cols } else { rows } as i64;
    let lines = if scan_rows { rows } else { cols };
    let at = |line: usize, k: i64| {
        if scan_rows {
            spec.at(line, k as usize)
        } else {
            spec.at(k as usize, line)
        }
    };
    let max_ring = rows.min(cols) / 2 - 1;
    struct Run {
        last_line: usize,
        last_k: f64,
        points: Vec<(f64, f64)>,
    }
    let mut open: Vec<Run> = Vec::new();
    let mut done: Vec<EdgeTrace> = Vec::new();
    for line in 0..lines {
        // Collect this line's valley floors, both directions from the
        // stripe crossing.
        let start = (0..span).max_by(|&a, &b| at(line, a).total_cmp(&at(line, b))).unwrap_or(ctr);
        let mut ks: Vec<f64> = Vec::new();
        for step in [-1i64, 1i64] {
            let mut k = start;
            while k > 0 && k < span - 1 {
                let (r, c) = if scan_rows {
                    (line, k as usize)
                } else {
                    (k as usize, line)
                };
                let dark = spec.at(r, c) <= floor;
                if edges.at(r, c) > threshold
                    && dark
                    && (k - ctr).abs() > DC_EXCLUDE
                    && ring_of(r, c, rows, cols) <= max_ring
                {
                    // Slide outward while the spectrum keeps falling; the
                    // max-gradient bin wobbles with scene texture, but the
                    // valley floor sits on the zero line itself.
                    while k + step >= 0 && k + step < span && at(line, k + step) < at(line, k) {
                        k += step;
                    }
                    // A slide that runs off the frame never found a floor.
                    if k == 0 || k == span - 1 {
                        break;
                    }
                    // Only a strict local minimum is a floor; the trigger
                    // can also fire on the rising flank just past one.
                    if at(line, k - 1) > at(line, k) && at(line, k + 1) > at(line, k) {
                        // Sub-bin floor position from the 3-point parabola
                        // through the minimum. Integer snapping would
                        // alias shallow stripe tilts to the scan axes; the
                        // tilt of the valley's center line is exactly the
                        // signal the segment fits downstream must read.
                        let (prev, here, next) = (at(line, k - 1), at(line, k), at(line, k + 1));
                        let denom = prev + next - 2.0 * here;
                        let delta = (0.5 * (prev - next) / denom).clamp(-0.5, 0.5);
                        ks.push(k as f64 + delta);
                    }
                }
                k += step;
            }
        }
        ks.sort_by(f64::total_cmp);
        ks.dedup_by(|a, b| (*a - *b).abs() < 1.0);
        // Extend the run that tracked this valley on the previous line, or
        // open a new one. A run already extended on this line has
        // `last_line == line` and cannot take a second hit.
        for &kf in &ks {
            let nearest = open
                .iter_mut()
                .filter(|run| run.last_line + 1 == line && (run.last_k - kf).abs() <= RUN_STEP_BINS)
                .min_by(|a, b| (a.last_k - kf).abs().total_cmp(&(b.last_k - kf).abs()));
            let point = if scan_rows { (line as f64, kf) } else { (kf, line as f64) };
            match nearest {
                Some(run) => {
                    run.last_line = line;
                    run.last_k = kf;
                    run.points.push(point);
                }
                None => open.push(Run {
                    last_line: line,
                    last_k: kf,
                    points: vec![point],
                }),
            }
        }
        // Runs the line left behind can never extend again.
        let mut i = 0;
        while i < open.len() {
            if open[i].last_line < line {
                let run = open.swap_remove(i);
                done.push(EdgeTrace { points: run.points });
            } else {
                i += 1;
            }
        }
    }
    done.extend(open.into_iter().map(|run| EdgeTrace { points: run.points }));
    done
}

/// Total-least-squares line through a point cloud: returns the principal
/// direction's angle in grid coordinates (degrees from the +col axis,
/// row axis pointing down) and the RMS perpendicular residual in bins.
fn tls_angle_and_rms(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let (mut mr, mut mc) = (0.0, 0.0);
    for &(r, c) in pts {
        mr += r;
        mc += c;
    }
    mr /= n;
    mc /= n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(r, c) in pts {
        let x = c - mc;
        let y = r - mr;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    sxx /= n;
    sxy /= n;
    syy /= n;
    let beta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mean = 0.5 * (sxx + syy);
    let diff = 0.5 * (sxx - syy);
    let lambda_min = mean - (diff * diff + sxy * sxy).sqrt();
    (beta.to_degrees(), lambda_min.max(0.0).sqrt())
}

/// Stripe angle measured on the spectrum grid mapped to the motion angle.
/// Identity for square frames; rectangular frames scale the tangent by the
/// aspect ratio because row and column bins span different frequency steps.
fn grid_angle_to_motion(grid_deg: f64, rows: usize, cols: usize) -> f64 {
    if rows == cols {
        return grid_deg;
    }
    let y = rows as f64 * sin_deg(grid_deg);
    let x = cols as f64 * cos_deg(grid_deg);
    norm180(y.atan2(x).to_degrees())
}

/// Blind blur-angle estimate from the dark-stripe orientation.
///
/// Pipeline: optional gradient preprocessing, optional raised-cosine
/// window, DC-centered log-magnitude spectrum, 95th-percentile spectral
/// edge mask, outward first-hit traces on both sides of the central bright
/// stripe, overlapping 16-point total-least-squares segments, median
/// fusion. Returns the angle in degrees within `[0, 180)` plus diagnostics
/// holding every segment angle and the fused value.
///
/// # Errors
/// Frames smaller than 64x64 are rejected; fewer than
/// [`BlindConfig::min_segments`] coherent segments, or a fused result the
/// segments disagree with beyond [`BlindConfig::max_angle_spread_deg`],
/// reports low confidence.
pub fn estimate_angle_spectrum(blurred: &Image, cfg: &BlindConfig) -> Result<(f64, Diagnostics)> {
    cfg.validate()?;
    check_min_side(blurred)?;
    let raw = stripe_spectrum(blurred, cfg);
    let white = whiten(&gaussian_smooth(&raw, EDGE_SMOOTH_SIGMA));
    let rows = white.rows();
    let cols = white.cols();
    let edges = gradient_magnitude(&white);
    let threshold = percentile(edges.pixels(), cfg.edge_percentile);
    if threshold <= 0.0 {
        return Err(Error::LowConfidence(
            "spectrum is featureless; no stripe edges to trace".into(),
        ));
    }

    // Coarse stripe orientation from the bright central ridge decides
    // whether outward scans run along rows or along columns. It reads the
    // unsmoothed spectrum: smoothing reweights broad ridges against narrow
    // ones and can flip the verdict.
    let bright = percentile(raw.pixels(), 99.0);
    let ctr_r = (rows / 2) as f64;
    let ctr_c = (cols / 2) as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for r in 0..rows {
        for c in 0..cols {
            let w = raw.at(r, c) - bright;
            if w > 0.0 {
                let x = c as f64 - ctr_c;
                let y = ctr_r - r as f64;
                sxx += w * x * x;
                sxy += w * x * y;
                syy += w * y * y;
            }
        }
    }
    let ridge_deg = 0.5 * (2.0 * sxy).atan2(sxx - syy).to_degrees();
    let scan_rows = ridge_deg.abs() > 45.0;

    let mut diag = Diagnostics::default();
    let mut rejected = 0usize;
    for trace in flank_traces(&white, &edges, threshold, scan_rows, DROP_RATIO.ln()) {
        if trace.points.len() < cfg.segment_len {
            continue;
        }
        let mut start = 0;
        while start + cfg.segment_len <= trace.points.len() {
            let window = &trace.points[start..start + cfg.segment_len];
            let (beta_deg, rms) = tls_angle_and_rms(window);
            if rms <= cfg.max_segment_rms_bins {
                // Grid fit runs with rows increasing downward; flip to the
                // y-up convention, then a stripe at angle `a` from the +x
                // axis means motion at `a - 90` (stripes lie perpendicular
                // to the smear).
                diag.segment_angles_deg.push(norm180(-beta_deg - 90.0));
            } else {
                rejected += 1;
            }
            start += cfg.stride;
        }
    }

    if diag.segment_angles_deg.len() < cfg.min_segments {
        return Err(Error::LowConfidence(format!(
            "only {} coherent stripe segments (need {}), {} rejected for scatter",
            diag.segment_angles_deg.len(),
            cfg.min_segments,
            rejected
        )));
    }
    let fused_grid = circular_median_180(&diag.segment_angles_deg);
    let spreads: Vec<f64> = diag
        .segment_angles_deg
        .iter()
        .map(|&a| circ_dist_180(a, fused_grid))
        .collect();
    let spread = median(&spreads);
    if spread > cfg.max_angle_spread_deg {
        return Err(Error::LowConfidence(format!(
            "stripe segments disagree: median deviation {spread:.1} degrees from {fused_grid:.1}"
        )));
    }
    diag.fused_angle_deg = Some(fused_grid);
    let theta = grid_angle_to_motion(fused_grid, rows, cols);
    if rows != cols {
        diag.warn(format!(
            "rectangular frame: stripe angle {fused_grid:.2} remapped to motion angle {theta:.2}"
        ));
    }
    Ok((theta, diag))
}

/// Bilinear sample with coordinates clamped to the frame.
fn sample_bilinear(img: &Image, r: f64, c: f64) -> f64 {
    let rows = img.rows();
    let cols = img.cols();
    let rc = r.clamp(0.0, (rows - 1) as f64);
    let cc = c.clamp(0.0, (cols - 1) as f64);
    let r0 = rc.floor() as usize;
    let c0 = cc.floor() as usize;
    let r1 = (r0 + 1).min(rows - 1);
    let c1 = (c0 + 1).min(cols - 1);
    let fr = rc - r0 as f64;
    let fc = cc - c0 as f64;
    let top = img.at(r0, c0) * (1.0 - fc) + img.at(r0, c1) * fc;
    let bottom = img.at(r1, c0) * (1.0 - fc) + img.at(r1, c1) * fc;
    top * (1.0 - fr) + bottom * fr
}

/// Rotate about the DC bin so the direction at `psi` radians (y-up grid
/// angle) lands on the +col axis.
fn rotate_about_dc(img: &Image, psi: f64) -> Image {
    let rows = img.rows();
    let cols = img.cols();
    let ctr_r = (rows / 2) as f64;
    let ctr_c = (cols / 2) as f64;
    let (sin_p, cos_p) = psi.sin_cos();
    Image::from_fn(rows, cols, |r, c| {
        let x = c as f64 - ctr_c;
        let y = ctr_r - r as f64;
        let xin = cos_p * x - sin_p * y;
        let yin = sin_p * x + cos_p * y;
        sample_bilinear(img, ctr_r - yin, ctr_c + xin)
    })
    .expect("source image is valid")
}

/// Blind blur-length estimate from the dark-stripe spacing, given an angle.
///
/// The DC-centered log-magnitude spectrum is rotated so the stripe normal
/// lies along the +col axis, columns are averaged into a 1D profile, and
/// strict local minima (quadratically refined to sub-bin positions) mark
/// the stripe comb. `D` is the median spacing between consecutive minima
/// and the length is `M_eff / D`, where `M_eff` is the frame side for
/// square frames and the equivalent normal-direction extent otherwise.
///
/// # Errors
/// Low confidence when fewer than three minima exist in the reliable
/// central band, when their spacing is incoherent, when the spacing falls
/// below two bins, or when the implied length exceeds the frame.
pub fn estimate_length_spectrum(
    blurred: &Image,
    theta_deg: f64,
    cfg: &BlindConfig,
) -> Result<(f64, Diagnostics)> {
    cfg.validate()?;
    check_min_side(blurred)?;
    if !theta_deg.is_finite() {
        return Err(Error::InvalidParam("blur angle must be finite".into()));
    }
    let theta = norm180(theta_deg);
    let spec = stripe_spectrum(blurred, cfg);
    let rows = spec.rows();
    let cols = spec.cols();

    // Stripe normal on the spectrum grid; row and column bins differ in
    // frequency step for rectangular frames, hence the per-axis division.
    let nx = cos_deg(theta) / cols as f64;
    let ny = sin_deg(theta) / rows as f64;
    let psi = ny.atan2(nx);
    let rotated = rotate_about_dc(&spec, psi);

    let profile: Vec<f64> = (0..cols)
        .map(|c| (0..rows).map(|r| rotated.at(r, c)).sum::<f64>() / rows as f64)
        .collect();

    // Rotation clamps samples at the frame edge, so only the band that
    // stays inside the frame at any rotation is trusted.
    let ctr_c = (cols / 2) as f64;
    let safe = (rows.min(cols) / 2) as f64 / core::f64::consts::SQRT_2;
    let lo = ((ctr_c - safe).ceil() as usize).max(1);
    let hi = ((ctr_c + safe).floor() as usize).min(cols - 2);

    let mut minima = Vec::new();
    for i in lo..=hi {
        let (a, b, c) = (profile[i - 1], profile[i], profile[i + 1]);
        if b < a && b < c {
            // 3-point quadratic vertex; the strict minimum makes the
            // denominator positive.
            let delta = 0.5 * (a - c) / (a - 2.0 * b + c);
            minima.push(i as f64 + delta.clamp(-0.5, 0.5));
        }
    }
    if minima.len() < 3 {
        return Err(Error::LowConfidence(format!(
            "found {} dark-stripe minima, need 3 for a spacing",
            minima.len()
        )));
    }
    let spacings: Vec<f64> = minima.windows(2).map(|w| w[1] - w[0]).collect();
    let d = median(&spacings);
    let deviations: Vec<f64> = spacings.iter().map(|&s| (s - d).abs()).collect();
    if median(&deviations) > SPACING_TOLERANCE * d {
        return Err(Error::LowConfidence(format!(
            "stripe spacing incoherent: median {d:.2} bins with median deviation {:.2}",
            median(&deviations)
        )));
    }
    if d < 2.0 {
        return Err(Error::LowConfidence(format!(
            "stripe spacing {d:.2} bins is below the resolvable limit"
        )));
    }
    let m_eff = 1.0 / (nx * nx + ny * ny).sqrt();
    let length = m_eff / d;
    if length >= rows.min(cols) as f64 {
        return Err(Error::LowConfidence(format!(
            "implied blur length {length:.1} px exceeds the frame"
        )));
    }

    let mut diag = Diagnostics::default();
    diag.stripe_spacing_bins = Some(d);
    if rows != cols {
        diag.warn(format!(
            "rectangular frame: spacing read along the stripe normal, effective extent {m_eff:.1} bins"
        ));
    }
    Ok((length, diag))
}

/// Full blind pipeline: stripe angle, then stripe spacing, fused into one
/// report. Lengths below the two-pixel identity threshold report "no blur".
pub fn estimate_spectral_blind(blurred: &Image, cfg: &BlindConfig) -> Result<EstimateReport> {
    let (theta, mut diag) = estimate_angle_spectrum(blurred, cfg)?;
    let (length, length_diag) = estimate_length_spectrum(blurred, theta, cfg)?;
    diag.stripe_spacing_bins = length_diag.stripe_spacing_bins;
    diag.warnings.extend(length_diag.warnings);
    diag.clamps.extend(length_diag.clamps);
    if length < 2.0 {
        diag.warn("stripe spacing implies a sub-identity smear; reporting no blur");
        return Ok(EstimateReport {
            method: EstimateMethod::SpectralBlind,
            params: None,
            diagnostics: diag,
        });
    }
    Ok(EstimateReport {
        method: EstimateMethod::SpectralBlind,
        params: Some(MotionParams::new(theta, length)?),
        diagnostics: diag,
    })
}

/// Cepstral baseline: the blur's zero comb leaves a negative echo in the
/// real cepstrum at the smear vector, so the strongest sufficiently deep
/// negative peak outside the central exclusion zone gives both parameters
/// at once (angle from its direction, length from its radius).
///
/// # Errors
/// Frames smaller than 64x64 are rejected; low confidence when no peak
/// falls below minus three standard deviations of the off-center cepstrum.
pub fn estimate_cepstrum(blurred: &Image) -> Result<EstimateReport> {
    check_min_side(blurred)?;
    let cep = cepstrum2(blurred)?;
    let rows = cep.rows();
    let cols = cep.cols();
    let ctr_r = (rows / 2) as i64;
    let ctr_c = (cols / 2) as i64;

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0.0;
    let mut peak = (0i64, 0i64, f64::INFINITY);
    for r in 0..rows {
        for c in 0..cols {
            let dr = r as i64 - ctr_r;
            let dc = c as i64 - ctr_c;
            if dr.abs() <= DC_EXCLUDE && dc.abs() <= DC_EXCLUDE {
                continue;
            }
            let v = cep.at(r, c);
            sum += v;
            sum_sq += v * v;
            count += 1.0;
            if v < peak.2 {
                peak = (dr, dc, v);
            }
        }
    }
    let sigma = (sum_sq / count - (sum / count) * (sum / count)).max(0.0).sqrt();
    if !(peak.2 < -3.0 * sigma) {
        return Err(Error::LowConfidence(format!(
            "no cepstral echo: deepest off-center value {:.3e} vs gate {:.3e}",
            peak.2,
            -3.0 * sigma
        )));
    }

    let (dr, dc, _) = peak;
    let x = dc as f64;
    let y_up = -dr as f64;
    let theta = norm180(y_up.atan2(x).to_degrees());
    let length = (x * x + y_up * y_up).sqrt();
    let mut diag = Diagnostics::default();
    diag.peak_offset = Some((dr, dc));
    Ok(EstimateReport {
        method: EstimateMethod::Cepstrum,
        params: Some(MotionParams::new(theta, length)?),
        diagnostics: diag,
    })
}
