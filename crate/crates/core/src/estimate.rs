//! Shared result types for the parameter estimators.
//!
//! Four estimators produce the same report shape: two reference-based ones
//! (frequency-ratio and moment-difference), the blind spectral-stripe
//! pipeline, and the cepstral baseline. A report either carries recovered
//! motion parameters or explicitly states that no blur was detected; the
//! diagnostics preserve the intermediate quantities a reviewer would want
//! to audit.

use alloc::string::String;
use alloc::vec::Vec;

use crate::psf::MotionParams;

/// Which estimator produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    /// Reference-based sinc-ratio inversion at the two unit frequency bins.
    FreqRef,
    /// Reference-based second-order moment differences.
    MomentRef,
    /// Blind spectral dark-stripe geometry.
    SpectralBlind,
    /// Blind cepstral peak picking.
    Cepstrum,
}

impl EstimateMethod {
    /// Stable string tag used in JSON output.
    pub fn tag(&self) -> &'static str {
        match self {
            EstimateMethod::FreqRef => "freq-ref",
            EstimateMethod::MomentRef => "moment-ref",
            EstimateMethod::SpectralBlind => "spectral-blind",
            EstimateMethod::Cepstrum => "cepstrum",
        }
    }
}

/// Intermediate quantities preserved for auditing an estimate.
///
/// Every field is optional; each estimator fills the ones it computes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Sine-axis sinc coefficient `L*sin(theta)/rows`, from the (1,0) bin.
    pub a: Option<f64>,
    /// Cosine-axis sinc coefficient `L*cos(theta)/cols`, from the (0,1) bin.
    pub b: Option<f64>,
    /// Ratio clamps applied before inverting the sinc (which bin, how far).
    pub clamps: Vec<String>,
    /// Non-fatal oddities worth surfacing ("no blur detected", sign flips).
    pub warnings: Vec<String>,
    /// Largest model residual observed while fitting.
    pub residual_max: Option<f64>,
    /// Per-segment stripe-edge angles before fusion (degrees).
    pub segment_angles_deg: Vec<f64>,
    /// Median-fused stripe angle (degrees).
    pub fused_angle_deg: Option<f64>,
    /// Dark-stripe spacing D in frequency bins.
    pub stripe_spacing_bins: Option<f64>,
    /// Cepstral peak location as a centered (row, col) offset.
    pub peak_offset: Option<(i64, i64)>,
}

impl Diagnostics {
    pub(crate) fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }
}

/// Outcome of a parameter estimation run.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub method: EstimateMethod,
    /// Recovered parameters, or `None` when no blur was detected.
    pub params: Option<MotionParams>,
    pub diagnostics: Diagnostics,
}

impl EstimateReport {
    pub fn no_blur(&self) -> bool {
        self.params.is_none()
    }
}
