//! Error type shared by every operation in this crate.

use alloc::string::String;
use core::fmt;

/// Convenience alias used by all fallible operations.
pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes surfaced by the library.
///
/// Estimators distinguish *errors* (inputs that cannot be processed) from
/// the "no blur detected" outcome, which is reported as a successful
/// [`crate::estimate::EstimateReport`] with no parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Two images that must share a shape do not.
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// An image with zero rows or columns was supplied.
    EmptyImage,
    /// A pixel value was NaN or infinite.
    NonFinite,
    /// A parameter violated its documented domain. The message names it.
    InvalidParam(String),
    /// A convolution kernel does not fit inside the image for the requested
    /// extent.
    KernelTooLarge {
        kernel: (usize, usize),
        image: (usize, usize),
    },
    /// A value left the principal branch of the inverse sinc, beyond the
    /// documented clamp slack.
    SincBranch { value: f64 },
    /// Blurred/reference moment differences are inconsistent with any blur
    /// (negative radicand beyond tolerance).
    InconsistentFrames { radicand: f64 },
    /// A blind estimator could not find enough coherent evidence. The reason
    /// is a short human-readable diagnostic.
    LowConfidence(String),
    /// An inverse or Wiener filter would divide by (numerically) zero.
    SingularFilter,
    /// The image carries no mass (`m00 == 0`) where a normalization needs it.
    NullImage,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            Error::EmptyImage => write!(f, "image has zero rows or columns"),
            Error::NonFinite => write!(f, "image contains non-finite pixel values"),
            Error::InvalidParam(msg) => write!(f, "invalid parameter: {msg}"),
            Error::KernelTooLarge { kernel, image } => write!(
                f,
                "kernel {}x{} does not fit image {}x{}",
                kernel.0, kernel.1, image.0, image.1
            ),
            Error::SincBranch { value } => write!(
                f,
                "value {value} is outside the principal sinc branch [0, 1]"
            ),
            Error::InconsistentFrames { radicand } => write!(
                f,
                "blurred/reference moments inconsistent with a blur (radicand {radicand:e})"
            ),
            Error::LowConfidence(reason) => write!(f, "low-confidence estimate: {reason}"),
            Error::SingularFilter => write!(f, "filter is singular at the requested noise level"),
            Error::NullImage => write!(f, "image has zero total mass"),
        }
    }
}

impl core::error::Error for Error {}
