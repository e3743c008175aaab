use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Validation failures (bad parameters, malformed inputs) are kept apart from
/// numerical failures (a residual or fit above its tolerance) so that callers
/// can react differently; see [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("aliasing: spectrum at the Nyquist frequency is {ratio:.3e} of its maximum (limit {limit:.1e})")]
    Alias { ratio: f64, limit: f64 },

    #[error("singular evaluation point at index {index}: input is not C^2 there (indicator {indicator:.3e})")]
    Singularity { index: usize, indicator: f64 },

    #[error("input does not decay at the box edge (edge magnitude {edge:.3e} relative to peak)")]
    Tail { edge: f64 },

    #[error("constant calibration failed: representations disagree by {residual:.3e} (tolerance {tolerance:.1e})")]
    Calibration { residual: f64, tolerance: f64 },

    #[error("symbol has no stored plus/minus factorization: {0}")]
    Factorization(String),

    #[error("residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("order a = {a} not allowed here: {reason}")]
    Order { a: f64, reason: &'static str },

    #[error("boundary fit failed: residual {residual:.3e} against limit {limit:.3e}")]
    Fit { residual: f64, limit: f64 },

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("lambda = {lambda} lies within {distance:.3e} of eigenvalue {eigenvalue}")]
    SpectrumIntersection {
        lambda: num_complex::Complex64,
        eigenvalue: f64,
        distance: f64,
    },

    #[error("lambda = {lambda} hits the spectrum: numerical kernel dimension {kernel_dim}")]
    EigenvalueCollision {
        lambda: num_complex::Complex64,
        kernel_dim: usize,
    },

    #[error("ambiguous class: exponents {first} and {second} fit within 10% of each other")]
    AmbiguousClass { first: f64, second: f64 },

    #[error("integrand not integrable under refinement: {0}")]
    Integrability(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical tolerance rather than of input validation.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Alias { .. }
                | Error::Singularity { .. }
                | Error::Tail { .. }
                | Error::Calibration { .. }
                | Error::Residual { .. }
                | Error::Fit { .. }
                | Error::SingularMatrix
                | Error::SpectrumIntersection { .. }
                | Error::EigenvalueCollision { .. }
                | Error::AmbiguousClass { .. }
                | Error::Integrability(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
