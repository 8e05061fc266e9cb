use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("lineshape kind mismatch: expected {expected}, got {actual}")]
    KindMismatch {
        expected: &'static str,
        actual: &'static str,
    },
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("invalid delay grid: {0}")]
    InvalidGrid(String),

    #[error("field {field} kV/cm outside window [{min}, {max}]")]
    FieldOutOfWindow { field: f64, min: f64, max: f64 },
    #[error("no real field reaches {target} µeV (beyond the parabola extremum)")]
    NoRealRoot { target: f64 },
    #[error("fields {roots:?} kV/cm reach the target but lie outside [{min}, {max}]")]
    OutOfWindow { roots: Vec<f64>, min: f64, max: f64 },

    #[error("total intensity is zero")]
    ZeroIntensity,
    #[error("grid step {step} ps too coarse for detector response (max {max_step} ps)")]
    GridTooCoarse { step: f64, max_step: f64 },
    #[error("grid half-span {half_span} ps too short for detector response (need {required} ps)")]
    SpanTooShort { half_span: f64, required: f64 },
    #[error("traces are sampled on different grids")]
    GridMismatch,

    #[error("fit did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("non-physical fit result: {0}")]
    NonPhysical(String),
    #[error("curve has no interior maximum")]
    NoPeak,

    #[error("synthesis window {needed} ps exceeds trace half-span {available} ps")]
    WindowExceedsTrace { needed: f64, available: f64 },
    #[error("span {span} µeV narrower than 3 FWHM ({required} µeV)")]
    SpanTooNarrow { span: f64, required: f64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for I/O, parsing and validation failures, as opposed to numerical ones.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Io(_)
                | Error::Csv(_)
                | Error::Json(_)
                | Error::Parse(_)
                | Error::InvalidParameter(_)
                | Error::InvalidSpectrum(_)
                | Error::InvalidGrid(_)
        )
    }
}
