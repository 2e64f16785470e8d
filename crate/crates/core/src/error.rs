use thiserror::Error;

/// Errors raised by the density machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {x} lies outside the support [-{extent}, {extent}]")]
    OutOfSupport { x: f64, extent: f64 },

    #[error("density diverges at r = vt = {0}")]
    Divergent(f64),

    #[error("series for c = {c} diverged at harmonic h = {h} (|partial sum| = {magnitude:e})")]
    SeriesDivergence { c: u32, h: u32, magnitude: f64 },

    #[error("no plateau of FS0 found for c = {c} before divergence onset at h = {onset}")]
    NoPlateau { c: u32, onset: u32 },

    #[error("truncation policy too small for c = {c}: {reason}")]
    PolicyTooSmall { c: u32, reason: String },

    #[error("no Fourier table for c = {0}")]
    MissingTable(u32),

    #[error("rectangle widths out of order: {0}")]
    WidthOrder(String),

    #[error("segment ordering a < b < c violated: {0}")]
    OrderingViolation(String),

    #[error("differentiation stencil at x = {x} cannot avoid breakpoint {breakpoint}")]
    BreakpointStraddle { x: f64, breakpoint: f64 },

    #[error("dilogarithm argument {0} > 1 is off the real branch; use re_dilog")]
    DilogDomain(f64),

    #[error("empty sample set")]
    EmptySamples,

    #[error("cache error: {0}")]
    Cache(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
