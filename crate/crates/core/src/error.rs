use alloc::string::String;

/// Every failure the core can report.
///
/// The variants mirror the failure classes of the public operations so that
/// callers (in particular the command line driver) can map them onto exit
/// codes without parsing messages.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("numeric failure at step {step}: {detail}")]
    NumericFailure { step: usize, detail: String },
    #[error("pole: {0}")]
    Pole(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("trace is not simple: {0}")]
    NotSimple(String),
    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("delta too large: {0}")]
    DeltaTooLarge(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("no radial limit: {0}")]
    NoRadialLimit(String),
    #[error("sampling failure: {0}")]
    SamplingFailure(String),
}

impl Error {
    /// True for failures caused by the numbers rather than by the caller.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NumericFailure { .. } | Error::NoRadialLimit(_) | Error::SamplingFailure(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$variant(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
