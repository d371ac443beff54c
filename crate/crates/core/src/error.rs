use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The singular-value spectrum has no clear gap between kept and dropped values.
    #[error("degenerate spectrum: gap ratio {gap_ratio:.3e} below required {required:.1e}")]
    DegenerateSpectrum { gap_ratio: f64, required: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed dump: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
