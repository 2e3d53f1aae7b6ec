use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimensions, lengths or subsystem indices do not fit together.
    #[error("shape error: {0}")]
    Shape(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A concurrence specification or input file failed validation.
    #[error("validation error: {0}")]
    Validation(String),
    /// A numerical invariant was broken beyond tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// The operation is not applicable to this input.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
