use alloc::string::String;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("weight mismatch: partition of {partition} against class of {class}")]
    WeightMismatch { partition: u32, class: u32 },
    #[error("non-integral invariant count {0}")]
    NonIntegral(String),
    #[error("inconsistent module data: {0}")]
    Incompatible(String),
    #[error("morphism is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("missing data: {0}")]
    Missing(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::Error::$variant(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
