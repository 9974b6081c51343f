use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient and exponent sequences differ in length ({coeffs} vs {exponents})")]
    LengthMismatch { coeffs: usize, exponents: usize },

    #[error("exponents must be strictly increasing (position {index})")]
    NonIncreasingExponents { index: usize },

    #[error("coefficient at position {index} is zero")]
    ZeroCoefficient { index: usize },

    #[error("coefficient at position {index} is not finite")]
    NonFiniteCoefficient { index: usize },

    #[error(
        "exponent {exponent} at position {index} is not allowed: linear terms must be absorbed \
         into the input function (a frequency shift) before construction, exponents start at 2"
    )]
    LinearTermPresent { index: usize, exponent: u32 },

    #[error("value exceeds the representable range; rescale the input")]
    Overflow,

    #[error("the zero phase has no scale frame")]
    DegeneratePhase,

    #[error("monomial index {index} out of range for {len} monomials")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("scale window is empty")]
    EmptyWindow,

    #[error("requested tolerance {requested:e} not met (achieved {achieved:e})")]
    ToleranceNotMet { requested: f64, achieved: f64 },

    #[error("tolerance {0:e} outside the supported range (1e-12, 1e-2)")]
    InvalidTolerance(f64),

    #[error("fit needs at least {needed} usable points, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
