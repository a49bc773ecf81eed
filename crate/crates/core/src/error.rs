use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("index {index} out of range (max {max})")]
    OutOfRange { index: usize, max: usize },

    #[error("measure resolves at most {available} polynomials, {requested} requested")]
    InsufficientResolution { requested: usize, available: usize },

    #[error("symmetric tridiagonal eigenproblem did not converge")]
    EigenNoConvergence,

    #[error("gram factorization failed at row {row}: pivot {pivot}")]
    FactorizationFailure { row: usize, pivot: f64 },

    #[error("orthonormality residual {achieved:e} exceeds tolerance {tolerance:e}")]
    ResidualAboveTolerance { achieved: f64, tolerance: f64 },

    #[error("quadrature exactness {available} below required {required}")]
    InsufficientExactness { required: usize, available: usize },

    #[error("missing derivative of order {order} for {function} at {point}")]
    MissingDerivative {
        function: String,
        order: usize,
        point: f64,
    },

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("invalid multiplier: {0}")]
    InvalidMultiplier(String),

    #[error("multiplier {name} undefined at index {index}")]
    MultiplierUndefined { name: String, index: usize },

    #[error("exponents not conjugate: 1/{p} + 1/{q} != 1")]
    NotConjugate { p: f64, q: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0} lies outside the admissible set")]
    PointOutsideRegion(f64),

    #[error("point {point} is a discontinuity of {function}")]
    DiscontinuityPoint { function: String, point: f64 },

    #[error("function {0} has zero norm")]
    ZeroNorm(String),

    #[error("band too short: need n up to {required}, have {available}")]
    BandTooShort { required: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
