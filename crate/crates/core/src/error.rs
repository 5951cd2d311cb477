use thiserror::Error;

/// Errors raised by the moment-phase pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series has a nonzero free term; use the zero-free-term variant")]
    NonzeroFreeTerm,
    #[error("series has a zero free term; Miller-Nakos needs a0 != 0")]
    ZeroFreeTerm,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("moment sequence is empty")]
    EmptyMoments,
    #[error("total mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("zeroth trigonometric moment must be real and positive, got {re}{im:+}i")]
    InvalidTau0 { re: f64, im: f64 },
    #[error("imaginary residue {0:e} exceeds tolerance in a real-valued transform")]
    ImaginaryResidue(f64),
    #[error("missing moment for multi-index {0:?}")]
    MissingMoment(Vec<u32>),
    #[error("leading Hankel block is not positive definite")]
    SingularHankel,
    #[error("expected an even number of moments, got {0}")]
    OddMomentCount(usize),
    #[error("leading coefficient of the exponent polynomial must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("seed length {got} does not match polynomial degree {degree}")]
    SeedLength { degree: usize, got: usize },
    #[error("quadrature needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("invalid interval [{0}, {1}]")]
    InvalidInterval(f64, f64),
    #[error("basis row {0} is identically zero")]
    DegenerateRow(usize),
    #[error("conditioned moment {index} is not positive ({value})")]
    NonPositiveConditionedMoment { index: usize, value: f64 },
    #[error("preconditioning offset must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("maximum-entropy solve did not converge (residual {residual:e} after {iterations} updates)")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("grid size {0} is not a power of two")]
    GridNotPowerOfTwo(usize),
    #[error("pad factor must be at least {min}, got {got}")]
    PadFactor { min: usize, got: usize },
    #[error("operation requires a {expected} grid")]
    WrongDomain { expected: &'static str },
    #[error("phase value {value} at x = {x} lies outside [0, {upper}]")]
    PhaseOutOfRange { x: f64, value: f64, upper: f64 },
    #[error("ray direction components must be positive and finite: {0:?}")]
    InvalidDirection(Vec<f64>),
    #[error("cannot choose a phase cutoff from moments {0:?}")]
    DegenerateCutoff(Vec<f64>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
