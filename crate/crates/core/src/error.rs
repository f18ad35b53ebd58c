use thiserror::Error;

/// Errors raised by the library.
///
/// One enum covers every module; variants carry enough context to print a
/// useful message from the CLI without further wrapping.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("atom space must contain at least one atom")]
    EmptySpace,
    #[error("weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: String },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: String },
    #[error("enumeration of {atoms}^{n} samples exceeds the cap of {cap}")]
    EnumerationTooLarge { atoms: usize, n: usize, cap: u64 },
    #[error("sample size must be positive")]
    EmptySample,

    #[error("kernel value tensor has {got} entries, expected {expected}")]
    WrongValueCount { expected: usize, got: usize },
    #[error("axis labels must be strictly increasing: {0:?}")]
    LabelsNotIncreasing(Vec<usize>),
    #[error("kernel has no axis labelled {0}")]
    NoSuchAxis(usize),
    #[error("substitution needs two distinct axes, got {0} twice")]
    SameAxis(usize),
    #[error("operands live on different atom spaces")]
    SpaceMismatch,
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("label sets of the operands overlap")]
    OverlappingLabels,

    #[error("invalid diagram class l={l}, p={p}, k1={k1}, k2={k2}")]
    InvalidClass {
        l: usize,
        p: usize,
        k1: usize,
        k2: usize,
    },
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("kernel is not canonical")]
    NotCanonical,

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("moment order must be a positive even integer, got {0}")]
    InvalidOrder(usize),

    #[error("certificate blocks do not partition the kernel axes: {0}")]
    BlockMismatch(String),
    #[error("certificates carry different sigma^2 values")]
    SigmaMismatch,
    #[error("rank {r} is too small for {uncolored} uncolored edges")]
    RankTooSmall { r: usize, uncolored: usize },

    #[error("x must be positive, got {0}")]
    NonpositiveX(f64),
    #[error("x = {x} lies above the threshold {threshold}")]
    OutOfRegime { x: f64, threshold: f64 },
    #[error("M = {0} is not a power of two")]
    BadM(u64),
    #[error("regime violation: {0}")]
    RegimeViolation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("the x grid is empty")]
    EmptyGrid,
    #[error("the x grid must be positive and strictly ascending")]
    UnsortedGrid,
    #[error("need at least 3 grid points with nonzero exceedance, found {0}")]
    InsufficientTailData(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
