use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degenerate basis")]
    DegenerateBasis,
    #[error("not totally real: {0}")]
    NotTotallyReal(String),
    #[error("reducible minimal polynomial: {0}")]
    Reducible(String),
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("alpha must lie strictly between 0 and 1")]
    AlphaOutOfRange,
    #[error("window must be positive")]
    NonPositiveWindow,
    #[error("point budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("lattice is not irrational in the window: {witnesses} points on coordinate hyperplanes")]
    NotIrrational { witnesses: usize },
    #[error("unbounded face detected: facet normal {0:?} has a zero entry")]
    UnboundedFace(Vec<i64>),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("hyperplane passes through the origin")]
    ThroughOrigin,
    #[error("need at least {needed} vectors, got {got}")]
    TooFewVectors { needed: usize, got: usize },
    #[error("subset enumeration capped at {cap} vectors, got {got}")]
    TooManyVectors { cap: usize, got: usize },
    #[error("star truncated by window")]
    IncompleteStar,
    #[error("face truncated by window")]
    IncompleteFace,
    #[error("vertex {0} is not certified")]
    NotCertified(usize),
    #[error("zero segment")]
    ZeroSegment,
    #[error("parallel edges")]
    ParallelEdges,
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("empty patch")]
    EmptyPatch,
    #[error("no interior cells")]
    NoInteriorCells,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
