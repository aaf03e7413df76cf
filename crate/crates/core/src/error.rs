use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("unit ideal: the log-canonical threshold is undefined")]
    UnitIdeal,
    #[error("principal monomial ideal {0}: cosupport is one-dimensional")]
    PrincipalMonomial(String),
    #[error("empty ideal: at least one generator is required")]
    EmptyIdeal,
    #[error("infinite staircase: {0}")]
    InfiniteStaircase(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid cluster: {0}")]
    InvalidCluster(String),
    #[error("invalid Enriques tree: {0}")]
    InvalidTree(String),
    #[error("weights are all zero")]
    ZeroWeights,
    #[error("weights violate the proximity relation at P{0}; unload first")]
    ProximityViolation(usize),
    #[error("unloading did not reach a fixed point after {0} steps")]
    UnloadingDiverged(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("NON_RATIONAL_TANGENT: tangent cone {0} does not split into rational lines")]
    NonRationalTangent(String),
    #[error("NON_REDUCED: {0} has a repeated factor")]
    NonReduced(String),
    #[error("the curve does not pass through the origin")]
    NotThroughOrigin,
    #[error("resolution exceeded {0} blowups")]
    ResolutionTooDeep(usize),
    #[error("parse error at column {column}: {message}\n{source_line}\n{caret}")]
    Parse {
        column: usize,
        message: String,
        source_line: String,
        caret: String,
    },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
