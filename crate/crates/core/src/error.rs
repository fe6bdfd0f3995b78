use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Every variant maps onto a stable kind string (see [`Error::kind`]) which is
/// what the command-line reports and the C ABI expose.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("subspace refinement did not stabilise within {0} iterations")]
    Stall(usize),
    #[error("operator is singular to working precision (sigma_min/sigma_max = {0:e})")]
    SingularOperator(f64),
    #[error("operator is not an A_r-unitary (residual {0:e})")]
    NotArUnitary(f64),
    #[error("operator is not an A_r-isometry (residual {0:e})")]
    NotArIsometry(f64),
    #[error("operator is not an A_r-contraction candidate: {0}")]
    NotACandidate(String),
    #[error("operator is not a c.n.u. A_r-contraction")]
    NotCnu,
    #[error("A_r-unitary has both unitary and r-times-unitary parts")]
    MixedType,
    #[error("tuple is not doubly commuting (components {0} and {1})")]
    NotDoublyCommuting(usize, usize),
    #[error("tuple is not commuting (components {0} and {1})")]
    NotCommuting(usize, usize),
    #[error("tuple of {0} operators exceeds the cap of {1}")]
    ExplicitCap(usize, usize),
    #[error("bad multi-index: {0}")]
    BadMultiIndex(String),
    #[error("eigenvalue {0} is off the annulus boundary")]
    EigenvalueOffBoundary(String),
    #[error("model window too small: need at least {needed} indices, got {got}")]
    WindowTooSmall { needed: usize, got: usize },
    #[error("inconsistent planted blocks: {0}")]
    InconsistentBlocks(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidParams(_) => "InvalidParams",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::Stall(_) => "StallError",
            Error::SingularOperator(_) => "SingularOperator",
            Error::NotArUnitary(_) => "NotArUnitary",
            Error::NotArIsometry(_) => "NotArIsometry",
            Error::NotACandidate(_) => "NotACandidate",
            Error::NotCnu => "NotCnu",
            Error::MixedType => "MixedType",
            Error::NotDoublyCommuting(..) => "NotDoublyCommuting",
            Error::NotCommuting(..) => "NotCommuting",
            Error::ExplicitCap(..) => "ExplicitCapError",
            Error::BadMultiIndex(_) => "BadMultiIndex",
            Error::EigenvalueOffBoundary(_) => "EigenvalueOffBoundary",
            Error::WindowTooSmall { .. } => "WindowTooSmall",
            Error::InconsistentBlocks(_) => "InconsistentBlocks",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
        }
    }
}

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

pub type Result<T> = std::result::Result<T, Error>;
