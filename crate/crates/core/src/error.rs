use thiserror::Error;

use crate::complex::Simplex;

/// Errors raised by complex construction, operators, estimators and the
/// homology/cohomology procedures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input: no simplices given")]
    EmptyInput,

    #[error("duplicate simplex {0}")]
    DuplicateSimplex(Simplex),

    #[error("simplex has repeated vertex {0}")]
    DuplicateVertex(usize),

    #[error("simplex {simplex} is missing its face {face}")]
    MissingFace { simplex: Simplex, face: Simplex },

    #[error("layer {0} is empty")]
    EmptyLayer(usize),

    #[error("not a subcomplex: {0} is absent from the larger complex")]
    NotASubcomplex(Simplex),

    #[error("stages {0} and {1} do not form a filtration: {2}")]
    NotAFiltrationChain(usize, usize, Box<Error>),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range for layer {r} of size {len}")]
    IndexOutOfRange { r: usize, index: usize, len: usize },

    #[error("boundary block structure violated: {0}")]
    StructuralViolation(String),

    #[error("persistent Betti routes disagree: quotient route {route_a}, Laplacian kernel route {route_b}")]
    RouteDisagreement { route_a: usize, route_b: usize },

    #[error("spectral norm bound {0} exceeds 1")]
    SpectralNormExceeded(f64),

    #[error("degree {0} too high for the power expansion (max 30)")]
    DegreeTooHigh(usize),

    #[error("chain is not a cycle")]
    NotACycle,

    #[error("zero chain")]
    ZeroChain,

    #[error("kernel of the boundary map in dimension {0} is trivial")]
    TrivialKernel(usize),

    #[error("cocycle space in dimension {0} is trivial")]
    TrivialCocycleSpace(usize),

    #[error("greedy cocycle construction failed at {0}")]
    ConstructionFailed(Simplex),

    #[error("no isolated face pair found in dimension {0}")]
    NotFound(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors that signal a broken internal invariant rather than
    /// bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::StructuralViolation(_) | Error::RouteDisagreement { .. })
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::DuplicateSimplex(_) => "DuplicateSimplex",
            Error::DuplicateVertex(_) => "DuplicateVertex",
            Error::MissingFace { .. } => "MissingFace",
            Error::EmptyLayer(_) => "EmptyLayer",
            Error::NotASubcomplex(_) => "NotASubcomplex",
            Error::NotAFiltrationChain(..) => "NotAFiltrationChain",
            Error::BadParameter(_) => "BadParameter",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::StructuralViolation(_) => "StructuralViolation",
            Error::RouteDisagreement { .. } => "RouteDisagreement",
            Error::SpectralNormExceeded(_) => "SpectralNormExceeded",
            Error::DegreeTooHigh(_) => "DegreeTooHigh",
            Error::NotACycle => "NotACycle",
            Error::ZeroChain => "ZeroChain",
            Error::TrivialKernel(_) => "TrivialKernel",
            Error::TrivialCocycleSpace(_) => "TrivialCocycleSpace",
            Error::ConstructionFailed(_) => "ConstructionFailed",
            Error::NotFound(_) => "NotFound",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
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
