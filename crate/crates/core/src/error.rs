use thiserror::Error;

/// Errors raised by tensor construction, decompositions and comparisons.
///
/// Mode and party indices in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("amplitude count {got} does not match product of dims {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension list is empty")]
    EmptyDims,

    #[error("party {party} has dimension 0")]
    ZeroDim { party: usize },

    #[error("mode {mode} out of range for a tensor of order {order}")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dimension lists differ: {a:?} vs {b:?}")]
    DimsMismatch { a: Vec<usize>, b: Vec<usize> },

    #[error("matrix for party {party} is not unitary (deviation {deviation:e})")]
    NotUnitary { party: usize, deviation: f64 },

    #[error("invalid dimension {0}")]
    BadDim(usize),

    #[error("singular value iteration did not converge for mode {mode}")]
    SvdFailure { mode: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not one (got {0})")]
    NotTraceOne(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("all eigenvalues fall below the rank tolerance")]
    RankZero,

    #[error("tensor has a single party; nothing remains after tracing out party 0")]
    SingleParty,

    #[error("block structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("input has degenerate singular values; use the block pipeline")]
    DegenerateInput,

    #[error("state is not fully degenerate in every mode")]
    NotFullyDegenerate,

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("scale limit exceeded: {0}")]
    ScaleExceeded(String),
}

impl Error {
    /// Variant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::EmptyDims => "EmptyDims",
            Error::ZeroDim { .. } => "ZeroDim",
            Error::ModeOutOfRange { .. } => "ModeOutOfRange",
            Error::ShapeMismatch(..) => "ShapeMismatch",
            Error::DimsMismatch { .. } => "DimsMismatch",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::BadDim(..) => "BadDim",
            Error::SvdFailure { .. } => "SvdFailure",
            Error::NotHermitian(..) => "NotHermitian",
            Error::NotTraceOne(..) => "NotTraceOne",
            Error::NotPsd(..) => "NotPsd",
            Error::RankZero => "RankZero",
            Error::SingleParty => "SingleParty",
            Error::StructureMismatch(..) => "StructureMismatch",
            Error::DegenerateInput => "DegenerateInput",
            Error::NotFullyDegenerate => "NotFullyDegenerate",
            Error::Overflow(..) => "Overflow",
            Error::ScaleExceeded(..) => "ScaleExceeded",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
