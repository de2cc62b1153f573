use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Variant names double as the
/// machine-readable error codes emitted by the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("invalid party layout: {0}")]
    InvalidLayout(String),
    #[error("total dimension {0} exceeds the limit of 65536")]
    TooLarge(usize),
    #[error("unsupported state kind: {0}")]
    UnsupportedKind(String),
    #[error("subset must not be empty")]
    EmptySubset,
    #[error("subset must not contain every party")]
    FullSubset,
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("entropy table invalid: {0}")]
    TableInvalid(String),
    #[error("too many Bobs: {m} (limit {limit})")]
    TooManyParties { m: usize, limit: usize },
    #[error("point lies outside the combing region: {0}")]
    PointOutsideRegion(String),
    #[error("protocol does not amplify (x = {x})")]
    NotAmplifying { x: f64 },
    #[error("no party borrows entanglement; breeding is unnecessary")]
    ZeroBorrow,
    #[error("target has zero entanglement across every Alice-Bob cut")]
    ZeroTarget,
    #[error("party mismatch: {0}")]
    PartyMismatch(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::InvalidLayout(_) => "InvalidLayout",
            Error::TooLarge(_) => "TooLarge",
            Error::UnsupportedKind(_) => "UnsupportedKind",
            Error::EmptySubset => "EmptySubset",
            Error::FullSubset => "FullSubset",
            Error::NotDensityMatrix(_) => "NotDensityMatrix",
            Error::InvalidSubset(_) => "InvalidSubset",
            Error::BadPermutation(_) => "BadPermutation",
            Error::TableInvalid(_) => "TableInvalid",
            Error::TooManyParties { .. } => "TooManyParties",
            Error::PointOutsideRegion(_) => "PointOutsideRegion",
            Error::NotAmplifying { .. } => "NotAmplifying",
            Error::ZeroBorrow => "ZeroBorrow",
            Error::ZeroTarget => "ZeroTarget",
            Error::PartyMismatch(_) => "PartyMismatch",
            Error::Lp(_) => "Lp",
            Error::Parse(_) => "Parse",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
