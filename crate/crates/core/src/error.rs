use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("token sequence is empty")]
    EmptySequence,

    #[error("both token sequences are empty")]
    BothEmpty,

    #[error("distance {0} is outside [0, 1]")]
    Domain(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("instance {index} has no reference")]
    MissingReference { index: usize },

    #[error("beta * div + sim is zero")]
    DegenerateDenominator,

    #[error("tuning grid is empty")]
    EmptyGrid,

    #[error("human scores are constant on the dev set")]
    DegenerateHumanScores,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("input vector is constant")]
    ConstantInput,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("need at least {needed} instances, got {got}")]
    TooFewInstances { needed: usize, got: usize },

    #[error("need at least 3 attribution pairs, got {got}")]
    TooFewPairs { got: usize },

    #[error("need at least {needed} input groups, got {got}")]
    TooFewGroups { needed: usize, got: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: score {score} outside [0, 1]")]
    ScoreOutOfRange { line: usize, score: f64 },

    #[error("line {line}: duplicate (input, candidate) record")]
    DuplicateRecord { line: usize },

    #[error("line {line}: reference differs from earlier records with the same input")]
    InconsistentReference { line: usize },

    #[error("{metric}: non-finite value at instance {index}")]
    NonFinite { metric: String, index: usize },

    #[error("embedding provider unavailable: {0}")]
    ProviderUnavailable(String),

    #[error("no embedding for token {0:?} and no default vector")]
    MissingEmbedding(String),

    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("embedding set is empty")]
    EmptyEmbeddings,

    #[error("zero-norm embedding for token {0:?}")]
    ZeroVector(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable variant name, used in diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptySequence => "EmptySequence",
            Error::BothEmpty => "BothEmpty",
            Error::Domain(_) => "DomainError",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::MissingReference { .. } => "MissingReference",
            Error::DegenerateDenominator => "DegenerateDenominator",
            Error::EmptyGrid => "EmptyGrid",
            Error::DegenerateHumanScores => "DegenerateHumanScores",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::ConstantInput => "ConstantInput",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::TooFewInstances { .. } => "TooFewInstances",
            Error::TooFewPairs { .. } => "TooFewPairs",
            Error::TooFewGroups { .. } => "TooFewGroups",
            Error::Parse { .. } => "ParseError",
            Error::ScoreOutOfRange { .. } => "ScoreOutOfRange",
            Error::DuplicateRecord { .. } => "DuplicateRecord",
            Error::InconsistentReference { .. } => "InconsistentReference",
            Error::NonFinite { .. } => "NonFinite",
            Error::ProviderUnavailable(_) => "ProviderUnavailable",
            Error::MissingEmbedding(_) => "MissingEmbedding",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EmptyEmbeddings => "EmptyEmbeddings",
            Error::ZeroVector(_) => "ZeroVector",
            Error::Io(_) => "IoError",
        }
    }

    /// True for failures originating in an embedding provider.
    pub fn is_provider_error(&self) -> bool {
        matches!(
            self,
            Error::ProviderUnavailable(_)
                | Error::MissingEmbedding(_)
                | Error::DimensionMismatch { .. }
                | Error::ZeroVector(_)
        )
    }
}
