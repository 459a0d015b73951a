use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector has no non-zero entry")]
    ZeroVector,

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("negative or non-finite weight {value} at dimension {index}")]
    InvalidWeight { index: usize, value: f64 },

    #[error("corpus contains no tokens")]
    EmptyCorpus,

    #[error("only {available} context words observed, {requested} dimensions requested")]
    InsufficientContexts { available: usize, requested: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("unknown verb `{0}`")]
    UnknownVerb(String),

    #[error("verb `{0}` has no usable argument occurrences")]
    EmptyArguments(String),

    #[error("empty input")]
    EmptyInput,

    #[error("normal equations are singular; retry with a positive ridge")]
    SingularSystem,

    #[error("shape error: {0}")]
    Shape(String),

    #[error("scores need at least one positive and one negative label")]
    DegenerateLabels,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown name `{0}`")]
    UnknownName(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimMismatch { left, right })
    }
}
