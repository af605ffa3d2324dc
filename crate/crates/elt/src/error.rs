use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum EltError {
    /// Dimension mismatch between operands.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The normal matrix is singular and lambda is zero.
    #[error("singular normal matrix at lambda = 0; use a positive lambda")]
    SingularMatrix,

    /// A precondition on an argument failed.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A non-finite value was encountered where finite data is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Input file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl EltError {
    /// Process exit code for the CLI: 2 for input/parse problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            EltError::SingularMatrix | EltError::NonFinite(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, EltError>;
