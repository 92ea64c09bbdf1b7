use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not unitary (max |UU* - I| = {0:e})")]
    NotUnitary(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("environment state must be strictly positive (smallest eigenvalue {0:e})")]
    NotStrictlyPositive(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("decomposition failed: {0}")]
    Decomposition(&'static str),

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("phase margin {achieved:e} is below the requested {requested:e}")]
    MarginNotAchieved { achieved: f64, requested: f64 },

    #[error("the channel does not have a certified unique fixed point")]
    NotUnique,

    #[error("fixed-point system is singular (|detK| = {det_k:e}, detReal = {det_real:e})")]
    SingularSystem { det_k: f64, det_real: f64 },

    #[error("malformed input: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by well-formed input that fails a mathematical
    /// precondition (non-unitary `U`, non-density state, wrong dimensions).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::NonFinite { .. }
                | Error::NotUnitary(_)
                | Error::NotDensity(_)
                | Error::NotStrictlyPositive(_)
                | Error::InvalidArgument(_)
        )
    }

    /// True for errors raised while reading or decoding input.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Io(_) | Error::Csv(_))
    }
}
