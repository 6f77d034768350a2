use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid or inconsistent parameters (field construction, scheme setup, shapes).
    #[error("parameter error: {0}")]
    Param(String),

    /// Division by zero in the extension field.
    #[error("division by zero in F_{{q^m}}")]
    DivisionByZero,

    /// A matrix that was expected to be invertible is singular.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// Rejection sampling did not produce a valid value within the retry budget.
    #[error("sampling failed after {0} attempts")]
    Sampling(usize),

    /// No codeword within the decoding radius.
    #[error("decoding failure: no codeword within rank radius {radius}")]
    DecodingFailure { radius: usize },

    /// The input matrix does not generate a Gabidulin code of the claimed shape.
    #[error("not a Gabidulin code: {0}")]
    NotGabidulin(String),

    /// Generator-vector recovery produced a code that failed verification.
    #[error("recovery error: {0}")]
    Recovery(String),

    /// The Lambda-rank assumption of the attack does not hold on this key.
    #[error("distinguisher failure: {0}")]
    Distinguisher(String),

    /// The attack found structure it could not turn into a valid scrambler.
    #[error("attack structure error: {0}")]
    Structure(String),

    /// Decryption (legitimate or oracle) failed.
    #[error("decryption error: {0}")]
    Decryption(String),

    /// Serialization / deserialization problem, with the offending location.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// I/O wrapper for the CLI.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code used by the CLI: 2 parse, 3 crypto/attack, 4 parameter.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) => 2,
            Error::Param(_) => 4,
            _ => 3,
        }
    }
}
