use thiserror::Error;

/// Errors surfaced by the library. Validation failures that the protocol
/// expects (bad signatures, failed openings) are reported as ordinary return
/// values, not through this type.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a precondition (wrong arity, signer not in ring, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// Bytes did not decode to a canonical scalar, element, or structure.
    #[error("encoding error: {0}")]
    Encoding(String),

    /// A referenced transaction does not exist on the ledger.
    #[error("missing transaction {0}")]
    MissingTx(String),

    /// A storage reference resolved to nothing.
    #[error("missing storage object {0}")]
    MissingStorage(String),

    /// Retrieved bytes do not match the digest embedded on chain.
    #[error("storage digest mismatch for {0}")]
    DigestMismatch(String),

    /// The ledger refused a payload during a multi-chunk submission.
    #[error("ledger rejected chunk {index}: {reason}")]
    LedgerRejected { index: usize, reason: String },

    /// File or JSON handling in the harness layer.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
