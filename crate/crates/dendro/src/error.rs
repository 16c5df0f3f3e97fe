use thiserror::Error;

/// Errors shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("duplicate edge name `{0}`")]
    DuplicateEdge(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("edge `{0}` is not a leaf")]
    NotALeaf(String),

    #[error("edge `{0}` is not inner")]
    NotInner(String),

    #[error("vertex at `{0}` is not external")]
    NotExternal(String),

    #[error("unknown object `{0}`")]
    UnknownObject(String),

    #[error("unknown operation `{0}`")]
    UnknownOperation(String),

    #[error("invalid structure: {0}")]
    Invalid(String),

    #[error("operad axiom violated: {0}")]
    AxiomViolation(String),

    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("incompatible face family: {0}")]
    IncompatibleFamily(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
