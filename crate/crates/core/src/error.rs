use thiserror::Error;

use crate::complex::{Cell, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed cell {vertices:?}: {reason}")]
    MalformedCell { vertices: Vec<u32>, reason: &'static str },

    #[error("cell {0} is not in the complex")]
    NotInComplex(Cell),

    #[error("invalid restriction: {face} is not a face of {coface}")]
    InvalidRestriction { face: Cell, coface: Cell },

    #[error("section has no value on cell {0}")]
    IncompleteSection(Cell),

    #[error("unknown node {0}")]
    UnknownNode(VertexId),

    #[error("enumeration cap exceeded: {nodes} nodes > cap {cap}")]
    EnumerationCap { nodes: usize, cap: usize },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("degenerate geometry near cell {cell}: margin {margin:e} is within tolerance")]
    Degenerate { cell: Cell, margin: f64 },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("{0}")]
    Validation(String),

    #[error("node {0} has no local homology score")]
    MissingScore(VertexId),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn from_csv(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            csv::ErrorKind::Deserialize { err, .. } => Error::Parse { line, message: err.to_string() },
            other => Error::Parse { line, message: format!("{other:?}") },
        }
    }
}
