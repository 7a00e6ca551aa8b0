use thiserror::Error;

/// Errors raised by the calculus kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("singular evaluation at `{expr}`")]
    Singularity { expr: String },

    #[error("`{func}` evaluated outside its domain at `{expr}`")]
    Domain { func: &'static str, expr: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("zero test inconclusive: {0}")]
    Inconclusive(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("advection failed: {0}")]
    Advection(String),

    #[error("integration over cell {cell} failed: {source}")]
    Cell {
        cell: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
