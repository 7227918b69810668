use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate channel estimate for user {user} of cell {cell} (zero norm)")]
    DegenerateEstimate { user: usize, cell: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
