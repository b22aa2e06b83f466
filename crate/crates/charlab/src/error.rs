use thiserror::Error;

/// Errors shared by every module. The variants mirror the failure classes the
/// operations document: range (argument outside a table), domain (argument
/// violates a mathematical precondition), capacity (a structure would exceed
/// its memory budget), budget (a computation would exceed its work budget),
/// and insufficient data (grids too short to fit anything).
#[derive(Debug, Error)]
pub enum Error {
    #[error("range error: {what} = {got} exceeds limit {limit}")]
    Range {
        what: &'static str,
        got: u64,
        limit: u64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("work budget exceeded: {0}")]
    Budget(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
