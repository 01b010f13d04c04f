use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input falls outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A request violates its structural invariants.
    #[error("invalid request {id}: {reason}")]
    InvalidRequest { id: u32, reason: String },

    /// A deployment or catalog fails its consistency checks.
    #[error("inventory error: {0}")]
    Inventory(String),

    /// A request cannot be hosted by any node even in isolation.
    #[error("request {id} is infeasible by construction: {reason}")]
    InfeasibleRequest { id: u32, reason: String },

    /// The deployment topology is outside what the solver supports.
    #[error("unsupported topology: {0}")]
    Topology(String),

    /// A configuration file or value is malformed.
    #[error("config error: {0}")]
    Config(String),

    /// A structured text file (workload, solution) is malformed.
    #[error("parse error at record {record}: {reason}")]
    Parse { record: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn inventory(msg: impl Into<String>) -> Self {
        Error::Inventory(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
