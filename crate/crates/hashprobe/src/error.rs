//! Error type shared across the crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(&'static str),
    /// A lookup was attempted on a table with no nodes.
    EmptyTable,
    /// Insert of a node id that is already a member. Loud on purpose: a
    /// duplicate insert in a routing layer signals a caller membership bug.
    DuplicateNode(u64),
    /// Remove of a node id that is not a member.
    NodeNotFound(u64),
    /// A table grew past the configured structural memory budget.
    MemoryBudgetExceeded { estimated: u64, budget: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::EmptyTable => write!(f, "table has no nodes"),
            Error::DuplicateNode(id) => write!(f, "node {id} is already present"),
            Error::NodeNotFound(id) => write!(f, "node {id} is not present"),
            Error::MemoryBudgetExceeded { estimated, budget } => {
                write!(f, "memory budget exceeded: estimated {estimated} bytes > budget {budget}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
