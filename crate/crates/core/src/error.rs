use thiserror::Error;

/// Errors reported by history construction, checkers, and encoders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("duplicate transaction id {0:?}")]
    DuplicateTid(String),
    #[error("session order edges are cyclic")]
    CyclicSessionOrder,
    #[error("history has {0} transactions, above the limit of {1}")]
    HistoryTooLarge(usize, usize),
    #[error("transaction {tid:?} writes the reserved initial value 0 to {var:?}")]
    ReservedValueWrite { tid: String, var: String },
    #[error("transaction {tid:?} reads {var:?}={value} after writing {var:?}={written} locally")]
    InternalReadMismatch {
        tid: String,
        var: String,
        value: u64,
        written: u64,
    },
    #[error("read of {var:?}={value} in {tid:?} has no writer")]
    UnknownValue { tid: String, var: String, value: u64 },
    #[error("{var:?}={value} is written by both {first:?} and {second:?}")]
    AmbiguousWrite {
        var: String,
        value: u64,
        first: String,
        second: String,
    },
    #[error("session order and write-read relation form a cycle")]
    WroSoCycle,
    #[error("operation requires a session-form history")]
    RequiresSessionForm,
    #[error("not a total order over the history's transactions")]
    NotTotalOrder,
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("search budget exceeded after exploring {explored} states")]
    SearchBudgetExceeded { explored: u64 },
    #[error("solver conflict budget exceeded")]
    SolverBudgetExceeded,
    #[error("unknown catalogue name {0:?}")]
    UnknownName(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("relation is cyclic")]
    CyclicRelation,
}

pub type Result<T> = std::result::Result<T, Error>;
