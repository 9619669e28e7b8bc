//! Consistency criteria and checker verdicts.

use std::fmt;
use std::str::FromStr;

/// The six consistency criteria, ordered weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    ReadCommitted,
    ReadAtomic,
    Causal,
    Prefix,
    SnapshotIsolation,
    Serializability,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::ReadCommitted,
        Criterion::ReadAtomic,
        Criterion::Causal,
        Criterion::Prefix,
        Criterion::SnapshotIsolation,
        Criterion::Serializability,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Criterion::ReadCommitted => "rc",
            Criterion::ReadAtomic => "ra",
            Criterion::Causal => "cc",
            Criterion::Prefix => "pc",
            Criterion::SnapshotIsolation => "si",
            Criterion::Serializability => "ser",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rc" => Ok(Criterion::ReadCommitted),
            "ra" => Ok(Criterion::ReadAtomic),
            "cc" => Ok(Criterion::Causal),
            "pc" => Ok(Criterion::Prefix),
            "si" => Ok(Criterion::SnapshotIsolation),
            "ser" => Ok(Criterion::Serializability),
            other => Err(format!("unknown criterion {other:?} (expected rc|ra|cc|pc|si|ser)")),
        }
    }
}

/// Label attached to an edge of a violation cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeLabel {
    SessionOrder,
    WriteRead,
    /// Commit-order edge forced by an axiom instance: the source transaction
    /// must commit before the target because `reader` read `var` from the
    /// target while also observing the source (directly or transitively).
    Axiom {
        criterion: Criterion,
        var: String,
        reader: String,
    },
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::SessionOrder => f.write_str("so"),
            EdgeLabel::WriteRead => f.write_str("wro"),
            EdgeLabel::Axiom { criterion, var, reader } => {
                write!(f, "{criterion} axiom on {var} via {reader}")
            }
        }
    }
}

/// One edge of a violation cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleEdge {
    pub from: String,
    pub to: String,
    pub label: EdgeLabel,
}

/// Machine-checkable explanation attached to a violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    /// A minimal cycle in the saturated commit order.
    Cycle(Vec<CycleEdge>),
    /// Deepest linearized prefix reached by the serializability search;
    /// a best-effort diagnostic, no minimality is claimed.
    DeepestPrefix(Vec<String>),
}

/// Outcome of a consistency check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Valid,
    Violation,
}

/// Result of running a checker on a history.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    /// A total commit order witnessing validity, when one is available.
    pub witness: Option<Vec<String>>,
    pub evidence: Option<Evidence>,
    /// Prefix states expanded by the serializability search (0 for the
    /// polynomial checkers).
    pub explored_states: u64,
}

impl Verdict {
    pub fn valid(witness: Option<Vec<String>>) -> Self {
        Verdict { status: Status::Valid, witness, evidence: None, explored_states: 0 }
    }

    pub fn violation(evidence: Option<Evidence>) -> Self {
        Verdict { status: Status::Violation, witness: None, evidence, explored_states: 0 }
    }

    pub fn is_valid(&self) -> bool {
        self.status == Status::Valid
    }
}
