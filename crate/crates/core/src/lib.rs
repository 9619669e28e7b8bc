//! Checkers for transactional consistency criteria over recorded key-value
//! histories.
//!
//! A history is a set of committed transactions with a per-session order and
//! a write-read relation recovered from uniquely-written values. The crate
//! decides whether such a history satisfies Read Committed, Read Atomic,
//! Causal Consistency, Prefix Consistency, Snapshot Isolation, or
//! Serializability, and cross-checks every decision procedure against a
//! brute-force commit-order enumeration and a SAT baseline.

pub mod commgraph;
pub mod error;
pub mod generate;
pub mod history;
pub mod oracle;
pub mod reduction;
pub mod relation;
pub mod sat;
pub mod saturation;
pub mod serializable;
pub mod verdict;

pub use error::{Error, Result};
pub use history::{parse_history, serialize_history, History, HistoryInput, Tid};
pub use verdict::{Criterion, Evidence, Status, Verdict};

use serializable::SearchOptions;

/// Runs the standard checker for `criterion`: saturation for RC/RA/CC,
/// antichain search for SER, and the split-transaction reductions for PC/SI.
///
/// ```
/// use txncheck_core::{parse_history, check, Criterion};
/// use txncheck_core::serializable::SearchOptions;
///
/// let text = r#"{"format":"txn-history/1","sessions":[
///     [{"id":"t1","ops":[{"r":["x",0]},{"w":["x",1]}]}],
///     [{"id":"t2","ops":[{"r":["x",0]},{"w":["x",2]}]}]]}"#;
/// let h = parse_history(text).unwrap();
/// let opts = SearchOptions::default();
/// // A lost update: admitted under prefix consistency, not snapshot isolation.
/// assert!(check(&h, Criterion::Prefix, &opts).unwrap().is_valid());
/// assert!(!check(&h, Criterion::SnapshotIsolation, &opts).unwrap().is_valid());
/// ```
pub fn check(h: &History, criterion: Criterion, opts: &SearchOptions) -> Result<Verdict> {
    match criterion {
        Criterion::ReadCommitted => Ok(saturation::check_rc(h)),
        Criterion::ReadAtomic => Ok(saturation::check_ra(h)),
        Criterion::Causal => Ok(saturation::check_cc(h)),
        Criterion::Prefix => reduction::check_pc(h, opts),
        Criterion::SnapshotIsolation => reduction::check_si(h, opts),
        Criterion::Serializability => serializable::check_ser(h, opts),
    }
}
