//! The on-disk history format: JSON, UTF-8, one of two shapes.
//!
//! Session form:
//! ```json
//! {"format":"txn-history/1","sessions":[[{"id":"t1","ops":[{"r":["x",0]},{"w":["x",1]}]}]]}
//! ```
//! General form:
//! ```json
//! {"format":"txn-history/1","transactions":[{"id":"t1","ops":[]}],"so_edges":[["t1","t2"]]}
//! ```
//! Ops are two-element `[var, value]` arrays tagged `r` or `w`; values are
//! non-negative integers with 0 reserved for the implicit init transaction.
//! The serializer is canonical: keys are emitted in the order shown above.

use serde::{Deserialize, Serialize};

use super::{History, HistoryInput, OpKind, RawOp, RawTransaction, Tid};
use crate::error::{Error, Result};

pub const FORMAT_TAG: &str = "txn-history/1";

#[derive(Serialize, Deserialize)]
enum FileOp {
    #[serde(rename = "r")]
    Read(String, u64),
    #[serde(rename = "w")]
    Write(String, u64),
}

#[derive(Serialize, Deserialize)]
struct FileTxn {
    id: String,
    ops: Vec<FileOp>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HistoryFile {
    format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    sessions: Option<Vec<Vec<FileTxn>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transactions: Option<Vec<FileTxn>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    so_edges: Option<Vec<(String, String)>>,
}

impl From<FileOp> for RawOp {
    fn from(op: FileOp) -> RawOp {
        match op {
            FileOp::Read(var, value) => RawOp { kind: OpKind::Read, var, value },
            FileOp::Write(var, value) => RawOp { kind: OpKind::Write, var, value },
        }
    }
}

impl From<FileTxn> for RawTransaction {
    fn from(t: FileTxn) -> RawTransaction {
        RawTransaction { id: t.id, ops: t.ops.into_iter().map(RawOp::from).collect() }
    }
}

/// Parses and validates a history file, synthesizing the init transaction
/// and deriving the write-read relation.
pub fn parse_history(text: &str) -> Result<History> {
    let file: HistoryFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
    if file.format != FORMAT_TAG {
        return Err(Error::MalformedInput(format!(
            "unsupported format {:?} (expected {FORMAT_TAG:?})",
            file.format
        )));
    }
    let input = match (file.sessions, file.transactions, file.so_edges) {
        (Some(sessions), None, None) => HistoryInput::Sessions(
            sessions.into_iter().map(|s| s.into_iter().map(RawTransaction::from).collect()).collect(),
        ),
        (None, Some(transactions), so_edges) => HistoryInput::Graph {
            transactions: transactions.into_iter().map(RawTransaction::from).collect(),
            so_edges: so_edges.unwrap_or_default(),
        },
        _ => {
            return Err(Error::MalformedInput(
                "expected either \"sessions\" or \"transactions\"/\"so_edges\"".into(),
            ))
        }
    };
    History::build(input)
}

/// Canonical serialization of a history (init is implicit and not emitted).
/// Transactions are written with their raw (pre-normalization) ops, so
/// `parse(serialize(h))` reconstructs an equal history.
pub fn serialize_history(h: &History) -> String {
    let file_txn = |t: Tid| FileTxn {
        id: h.name(t).to_string(),
        ops: h
            .raw_ops(t)
            .iter()
            .map(|op| {
                let var = h.var_name(op.var).to_string();
                match op.kind {
                    OpKind::Read => FileOp::Read(var, op.value),
                    OpKind::Write => FileOp::Write(var, op.value),
                }
            })
            .collect(),
    };
    let file = match h.sessions() {
        Some(sessions) => HistoryFile {
            format: FORMAT_TAG.to_string(),
            sessions: Some(
                sessions.iter().map(|s| s.iter().map(|&t| file_txn(t)).collect()).collect(),
            ),
            transactions: None,
            so_edges: None,
        },
        None => HistoryFile {
            format: FORMAT_TAG.to_string(),
            sessions: None,
            transactions: Some(h.tids().skip(1).map(file_txn).collect()),
            so_edges: Some(
                h.so_edges()
                    .unwrap()
                    .iter()
                    .map(|&(a, b)| (h.name(a).to_string(), h.name(b).to_string()))
                    .collect(),
            ),
        },
    };
    serde_json::to_string(&file).expect("history serialization cannot fail")
}
