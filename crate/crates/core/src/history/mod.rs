//! History data model: transactions, session order, and the write-read
//! relation derived from uniquely-written values.

mod format;

pub use format::{parse_history, serialize_history};

use crate::error::{Error, Result};
use crate::relation::{reachability, BitRow, Relation};

/// Dense transaction index; 0 is always the implicit init transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tid(pub u32);

pub const INIT: Tid = Tid(0);

/// Dense variable index into [`History::var_name`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Read,
    Write,
}

/// A single read or write on an interned variable. Program order is the
/// position in the containing transaction's op list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Operation {
    pub kind: OpKind,
    pub var: Var,
    pub value: u64,
}

/// An operation as it appears in an input file, before interning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawOp {
    pub kind: OpKind,
    pub var: String,
    pub value: u64,
}

impl RawOp {
    pub fn read(var: impl Into<String>, value: u64) -> Self {
        RawOp { kind: OpKind::Read, var: var.into(), value }
    }

    pub fn write(var: impl Into<String>, value: u64) -> Self {
        RawOp { kind: OpKind::Write, var: var.into(), value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTransaction {
    pub id: String,
    pub ops: Vec<RawOp>,
}

impl RawTransaction {
    pub fn new(id: impl Into<String>, ops: Vec<RawOp>) -> Self {
        RawTransaction { id: id.into(), ops }
    }
}

/// Unvalidated history contents, in one of the two supported session-order
/// shapes. The init transaction is implicit and must not appear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HistoryInput {
    Sessions(Vec<Vec<RawTransaction>>),
    Graph {
        transactions: Vec<RawTransaction>,
        so_edges: Vec<(String, String)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Txn {
    /// Ops as supplied (interned); kept for serialization round-trips.
    raw: Vec<Operation>,
    /// External ops after normalization; po is the list order.
    ops: Vec<Operation>,
    /// Write-read source per external op (populated for reads only).
    src: Vec<Option<Tid>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum So {
    Sessions {
        sessions: Vec<Vec<Tid>>,
        /// (session + 1, index) per transaction; (0, 0) for init.
        pos: Vec<(u32, u32)>,
    },
    Graph {
        edges: Vec<(Tid, Tid)>,
        /// Full reachability of the edge DAG (init handled separately).
        reach: Vec<BitRow>,
    },
}

/// Exact width, or an upper bound when the general-form antichain
/// computation is out of range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Width {
    Exact(usize),
    UpperBound(usize),
}

impl Width {
    pub fn value(self) -> usize {
        match self {
            Width::Exact(v) | Width::UpperBound(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Width::Exact(_))
    }
}

/// Largest accepted history; relation closures are quadratic in memory.
pub const MAX_TRANSACTIONS: usize = 100_000;

/// Exact general-form width is only required up to this many transactions.
const EXACT_WIDTH_LIMIT: usize = 64;

/// A validated history: normalized transactions, session order, and the
/// write-read relation. Immutable after construction and safe to share
/// across threads; every checker in this crate is a pure function over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    names: Vec<String>,
    /// Rank of each transaction in ascending tid-name order; used to break
    /// ties deterministically.
    rank: Vec<u32>,
    vars: Vec<String>,
    txns: Vec<Txn>,
    so: So,
    // Derived indexes.
    writes_of: Vec<Vec<Var>>,
    writers: Vec<Vec<Tid>>,
    wro_pairs: Vec<Vec<(Tid, Tid)>>,
    wro_preds: Vec<Vec<Tid>>,
    wro_succs: Vec<Vec<Tid>>,
    so_preds_direct: Vec<Vec<Tid>>,
}

impl History {
    /// Validates, normalizes, and derives the write-read relation.
    pub fn build(input: HistoryInput) -> Result<History> {
        let (raw_txns, session_layout, raw_edges) = match input {
            HistoryInput::Sessions(sessions) => {
                let layout: Vec<usize> = sessions.iter().map(|s| s.len()).collect();
                let txns: Vec<RawTransaction> = sessions.into_iter().flatten().collect();
                (txns, Some(layout), Vec::new())
            }
            HistoryInput::Graph { transactions, so_edges } => (transactions, None, so_edges),
        };

        if raw_txns.len() + 1 > MAX_TRANSACTIONS {
            return Err(Error::HistoryTooLarge(raw_txns.len() + 1, MAX_TRANSACTIONS));
        }

        // Intern tids; init takes index 0.
        let mut names = vec!["init".to_string()];
        let mut by_name = std::collections::HashMap::new();
        for t in &raw_txns {
            if t.id == "init" {
                return Err(Error::MalformedInput(
                    "transaction id \"init\" is reserved for the implicit initial transaction".into(),
                ));
            }
            if by_name.insert(t.id.clone(), Tid(names.len() as u32)).is_some() {
                return Err(Error::DuplicateTid(t.id.clone()));
            }
            names.push(t.id.clone());
        }
        let n = names.len();

        // Intern variables in first-occurrence order.
        let mut vars: Vec<String> = Vec::new();
        let mut var_ids = std::collections::HashMap::new();
        let mut intern_var = |name: &str, vars: &mut Vec<String>| -> Var {
            if let Some(&v) = var_ids.get(name) {
                return v;
            }
            let v = Var(vars.len() as u32);
            var_ids.insert(name.to_string(), v);
            vars.push(name.to_string());
            v
        };

        let mut txns = Vec::with_capacity(n);
        txns.push(Txn { raw: Vec::new(), ops: Vec::new(), src: Vec::new() });
        for rt in &raw_txns {
            let mut raw = Vec::with_capacity(rt.ops.len());
            for op in &rt.ops {
                let var = intern_var(&op.var, &mut vars);
                if op.kind == OpKind::Write && op.value == 0 {
                    return Err(Error::ReservedValueWrite { tid: rt.id.clone(), var: op.var.clone() });
                }
                raw.push(Operation { kind: op.kind, var, value: op.value });
            }
            let ops = normalize_ops(&raw, &rt.id, &vars)?;
            let src = vec![None; ops.len()];
            txns.push(Txn { raw, ops, src });
        }

        // The init transaction writes 0 to every variable in the history.
        txns[0].raw = (0..vars.len())
            .map(|v| Operation { kind: OpKind::Write, var: Var(v as u32), value: 0 })
            .collect();
        txns[0].ops = txns[0].raw.clone();
        txns[0].src = vec![None; txns[0].ops.len()];

        // Session order.
        let so = match session_layout {
            Some(layout) => {
                let mut sessions = Vec::with_capacity(layout.len());
                let mut pos = vec![(0u32, 0u32); n];
                let mut next = 1u32;
                for (s, len) in layout.iter().enumerate() {
                    let mut chain = Vec::with_capacity(*len);
                    for i in 0..*len {
                        let t = Tid(next);
                        next += 1;
                        pos[t.0 as usize] = (s as u32 + 1, i as u32);
                        chain.push(t);
                    }
                    sessions.push(chain);
                }
                So::Sessions { sessions, pos }
            }
            None => {
                let mut edges = Vec::with_capacity(raw_edges.len());
                for (a, b) in &raw_edges {
                    let ta = *by_name.get(a).ok_or_else(|| {
                        Error::MalformedInput(format!("so edge mentions unknown tid {a:?}"))
                    })?;
                    let tb = *by_name.get(b).ok_or_else(|| {
                        Error::MalformedInput(format!("so edge mentions unknown tid {b:?}"))
                    })?;
                    if ta == tb {
                        return Err(Error::CyclicSessionOrder);
                    }
                    edges.push((ta, tb));
                }
                edges.sort_unstable_by_key(|&(a, b)| (a.0, b.0));
                edges.dedup();
                let rel = Relation::from_edges(n, edges.iter().map(|&(a, b)| (a.0, b.0)));
                if !crate::relation::is_acyclic(&rel) {
                    return Err(Error::CyclicSessionOrder);
                }
                let reach = reachability(n, &edges.iter().map(|&(a, b)| (a.0, b.0)).collect::<Vec<_>>());
                So::Graph { edges, reach }
            }
        };

        let mut rank = vec![0u32; n];
        {
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_by(|&a, &b| names[a as usize].cmp(&names[b as usize]));
            for (r, &t) in order.iter().enumerate() {
                rank[t as usize] = r as u32;
            }
        }

        let mut h = History {
            names,
            rank,
            vars,
            txns,
            so,
            writes_of: Vec::new(),
            writers: Vec::new(),
            wro_pairs: Vec::new(),
            wro_preds: Vec::new(),
            wro_succs: Vec::new(),
            so_preds_direct: Vec::new(),
        };
        h.derive_wro()?;
        Ok(h)
    }

    /// Populates read sources from unique written values and verifies that
    /// `so ∪ wro` is acyclic.
    fn derive_wro(&mut self) -> Result<()> {
        let n = self.txns.len();
        let v = self.vars.len();

        // Unique writer per (var, value) over external writes.
        let mut writer_of: std::collections::HashMap<(Var, u64), Tid> = std::collections::HashMap::new();
        for (i, txn) in self.txns.iter().enumerate().skip(1) {
            for op in &txn.ops {
                if op.kind == OpKind::Write {
                    if let Some(prev) = writer_of.insert((op.var, op.value), Tid(i as u32)) {
                        return Err(Error::AmbiguousWrite {
                            var: self.vars[op.var.0 as usize].clone(),
                            value: op.value,
                            first: self.names[prev.0 as usize].clone(),
                            second: self.names[i].clone(),
                        });
                    }
                }
            }
        }

        let mut writes_of = vec![Vec::new(); n];
        let mut writers = vec![Vec::new(); v];
        for (i, txn) in self.txns.iter().enumerate() {
            for op in &txn.ops {
                if op.kind == OpKind::Write {
                    writes_of[i].push(op.var);
                }
            }
            writes_of[i].sort_unstable();
            writes_of[i].dedup();
            for &x in &writes_of[i] {
                writers[x.0 as usize].push(Tid(i as u32));
            }
        }

        let mut wro_pairs = vec![Vec::new(); v];
        let mut wro_preds = vec![Vec::new(); n];
        let mut wro_succs = vec![Vec::new(); n];
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            let mut sources = vec![None; self.txns[i].ops.len()];
            for (j, op) in self.txns[i].ops.iter().enumerate() {
                if op.kind != OpKind::Read {
                    continue;
                }
                let src = if op.value == 0 {
                    INIT
                } else {
                    match writer_of.get(&(op.var, op.value)) {
                        Some(&w) => w,
                        None => {
                            return Err(Error::UnknownValue {
                                tid: self.names[i].clone(),
                                var: self.vars[op.var.0 as usize].clone(),
                                value: op.value,
                            })
                        }
                    }
                };
                sources[j] = Some(src);
                wro_pairs[op.var.0 as usize].push((src, Tid(i as u32)));
                wro_preds[i].push(src);
                wro_succs[src.0 as usize].push(Tid(i as u32));
            }
            self.txns[i].src = sources;
        }
        for p in wro_pairs.iter_mut() {
            p.sort_unstable();
            p.dedup();
        }
        for p in wro_preds.iter_mut().chain(wro_succs.iter_mut()) {
            p.sort_unstable();
            p.dedup();
        }

        let mut so_preds_direct = vec![Vec::new(); n];
        match &self.so {
            So::Sessions { sessions, .. } => {
                for chain in sessions {
                    for (i, &t) in chain.iter().enumerate() {
                        so_preds_direct[t.0 as usize] =
                            if i == 0 { vec![INIT] } else { vec![chain[i - 1]] };
                    }
                }
            }
            So::Graph { edges, .. } => {
                for &(a, b) in edges {
                    so_preds_direct[b.0 as usize].push(a);
                }
                for (i, preds) in so_preds_direct.iter_mut().enumerate().skip(1) {
                    preds.push(INIT);
                    preds.sort_unstable();
                    preds.dedup();
                    let _ = i;
                }
            }
        }

        self.writes_of = writes_of;
        self.writers = writers;
        self.wro_pairs = wro_pairs;
        self.wro_preds = wro_preds;
        self.wro_succs = wro_succs;
        self.so_preds_direct = so_preds_direct;

        let rel = Relation::from_edges(n, self.base_edges().map(|(a, b, _)| (a.0, b.0)));
        if !crate::relation::is_acyclic(&rel) {
            return Err(Error::WroSoCycle);
        }
        Ok(())
    }

    pub fn txn_count(&self) -> usize {
        self.txns.len()
    }

    pub fn tids(&self) -> impl Iterator<Item = Tid> {
        (0..self.txns.len() as u32).map(Tid)
    }

    pub fn name(&self, t: Tid) -> &str {
        &self.names[t.0 as usize]
    }

    pub fn tid_by_name(&self, name: &str) -> Option<Tid> {
        self.names.iter().position(|n| n == name).map(|i| Tid(i as u32))
    }

    pub fn rank(&self) -> &[u32] {
        &self.rank
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_name(&self, x: Var) -> &str {
        &self.vars[x.0 as usize]
    }

    pub fn var_by_name(&self, name: &str) -> Option<Var> {
        self.vars.iter().position(|v| v == name).map(|i| Var(i as u32))
    }

    /// External (normalized) operations of `t` in program order.
    pub fn ops(&self, t: Tid) -> &[Operation] {
        &self.txns[t.0 as usize].ops
    }

    /// Operations as supplied in the input, before normalization.
    pub fn raw_ops(&self, t: Tid) -> &[Operation] {
        &self.txns[t.0 as usize].raw
    }

    /// Write-read source of the external op at `idx` (None for writes).
    pub fn read_src(&self, t: Tid, idx: usize) -> Option<Tid> {
        self.txns[t.0 as usize].src[idx]
    }

    /// Variables written by `t`, ascending.
    pub fn writes_of(&self, t: Tid) -> &[Var] {
        &self.writes_of[t.0 as usize]
    }

    pub fn writes_var(&self, t: Tid, x: Var) -> bool {
        self.writes_of[t.0 as usize].binary_search(&x).is_ok()
    }

    /// Transactions writing `x`, ascending by index (init always included).
    pub fn writers(&self, x: Var) -> &[Tid] {
        &self.writers[x.0 as usize]
    }

    /// Transaction-level write-read pairs `(writer, reader)` on `x`.
    pub fn wro_pairs(&self, x: Var) -> &[(Tid, Tid)] {
        &self.wro_pairs[x.0 as usize]
    }

    pub fn wro_preds(&self, t: Tid) -> &[Tid] {
        &self.wro_preds[t.0 as usize]
    }

    pub fn wro_succs(&self, t: Tid) -> &[Tid] {
        &self.wro_succs[t.0 as usize]
    }

    pub fn in_wro(&self, a: Tid, b: Tid) -> bool {
        self.wro_preds[b.0 as usize].binary_search(&a).is_ok()
    }

    /// Strict session order. Init precedes every other transaction.
    pub fn so_before(&self, a: Tid, b: Tid) -> bool {
        if a == b {
            return false;
        }
        if a == INIT {
            return true;
        }
        if b == INIT {
            return false;
        }
        match &self.so {
            So::Sessions { pos, .. } => {
                let (sa, ia) = pos[a.0 as usize];
                let (sb, ib) = pos[b.0 as usize];
                sa == sb && ia < ib
            }
            So::Graph { reach, .. } => reach[a.0 as usize].get(b.0 as usize),
        }
    }

    /// Immediate session-order predecessors (init stands in for "none").
    pub fn so_preds_direct(&self, t: Tid) -> &[Tid] {
        &self.so_preds_direct[t.0 as usize]
    }

    pub fn is_session_form(&self) -> bool {
        matches!(self.so, So::Sessions { .. })
    }

    /// Sessions as tid chains (session form only; init excluded).
    pub fn sessions(&self) -> Option<&[Vec<Tid>]> {
        match &self.so {
            So::Sessions { sessions, .. } => Some(sessions),
            So::Graph { .. } => None,
        }
    }

    /// Session index of `t` (session form only; None for init).
    pub fn session_of(&self, t: Tid) -> Option<usize> {
        match &self.so {
            So::Sessions { pos, .. } => {
                let (s, _) = pos[t.0 as usize];
                (s > 0).then(|| s as usize - 1)
            }
            So::Graph { .. } => None,
        }
    }

    /// General-form session order edges, if built from an edge list.
    pub fn so_edges(&self) -> Option<&[(Tid, Tid)]> {
        match &self.so {
            So::Graph { edges, .. } => Some(edges),
            So::Sessions { .. } => None,
        }
    }

    /// Generator edges of `so ∪ wro` at transaction level with labels:
    /// session chains (or the general-form edge list) plus init edges and
    /// the write-read pairs.
    pub fn base_edges(&self) -> impl Iterator<Item = (Tid, Tid, bool)> + '_ {
        // bool = true for so edges, false for wro.
        let so_edges: Vec<(Tid, Tid)> = match &self.so {
            So::Sessions { sessions, .. } => {
                let mut v = Vec::new();
                for chain in sessions {
                    if let Some(&first) = chain.first() {
                        v.push((INIT, first));
                    }
                    for pair in chain.windows(2) {
                        v.push((pair[0], pair[1]));
                    }
                }
                v
            }
            So::Graph { edges, .. } => {
                let mut v: Vec<(Tid, Tid)> =
                    (1..self.txns.len() as u32).map(|t| (INIT, Tid(t))).collect();
                v.extend_from_slice(edges);
                v
            }
        };
        let wro: Vec<(Tid, Tid)> = self
            .tids()
            .flat_map(|t| self.wro_succs(t).iter().map(move |&r| (t, r)))
            .collect();
        so_edges
            .into_iter()
            .map(|(a, b)| (a, b, true))
            .chain(wro.into_iter().map(|(a, b)| (a, b, false)))
    }

    /// Reachability rows of `(wro ∪ so)⁺`, indexed by source transaction.
    pub(crate) fn causal_reach(&self) -> Vec<BitRow> {
        let edges: Vec<(u32, u32)> =
            self.base_edges().map(|(a, b, _)| (a.0, b.0)).collect();
        reachability(self.txns.len(), &edges)
    }

    /// Maximum number of mutually so-unordered transactions (init excluded).
    /// Session form: the number of non-empty sessions. General form: the
    /// maximum antichain via minimum chain cover, exact up to 64
    /// transactions, otherwise an upper bound from a greedy chain cover.
    pub fn width(&self) -> Width {
        match &self.so {
            So::Sessions { sessions, .. } => {
                Width::Exact(sessions.iter().filter(|s| !s.is_empty()).count())
            }
            So::Graph { reach, .. } => {
                let n = self.txns.len();
                if n <= 1 {
                    return Width::Exact(0);
                }
                let m = n - 1; // non-init transactions
                if m <= EXACT_WIDTH_LIMIT {
                    Width::Exact(max_antichain(m, |a, b| reach[a + 1].get(b + 1)))
                } else {
                    Width::UpperBound(greedy_chain_cover(m, |a, b| reach[a + 1].get(b + 1)))
                }
            }
        }
    }
}

/// Drops internal reads (validating them against the latest preceding local
/// write) and keeps only the last write per variable, preserving the
/// relative order of surviving ops.
fn normalize_ops(raw: &[Operation], tid: &str, var_names: &[String]) -> Result<Vec<Operation>> {
    let mut local_write: std::collections::HashMap<Var, u64> = std::collections::HashMap::new();
    let mut kept: Vec<Operation> = Vec::with_capacity(raw.len());
    for op in raw {
        match op.kind {
            OpKind::Read => {
                if let Some(&w) = local_write.get(&op.var) {
                    if w != op.value {
                        return Err(Error::InternalReadMismatch {
                            tid: tid.to_string(),
                            var: var_names[op.var.0 as usize].clone(),
                            value: op.value,
                            written: w,
                        });
                    }
                    // Internal read; observable only inside the transaction.
                } else {
                    kept.push(*op);
                }
            }
            OpKind::Write => {
                local_write.insert(op.var, op.value);
                kept.push(*op);
            }
        }
    }
    // Keep only the last write per variable.
    let mut seen: std::collections::HashSet<Var> = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(kept.len());
    for op in kept.iter().rev() {
        if op.kind == OpKind::Write
            && !seen.insert(op.var) {
                continue;
            }
        out.push(*op);
    }
    out.reverse();
    Ok(out)
}

/// Normalizes a transaction's op list in isolation. Exposed for direct use;
/// [`History::build`] applies the same routine to every transaction.
pub fn normalize_transaction(t: &RawTransaction) -> Result<RawTransaction> {
    let mut vars: Vec<String> = Vec::new();
    let mut ids = std::collections::HashMap::new();
    let interned: Vec<Operation> = t
        .ops
        .iter()
        .map(|op| {
            let var = *ids.entry(op.var.clone()).or_insert_with(|| {
                vars.push(op.var.clone());
                Var(vars.len() as u32 - 1)
            });
            Operation { kind: op.kind, var, value: op.value }
        })
        .collect();
    let ops = normalize_ops(&interned, &t.id, &vars)?;
    Ok(RawTransaction {
        id: t.id.clone(),
        ops: ops
            .into_iter()
            .map(|op| RawOp { kind: op.kind, var: vars[op.var.0 as usize].clone(), value: op.value })
            .collect(),
    })
}

/// Maximum antichain of a strict partial order on `0..m`, by Dilworth via
/// maximum bipartite matching on the order relation.
fn max_antichain(m: usize, before: impl Fn(usize, usize) -> bool) -> usize {
    let mut match_right: Vec<Option<usize>> = vec![None; m];
    let mut matched = 0;
    for a in 0..m {
        let mut seen = vec![false; m];
        if augment(a, m, &before, &mut match_right, &mut seen) {
            matched += 1;
        }
    }
    m - matched
}

fn augment(
    a: usize,
    m: usize,
    before: &impl Fn(usize, usize) -> bool,
    match_right: &mut Vec<Option<usize>>,
    seen: &mut [bool],
) -> bool {
    for b in 0..m {
        if a != b && before(a, b) && !seen[b] {
            seen[b] = true;
            let free = match match_right[b] {
                None => true,
                Some(prev) => augment(prev, m, before, match_right, seen),
            };
            if free {
                match_right[b] = Some(a);
                return true;
            }
        }
    }
    false
}

/// Upper bound on the maximum antichain: the size of any chain cover bounds
/// it, so repeatedly peel the longest remaining chain.
fn greedy_chain_cover(m: usize, before: impl Fn(usize, usize) -> bool) -> usize {
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut chains = 0;
    while !remaining.is_empty() {
        // Longest chain in the remaining induced suborder, by DP over a
        // topological order (indices are arbitrary but `before` is a strict
        // partial order, so any linear extension works; sort by number of
        // predecessors as a cheap proxy and fix up with DP over pairs).
        let k = remaining.len();
        let mut best_len = vec![1usize; k];
        let mut best_prev = vec![usize::MAX; k];
        // O(k^2) DP; relies on before() being transitive.
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| remaining.iter().filter(|&&j| before(j, remaining[i])).count());
        for (oi, &i) in order.iter().enumerate() {
            for &j in &order[..oi] {
                if before(remaining[j], remaining[i]) && best_len[j] + 1 > best_len[i] {
                    best_len[i] = best_len[j] + 1;
                    best_prev[i] = j;
                }
            }
        }
        let mut at = (0..k).max_by_key(|&i| best_len[i]).unwrap();
        let mut chain = Vec::new();
        loop {
            chain.push(remaining[at]);
            if best_prev[at] == usize::MAX {
                break;
            }
            at = best_prev[at];
        }
        let drop: std::collections::HashSet<usize> = chain.into_iter().collect();
        remaining.retain(|t| !drop.contains(t));
        chains += 1;
    }
    chains
}

#[cfg(test)]
mod tests;
