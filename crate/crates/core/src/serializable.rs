//! Serializability checking by depth-first search over session-order
//! prefixes, with memoization of prefixes proven non-extendable.
//!
//! A prefix (downward-closed transaction set) is grown one transaction at a
//! time. A transaction is a valid extension when all of its write-read
//! predecessors are already in the prefix and none of its writes would be
//! overwritten: no transaction outside the prefix may still read, from
//! inside the prefix, a variable the candidate writes. Distinct prefixes are
//! identified by per-session consumed counts (session form) or by the
//! consumed transaction set (general form).

use crate::error::{Error, Result};
use crate::history::{History, Tid, INIT};
use crate::verdict::{Criterion, Evidence, Verdict};

/// Knobs for the prefix search.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Cap on expanded prefix states; exceeding it aborts the search.
    pub budget: u64,
    /// Memoize failed prefixes. Disabling only affects running time.
    pub memo: bool,
}

pub const DEFAULT_BUDGET: u64 = 10_000_000;

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: DEFAULT_BUDGET, memo: true }
    }
}

/// Search state: the consumed prefix and its linearization so far.
#[derive(Debug, Clone)]
pub struct PrefixState {
    consumed: Vec<bool>,
    /// Per-session consumed counts (session form only).
    counts: Vec<u32>,
    linearization: Vec<Tid>,
}

impl PrefixState {
    pub fn new(h: &History) -> Self {
        PrefixState {
            consumed: vec![false; h.txn_count()],
            counts: vec![0; h.sessions().map_or(0, |s| s.len())],
            linearization: Vec::new(),
        }
    }

    pub fn contains(&self, t: Tid) -> bool {
        self.consumed[t.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.linearization.len()
    }

    pub fn is_empty(&self) -> bool {
        self.linearization.is_empty()
    }

    pub fn linearization(&self) -> &[Tid] {
        &self.linearization
    }

    fn push(&mut self, h: &History, t: Tid) {
        self.consumed[t.0 as usize] = true;
        if t != INIT {
            if let Some(s) = h.session_of(t) {
                self.counts[s] += 1;
            }
        }
        self.linearization.push(t);
    }

    fn pop(&mut self, h: &History) -> Tid {
        let t = self.linearization.pop().expect("pop on empty prefix");
        self.consumed[t.0 as usize] = false;
        if t != INIT {
            if let Some(s) = h.session_of(t) {
                self.counts[s] -= 1;
            }
        }
        t
    }
}

enum Seen {
    Counts(std::collections::HashSet<Box<[u32]>>),
    Sets(std::collections::HashSet<Box<[u64]>>),
}

impl Seen {
    fn new(h: &History) -> Self {
        if h.is_session_form() {
            Seen::Counts(Default::default())
        } else {
            Seen::Sets(Default::default())
        }
    }

    fn key_sets(state: &PrefixState) -> Box<[u64]> {
        let mut words = vec![0u64; state.consumed.len().div_ceil(64)];
        for (i, &c) in state.consumed.iter().enumerate() {
            if c {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        words.into_boxed_slice()
    }

    fn contains(&self, state: &PrefixState) -> bool {
        match self {
            Seen::Counts(s) => s.contains(state.counts.as_slice()),
            Seen::Sets(s) => s.contains(&Self::key_sets(state)),
        }
    }

    fn insert(&mut self, state: &PrefixState) {
        match self {
            Seen::Counts(s) => {
                s.insert(state.counts.clone().into_boxed_slice());
            }
            Seen::Sets(s) => {
                s.insert(Self::key_sets(state));
            }
        }
    }
}

/// True iff extending the prefix `p` with `t` keeps it serializable:
/// (a) every write-read predecessor of `t` is already consumed, and
/// (b) for every variable `t` writes, no transaction outside `p ∪ {t}`
/// reads that variable from a transaction inside `p`.
pub fn is_valid_extension(h: &History, p: &PrefixState, t: Tid) -> bool {
    for &w in h.wro_preds(t) {
        if !p.contains(w) {
            return false;
        }
    }
    for &x in h.writes_of(t) {
        for &(writer, reader) in h.wro_pairs(x) {
            if reader != t && p.contains(writer) && !p.contains(reader) {
                return false;
            }
        }
    }
    true
}

/// Next so-minimal unconsumed transaction at enumeration position ≥ `from`.
/// Position 0 is init; session form then enumerates sessions in ascending
/// index, general form enumerates transactions in index order.
fn next_candidate(h: &History, state: &PrefixState, from: u32) -> Option<(u32, Tid)> {
    if from == 0 && !state.contains(INIT) {
        return Some((0, INIT));
    }
    if !state.contains(INIT) {
        return None;
    }
    match h.sessions() {
        Some(sessions) => {
            let start = (from.max(1) - 1) as usize;
            sessions.iter().enumerate().skip(start).find_map(|(s, chain)| {
                let consumed = state.counts[s] as usize;
                chain.get(consumed).map(|&t| (s as u32 + 1, t))
            })
        }
        None => {
            for t in from.max(1)..h.txn_count() as u32 {
                let t = Tid(t);
                if !state.contains(t) && h.so_preds_direct(t).iter().all(|&p| state.contains(p)) {
                    return Some((t.0, t));
                }
            }
            None
        }
    }
}

/// Decides serializability with the given options. Valid verdicts carry the
/// linearization as witness; violations carry the deepest prefix reached.
pub fn check_ser(h: &History, opts: &SearchOptions) -> Result<Verdict> {
    let n = h.txn_count();
    let mut state = PrefixState::new(h);
    let mut seen = Seen::new(h);
    let mut frames: Vec<u32> = vec![0];
    let mut explored: u64 = 0;
    let mut deepest: Vec<Tid> = Vec::new();

    loop {
        if state.len() == n {
            let witness: Vec<Tid> = state.linearization().to_vec();
            debug_assert!(verify_witness(h, &witness, Criterion::Serializability)?);
            let names = witness.iter().map(|&t| h.name(t).to_string()).collect();
            let mut v = Verdict::valid(Some(names));
            v.explored_states = explored;
            return Ok(v);
        }
        let frame = frames.last_mut().expect("root frame");
        match next_candidate(h, &state, *frame) {
            Some((pos, t)) => {
                *frame = pos + 1;
                if !is_valid_extension(h, &state, t) {
                    continue;
                }
                state.push(h, t);
                if opts.memo && seen.contains(&state) {
                    state.pop(h);
                    continue;
                }
                explored += 1;
                if explored > opts.budget {
                    return Err(Error::SearchBudgetExceeded { explored });
                }
                if state.len() > deepest.len() {
                    deepest = state.linearization().to_vec();
                }
                frames.push(0);
            }
            None => {
                if frames.len() == 1 {
                    let names = deepest.iter().map(|&t| h.name(t).to_string()).collect();
                    let mut v = Verdict::violation(Some(Evidence::DeepestPrefix(names)));
                    v.explored_states = explored;
                    return Ok(v);
                }
                if opts.memo {
                    seen.insert(&state);
                }
                frames.pop();
                state.pop(h);
            }
        }
    }
}

/// True iff `co` is a total order over all transactions extending
/// `so ∪ wro` and `⟨h, co⟩` satisfies the criterion's axioms.
pub fn verify_witness(h: &History, co: &[Tid], criterion: Criterion) -> Result<bool> {
    let n = h.txn_count();
    if co.len() != n {
        return Err(Error::NotTotalOrder);
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &t) in co.iter().enumerate() {
        if t.0 as usize >= n || pos[t.0 as usize] != usize::MAX {
            return Err(Error::NotTotalOrder);
        }
        pos[t.0 as usize] = i;
    }
    for (a, b, _) in h.base_edges() {
        if pos[a.0 as usize] >= pos[b.0 as usize] {
            return Ok(false);
        }
    }
    crate::oracle::axiom_holds(h, co, criterion)
}
