//! Brute-force ground truth: enumerate total commit orders extending
//! `so ∪ wro` and evaluate the consistency axioms literally.
//!
//! The enumeration backtracks over linear extensions, abandoning a prefix as
//! soon as the placed transactions already force an axiom violation in every
//! completion. The prune tests are exact at full depth, so the search is
//! equivalent to filtering all linear extensions through [`axiom_holds`];
//! the unit tests cross-check this against plain permutation enumeration.

use crate::error::{Error, Result};
use crate::history::{History, Tid, Var};
use crate::verdict::Criterion;

/// Default cap on non-init transactions for [`brute_check`].
pub const DEFAULT_LIMIT: usize = 10;

/// The individual axioms; snapshot isolation is the conjunction of
/// `Prefix` and `Conflict`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    ReadCommitted,
    ReadAtomic,
    Causal,
    Prefix,
    Conflict,
    Serializability,
}

pub fn axioms_of(criterion: Criterion) -> &'static [Axiom] {
    match criterion {
        Criterion::ReadCommitted => &[Axiom::ReadCommitted],
        Criterion::ReadAtomic => &[Axiom::ReadAtomic],
        Criterion::Causal => &[Axiom::Causal],
        Criterion::Prefix => &[Axiom::Prefix],
        Criterion::SnapshotIsolation => &[Axiom::Prefix, Axiom::Conflict],
        Criterion::Serializability => &[Axiom::Serializability],
    }
}

fn positions(h: &History, co: &[Tid]) -> Result<Vec<usize>> {
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
    Ok(pos)
}

/// Evaluates the criterion's axioms on `⟨h, co⟩` by direct quantifier
/// enumeration. `co` must be a permutation of all transactions but need not
/// extend `so ∪ wro`.
pub fn axiom_holds(h: &History, co: &[Tid], criterion: Criterion) -> Result<bool> {
    let pos = positions(h, co)?;
    Ok(axioms_of(criterion).iter().all(|&ax| eval_axiom(h, &pos, ax)))
}

fn eval_axiom(h: &History, pos: &[usize], ax: Axiom) -> bool {
    match ax {
        Axiom::ReadCommitted => eval_read_committed(h, pos),
        Axiom::ReadAtomic => eval_with_trigger(h, pos, |h, t2, t3| {
            h.in_wro(t2, t3) || h.so_before(t2, t3)
        }),
        Axiom::Causal => {
            let reach = h.causal_reach();
            eval_with_trigger(h, pos, |_, t2, t3| reach[t2.0 as usize].get(t3.0 as usize))
        }
        Axiom::Prefix => {
            // (t2,t3) ∈ co* ∘ (wro ∪ so) iff some wro∪so predecessor t4 of
            // t3 has pos[t2] ≤ pos[t4].
            let max_pred = max_pred_positions(h, pos);
            eval_with_trigger(h, pos, |_, t2, t3| {
                max_pred[t3.0 as usize].is_some_and(|m| pos[t2.0 as usize] <= m)
            })
        }
        Axiom::Conflict => {
            // (t2,t3) ∈ co* ∘ co with the last step between two writers of a
            // common variable: some conflicting t4 committed before t3 has
            // pos[t2] ≤ pos[t4].
            let max_confl = max_conflict_positions(h, pos);
            eval_with_trigger(h, pos, |_, t2, t3| {
                max_confl[t3.0 as usize].is_some_and(|m| pos[t2.0 as usize] <= m)
            })
        }
        Axiom::Serializability => {
            eval_with_trigger(h, pos, |_, t2, t3| pos[t2.0 as usize] < pos[t3.0 as usize])
        }
    }
}

/// Common axiom shape: for every read edge (t1, t3) on x and every other
/// writer t2 of x, trigger(t2, t3) forces t2 before t1.
fn eval_with_trigger(
    h: &History,
    pos: &[usize],
    trigger: impl Fn(&History, Tid, Tid) -> bool,
) -> bool {
    for x in 0..h.var_count() as u32 {
        let x = Var(x);
        for &(t1, t3) in h.wro_pairs(x) {
            for &t2 in h.writers(x) {
                if t2 != t1 && trigger(h, t2, t3) && pos[t2.0 as usize] >= pos[t1.0 as usize] {
                    return false;
                }
            }
        }
    }
    true
}

fn eval_read_committed(h: &History, pos: &[usize]) -> bool {
    for t3 in h.tids() {
        let ops = h.ops(t3);
        for (i, alpha) in ops.iter().enumerate() {
            let Some(t1) = h.read_src(t3, i) else { continue };
            for j in 0..i {
                let Some(t2) = h.read_src(t3, j) else { continue };
                if t2 != t1
                    && h.writes_var(t2, alpha.var)
                    && pos[t2.0 as usize] >= pos[t1.0 as usize]
                {
                    return false;
                }
            }
        }
    }
    true
}

fn max_pred_positions(h: &History, pos: &[usize]) -> Vec<Option<usize>> {
    h.tids()
        .map(|t3| {
            let mut best = None;
            for &t4 in h.wro_preds(t3) {
                best = best.max(Some(pos[t4.0 as usize]));
            }
            for t4 in h.tids() {
                if h.so_before(t4, t3) {
                    best = best.max(Some(pos[t4.0 as usize]));
                }
            }
            best
        })
        .collect()
}

fn max_conflict_positions(h: &History, pos: &[usize]) -> Vec<Option<usize>> {
    h.tids()
        .map(|t3| {
            let mut best = None;
            for &x in h.writes_of(t3) {
                for &t4 in h.writers(x) {
                    if t4 != t3 && pos[t4.0 as usize] < pos[t3.0 as usize] {
                        best = best.max(Some(pos[t4.0 as usize]));
                    }
                }
            }
            best
        })
        .collect()
}

/// True iff some linear extension of `so ∪ wro` satisfies the criterion's
/// axioms. Guarded at [`DEFAULT_LIMIT`] non-init transactions.
pub fn brute_check(h: &History, criterion: Criterion) -> Result<bool> {
    brute_check_with_limit(h, criterion, DEFAULT_LIMIT)
}

/// [`brute_check`] with an explicit size guard (at most 63 non-init
/// transactions; the search state is a single machine word).
pub fn brute_check_with_limit(h: &History, criterion: Criterion, max_non_init: usize) -> Result<bool> {
    let n = h.txn_count();
    if n - 1 > max_non_init {
        return Err(Error::InstanceTooLarge(format!(
            "{} non-init transactions, limit {max_non_init}",
            n - 1
        )));
    }
    if n > 64 {
        return Err(Error::InstanceTooLarge(format!("{n} transactions, hard limit 64")));
    }
    let search = Search::new(h, criterion);
    Ok(search.run())
}

struct Search<'h> {
    h: &'h History,
    criterion: Criterion,
    n: usize,
    all: u64,
    /// Direct so ∪ wro predecessors; all must be placed before a candidate.
    pred_mask: Vec<u64>,
    /// Per variable: (writer, mask of its readers).
    var_readers: Vec<Vec<(Tid, u64)>>,
    /// Full wro ∪ so predecessor mask (Prefix lock test).
    full_pred_mask: Vec<u64>,
    /// Transactions sharing a written variable (Conflict lock test).
    conflict_mask: Vec<u64>,
    /// Saturation-style required pairs for RC/RA/CC: must_precede[u] is the
    /// mask of transactions that must commit before u; must_follow is the
    /// inverse direction.
    must_precede: Vec<u64>,
    must_follow: Vec<u64>,
}

impl<'h> Search<'h> {
    fn new(h: &'h History, criterion: Criterion) -> Self {
        let n = h.txn_count();
        let bit = |t: Tid| 1u64 << t.0;
        let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

        let mut pred_mask = vec![0u64; n];
        let mut full_pred_mask = vec![0u64; n];
        for t in h.tids() {
            for &p in h.so_preds_direct(t) {
                pred_mask[t.0 as usize] |= bit(p);
            }
            for &p in h.wro_preds(t) {
                pred_mask[t.0 as usize] |= bit(p);
                full_pred_mask[t.0 as usize] |= bit(p);
            }
            for p in h.tids() {
                if h.so_before(p, t) {
                    full_pred_mask[t.0 as usize] |= bit(p);
                }
            }
        }

        let mut var_readers = vec![Vec::new(); h.var_count()];
        for x in 0..h.var_count() as u32 {
            let mut per_writer: std::collections::BTreeMap<Tid, u64> = Default::default();
            for &(w, r) in h.wro_pairs(Var(x)) {
                *per_writer.entry(w).or_default() |= bit(r);
            }
            var_readers[x as usize] = per_writer.into_iter().collect();
        }

        let mut conflict_mask = vec![0u64; n];
        for x in 0..h.var_count() as u32 {
            let writers = h.writers(Var(x));
            for &a in writers {
                for &b in writers {
                    if a != b {
                        conflict_mask[a.0 as usize] |= bit(b);
                    }
                }
            }
        }

        let mut must_precede = vec![0u64; n];
        let mut must_follow = vec![0u64; n];
        let mut require = |first: Tid, second: Tid| {
            must_precede[second.0 as usize] |= bit(first);
            must_follow[first.0 as usize] |= bit(second);
        };
        match criterion {
            Criterion::ReadCommitted => {
                for t3 in h.tids() {
                    let ops = h.ops(t3);
                    for (i, alpha) in ops.iter().enumerate() {
                        let Some(t1) = h.read_src(t3, i) else { continue };
                        for j in 0..i {
                            let Some(t2) = h.read_src(t3, j) else { continue };
                            if t2 != t1 && h.writes_var(t2, alpha.var) {
                                require(t2, t1);
                            }
                        }
                    }
                }
            }
            Criterion::ReadAtomic | Criterion::Causal => {
                let reach = (criterion == Criterion::Causal).then(|| h.causal_reach());
                for x in 0..h.var_count() as u32 {
                    let x = Var(x);
                    for &(t1, t3) in h.wro_pairs(x) {
                        for &t2 in h.writers(x) {
                            if t2 == t1 {
                                continue;
                            }
                            let triggered = match &reach {
                                Some(r) => r[t2.0 as usize].get(t3.0 as usize),
                                None => h.in_wro(t2, t3) || h.so_before(t2, t3),
                            };
                            if triggered {
                                require(t2, t1);
                            }
                        }
                    }
                }
            }
            _ => {}
        }

        Search {
            h,
            criterion,
            n,
            all,
            pred_mask,
            var_readers,
            full_pred_mask,
            conflict_mask,
            must_precede,
            must_follow,
        }
    }

    fn run(&self) -> bool {
        let mut pos = vec![usize::MAX; self.n];
        let mut order = Vec::with_capacity(self.n);
        self.dfs(0, &mut pos, &mut order)
    }

    fn dfs(&self, placed: u64, pos: &mut [usize], order: &mut Vec<Tid>) -> bool {
        if placed == self.all {
            debug_assert!(axiom_holds(self.h, order, self.criterion).unwrap());
            return true;
        }
        for u in 0..self.n as u32 {
            let ub = 1u64 << u;
            if placed & ub != 0 || self.pred_mask[u as usize] & !placed != 0 {
                continue;
            }
            let now = placed | ub;
            pos[u as usize] = order.len();
            order.push(Tid(u));
            if !self.locks_violation(Tid(u), now, pos) && self.dfs(now, pos, order) {
                return true;
            }
            order.pop();
            pos[u as usize] = usize::MAX;
        }
        false
    }

    /// True when appending `u` makes some axiom instance violated in every
    /// completion of the current prefix.
    fn locks_violation(&self, u: Tid, placed: u64, pos: &[usize]) -> bool {
        let unplaced = self.all & !placed;
        let ub = 1u64 << u.0;
        match self.criterion {
            Criterion::ReadCommitted | Criterion::ReadAtomic | Criterion::Causal => {
                // u must follow every transaction in must_precede[u]; any of
                // them still unplaced will end up after u. Symmetrically a
                // placed member of must_follow[u] already precedes u.
                self.must_precede[u.0 as usize] & unplaced != 0
                    || self.must_follow[u.0 as usize] & placed & !ub != 0
            }
            Criterion::Serializability => self.ser_lock(u, placed, unplaced),
            Criterion::Prefix => self.prefix_lock(u, placed, unplaced),
            Criterion::SnapshotIsolation => {
                self.prefix_lock(u, placed, unplaced)
                    || self.conflict_lock(u, placed, unplaced, pos)
            }
        }
    }

    /// u plays t2: it writes x after some placed writer t1 of x that is
    /// still being read by an unplaced transaction.
    fn ser_lock(&self, u: Tid, placed: u64, unplaced: u64) -> bool {
        for &x in self.h.writes_of(u) {
            for &(w, readers) in &self.var_readers[x.0 as usize] {
                if w != u && placed & (1 << w.0) != 0 && readers & unplaced != 0 {
                    return true;
                }
            }
        }
        false
    }

    /// u plays t2: a reader t3 of an already-placed writer t1 of x still has
    /// a wro ∪ so predecessor at or after u, so t3 observes u's write of x
    /// overwriting the value it read.
    fn prefix_lock(&self, u: Tid, placed: u64, unplaced: u64) -> bool {
        let ub = 1u64 << u.0;
        for &x in self.h.writes_of(u) {
            for &(w, readers) in &self.var_readers[x.0 as usize] {
                if w == u || placed & (1 << w.0) == 0 {
                    continue;
                }
                let mut rs = readers & !ub;
                while rs != 0 {
                    let r = rs.trailing_zeros() as usize;
                    rs &= rs - 1;
                    if self.full_pred_mask[r] & (unplaced | ub) != 0 {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// u plays t4: it conflicts with an unplaced t3 whose read of x from a
    /// placed t1 is already overwritten by a placed t2 after t1.
    fn conflict_lock(&self, u: Tid, placed: u64, unplaced: u64, pos: &[usize]) -> bool {
        let mut t3s = unplaced & self.conflict_mask[u.0 as usize];
        while t3s != 0 {
            let t3 = Tid(t3s.trailing_zeros());
            t3s &= t3s - 1;
            for (i, _op) in self.h.ops(t3).iter().enumerate() {
                let Some(t1) = self.h.read_src(t3, i) else { continue };
                if placed & (1 << t1.0) == 0 {
                    continue;
                }
                let x = self.h.ops(t3)[i].var;
                for &t2 in self.h.writers(x) {
                    if t2 != t1
                        && placed & (1 << t2.0) != 0
                        && pos[t2.0 as usize] > pos[t1.0 as usize]
                    {
                        return true;
                    }
                }
            }
        }
        false
    }
}
