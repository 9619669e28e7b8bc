//! CNF encoding of criterion checking and a small DPLL solver.
//!
//! Two propositional variables exist per ordered transaction pair: one for
//! membership in `(wro ∪ so)⁺` and one for the commit order. Clauses assert
//! the known facts, transitivity, the commit order being total, and the
//! criterion's axiom instances; a history is consistent iff the formula is
//! satisfiable, and a model decodes to a witness commit order.

use crate::error::{Error, Result};
use crate::history::{History, Tid, Var};
use crate::verdict::Criterion;

/// Relation a propositional variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelTag {
    /// `(wro ∪ so)⁺` membership.
    Causal,
    /// Commit order membership.
    Co,
}

impl std::fmt::Display for RelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RelTag::Causal => f.write_str("CAUSAL"),
            RelTag::Co => f.write_str("CO"),
        }
    }
}

/// A CNF formula with a map from pair variables back to transactions.
#[derive(Debug, Clone)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
    /// Meaning of variable `i + 1`; None for auxiliary (clause splitting)
    /// variables.
    pub var_map: Vec<Option<(RelTag, String, String)>>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> Self {
        CnfFormula { num_vars, clauses, var_map: vec![None; num_vars as usize] }
    }

    /// Splits every clause longer than three literals with fresh variables,
    /// keeping the 3-SAT shape.
    pub fn into_3sat(mut self) -> CnfFormula {
        let mut out = Vec::with_capacity(self.clauses.len());
        for clause in std::mem::take(&mut self.clauses) {
            if clause.len() <= 3 {
                out.push(clause);
                continue;
            }
            // (l1 l2 a) (¬a l3 b) (¬b l4 l5) ...
            let mut rest = clause;
            loop {
                if rest.len() <= 3 {
                    out.push(rest);
                    break;
                }
                self.num_vars += 1;
                self.var_map.push(None);
                let aux = self.num_vars as i32;
                let tail = rest.split_off(2);
                rest.push(aux);
                out.push(rest);
                rest = vec![-aux];
                rest.extend(tail);
            }
        }
        self.clauses = out;
        self
    }
}

/// Cap on encoded transactions (the pair count is quadratic).
pub const DEFAULT_ENCODE_CAP: usize = 200;

struct Encoder<'h> {
    h: &'h History,
    n: usize,
    clauses: Vec<Vec<i32>>,
}

impl<'h> Encoder<'h> {
    /// Pair variables are laid out causally first, then commit order, each
    /// block in row-major order over ordered pairs with a ≠ b.
    fn var(&self, tag: RelTag, a: Tid, b: Tid) -> i32 {
        debug_assert_ne!(a, b);
        let (a, b) = (a.0 as usize, b.0 as usize);
        let col = if b > a { b - 1 } else { b };
        let pair = a * (self.n - 1) + col;
        let base = match tag {
            RelTag::Causal => 0,
            RelTag::Co => self.n * (self.n - 1),
        };
        (base + pair + 1) as i32
    }

    fn causal(&self, a: Tid, b: Tid) -> i32 {
        self.var(RelTag::Causal, a, b)
    }

    fn co(&self, a: Tid, b: Tid) -> i32 {
        self.var(RelTag::Co, a, b)
    }

    fn clause(&mut self, lits: Vec<i32>) {
        self.clauses.push(lits);
    }
}

/// Encodes "h satisfies criterion" as CNF.
pub fn encode(h: &History, criterion: Criterion) -> Result<CnfFormula> {
    encode_with_cap(h, criterion, DEFAULT_ENCODE_CAP)
}

pub fn encode_with_cap(h: &History, criterion: Criterion, cap: usize) -> Result<CnfFormula> {
    let n = h.txn_count();
    if n > cap {
        return Err(Error::InstanceTooLarge(format!(
            "{n} transactions exceed the encoding cap of {cap}"
        )));
    }
    let mut enc = Encoder { h, n, clauses: Vec::new() };
    let tids: Vec<Tid> = h.tids().collect();

    // Facts: generator edges of wro ∪ so are causal.
    for (a, b, _) in h.base_edges() {
        let lit = enc.causal(a, b);
        enc.clause(vec![lit]);
    }

    // Causal transitivity and inclusion in the commit order.
    for &a in &tids {
        for &b in &tids {
            if a == b {
                continue;
            }
            let cab = enc.causal(a, b);
            enc.clause(vec![-cab, enc.co(a, b)]);
            for &c in &tids {
                if c == a || c == b {
                    continue;
                }
                let clause = vec![-cab, -enc.causal(b, c), enc.causal(a, c)];
                enc.clause(clause);
            }
        }
    }

    // Commit order: total, antisymmetric, transitive.
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (tids[i], tids[j]);
            let ab = enc.co(a, b);
            let ba = enc.co(b, a);
            enc.clause(vec![ab, ba]);
            enc.clause(vec![-ab, -ba]);
        }
    }
    for &a in &tids {
        for &b in &tids {
            if a == b {
                continue;
            }
            for &c in &tids {
                if c == a || c == b {
                    continue;
                }
                let clause = vec![-enc.co(a, b), -enc.co(b, c), enc.co(a, c)];
                enc.clause(clause);
            }
        }
    }

    // Axiom instances.
    match criterion {
        Criterion::ReadCommitted => {
            // The wro ∘ po trigger is fixed by the history; emit units.
            for t3 in h.tids() {
                let ops = h.ops(t3);
                for (i, alpha) in ops.iter().enumerate() {
                    let Some(t1) = h.read_src(t3, i) else { continue };
                    for j in 0..i {
                        let Some(t2) = h.read_src(t3, j) else { continue };
                        if t2 != t1 && h.writes_var(t2, alpha.var) {
                            let lit = enc.co(t2, t1);
                            enc.clause(vec![lit]);
                        }
                    }
                }
            }
        }
        Criterion::ReadAtomic => {
            for_wro_writer_pairs(h, |t1, t2, t3| {
                if h.in_wro(t2, t3) || h.so_before(t2, t3) {
                    let lit = enc.co(t2, t1);
                    enc.clause(vec![lit]);
                }
            });
        }
        Criterion::Causal => {
            for_wro_writer_pairs(h, |t1, t2, t3| {
                if t2 != t3 {
                    let clause = vec![-enc.causal(t2, t3), enc.co(t2, t1)];
                    enc.clause(clause);
                }
            });
        }
        Criterion::Serializability => {
            for_wro_writer_pairs(h, |t1, t2, t3| {
                if t2 != t3 {
                    let clause = vec![-enc.co(t2, t3), enc.co(t2, t1)];
                    enc.clause(clause);
                }
            });
        }
        Criterion::Prefix => emit_prefix(&mut enc),
        Criterion::SnapshotIsolation => {
            emit_prefix(&mut enc);
            emit_conflict(&mut enc);
        }
    }

    let num_vars = (2 * n * (n - 1)) as u32;
    let mut var_map = vec![None; num_vars as usize];
    for &a in &tids {
        for &b in &tids {
            if a == b {
                continue;
            }
            for tag in [RelTag::Causal, RelTag::Co] {
                let v = enc.var(tag, a, b) as usize - 1;
                var_map[v] = Some((tag, h.name(a).to_string(), h.name(b).to_string()));
            }
        }
    }
    let f = CnfFormula { num_vars, clauses: enc.clauses, var_map };
    Ok(f.into_3sat())
}

/// Enumerates (t1, t2, t3) with (t1, t3) a wro pair on x and t2 ≠ t1
/// another writer of x.
fn for_wro_writer_pairs(h: &History, mut f: impl FnMut(Tid, Tid, Tid)) {
    for x in (0..h.var_count() as u32).map(Var) {
        for &(t1, t3) in h.wro_pairs(x) {
            for &t2 in h.writers(x) {
                if t2 != t1 {
                    f(t1, t2, t3);
                }
            }
        }
    }
}

/// Prefix axiom: co*∘(wro∪so) is expanded over the fixed wro ∪ so
/// predecessors t4 of the reader.
fn emit_prefix(enc: &mut Encoder) {
    let h = enc.h;
    let mut preds: Vec<Vec<Tid>> = h
        .tids()
        .map(|t3| {
            let mut p: Vec<Tid> = h.wro_preds(t3).to_vec();
            p.extend(h.tids().filter(|&t4| h.so_before(t4, t3)));
            p.sort_unstable();
            p.dedup();
            p
        })
        .collect();
    for p in &mut preds {
        p.shrink_to_fit();
    }
    for_wro_writer_pairs(h, |t1, t2, t3| {
        if t2 == t3 {
            return;
        }
        for &t4 in &preds[t3.0 as usize] {
            if t4 == t2 {
                let lit = enc.co(t2, t1);
                enc.clause(vec![lit]);
            } else {
                let clause = vec![-enc.co(t2, t4), enc.co(t2, t1)];
                enc.clause(clause);
            }
        }
    });
}

/// Conflict axiom: the co* step to a conflicting t4 committed before the
/// reader t3.
fn emit_conflict(enc: &mut Encoder) {
    let h = enc.h;
    for_wro_writer_pairs(h, |t1, t2, t3| {
        if t2 == t3 {
            return;
        }
        let mut conflicting: Vec<Tid> = h
            .writes_of(t3)
            .iter()
            .flat_map(|&y| h.writers(y).iter().copied())
            .filter(|&t4| t4 != t3)
            .collect();
        conflicting.sort_unstable();
        conflicting.dedup();
        for t4 in conflicting {
            if t4 == t2 {
                let clause = vec![-enc.co(t2, t3), enc.co(t2, t1)];
                enc.clause(clause);
            } else {
                let clause = vec![-enc.co(t2, t4), -enc.co(t4, t3), enc.co(t2, t1)];
                enc.clause(clause);
            }
        }
    });
}

/// DIMACS CNF output with a comment block mapping pair variables.
pub fn emit_dimacs(f: &CnfFormula) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    out.push_str("c txncheck cnf encoding\n");
    for (i, entry) in f.var_map.iter().enumerate() {
        if let Some((tag, a, b)) = entry {
            let _ = writeln!(out, "c var {} = {} {} {}", i + 1, tag, a, b);
        }
    }
    let _ = writeln!(out, "p cnf {} {}", f.num_vars, f.clauses.len());
    for clause in &f.clauses {
        for lit in clause {
            let _ = write!(out, "{lit} ");
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Vec<bool>),
    Unsat,
}

pub const DEFAULT_CONFLICT_BUDGET: u64 = 1_000_000;

/// DPLL with two-watched-literal unit propagation and first-unassigned
/// branching. Complete within the conflict budget.
pub fn solve(f: &CnfFormula) -> Result<SatResult> {
    solve_with_budget(f, DEFAULT_CONFLICT_BUDGET)
}

pub fn solve_with_budget(f: &CnfFormula, conflict_budget: u64) -> Result<SatResult> {
    let nv = f.num_vars as usize;
    if f.clauses.iter().any(|c| c.is_empty()) {
        return Ok(SatResult::Unsat);
    }

    // Literal index: var v (0-based) positive = 2v, negative = 2v + 1.
    let lit_index = |lit: i32| -> usize {
        let v = (lit.unsigned_abs() as usize) - 1;
        2 * v + usize::from(lit < 0)
    };

    let mut assign: Vec<Option<bool>> = vec![None; nv];
    let mut trail: Vec<u32> = Vec::new();
    // (decision level start in trail, branched variable, tried both?)
    let mut decisions: Vec<(usize, u32, bool)> = Vec::new();
    let mut watches: Vec<Vec<u32>> = vec![Vec::new(); 2 * nv];
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut pending: Vec<i32> = Vec::new(); // initial unit facts

    for c in &f.clauses {
        let mut c = c.clone();
        c.sort_unstable();
        c.dedup();
        if c.iter().any(|&l| c.binary_search(&-l).is_ok()) {
            continue; // tautology
        }
        if c.len() == 1 {
            pending.push(c[0]);
            continue;
        }
        let idx = clauses.len() as u32;
        watches[lit_index(c[0])].push(idx);
        watches[lit_index(c[1])].push(idx);
        clauses.push(c);
    }

    let value_of = |assign: &[Option<bool>], lit: i32| -> Option<bool> {
        assign[(lit.unsigned_abs() as usize) - 1].map(|v| v == (lit > 0))
    };

    // Returns false on conflict.
    let enqueue = |assign: &mut Vec<Option<bool>>, trail: &mut Vec<u32>, lit: i32| -> bool {
        let v = (lit.unsigned_abs() as usize) - 1;
        match assign[v] {
            None => {
                assign[v] = Some(lit > 0);
                trail.push(v as u32);
                true
            }
            Some(cur) => cur == (lit > 0),
        }
    };

    // Propagate everything from `from` onward; returns false on conflict.
    let propagate = |assign: &mut Vec<Option<bool>>,
                     trail: &mut Vec<u32>,
                     watches: &mut Vec<Vec<u32>>,
                     clauses: &Vec<Vec<i32>>,
                     mut head: usize|
     -> bool {
        while head < trail.len() {
            let v = trail[head] as usize;
            head += 1;
            let false_lit = if assign[v] == Some(true) { -(v as i32 + 1) } else { v as i32 + 1 };
            let widx = lit_index(false_lit);
            let mut i = 0;
            'watchers: while i < watches[widx].len() {
                let ci = watches[widx][i] as usize;
                // Find a replacement watch.
                let mut unassigned: Option<i32> = None;
                for &l in &clauses[ci] {
                    if l == false_lit {
                        continue;
                    }
                    match value_of(assign, l) {
                        Some(true) => {
                            i += 1;
                            continue 'watchers;
                        }
                        None => {
                            // Prefer a literal not already watched here.
                            if watches[lit_index(l)].iter().all(|&c| c as usize != ci) {
                                unassigned = Some(l);
                                break;
                            }
                            if unassigned.is_none() {
                                unassigned = Some(l);
                            }
                        }
                        Some(false) => {}
                    }
                }
                match unassigned {
                    Some(l) if watches[lit_index(l)].iter().all(|&c| c as usize != ci) => {
                        watches[widx].swap_remove(i);
                        watches[lit_index(l)].push(ci as u32);
                    }
                    Some(l) => {
                        // Clause is unit on l.
                        if !enqueue(assign, trail, l) {
                            return false;
                        }
                        i += 1;
                    }
                    None => return false, // all false
                }
            }
        }
        true
    };

    // Assert the unit facts.
    for lit in pending {
        if !enqueue(&mut assign, &mut trail, lit) {
            return Ok(SatResult::Unsat);
        }
    }
    if !propagate(&mut assign, &mut trail, &mut watches, &clauses, 0) {
        return Ok(SatResult::Unsat);
    }

    let mut conflicts: u64 = 0;
    loop {
        // First unassigned variable.
        match (0..nv).find(|&v| assign[v].is_none()) {
            None => {
                let model = assign.iter().map(|a| a.unwrap_or(false)).collect();
                return Ok(SatResult::Sat(model));
            }
            Some(v) => {
                decisions.push((trail.len(), v as u32, false));
                assign[v] = Some(false);
                trail.push(v as u32);
            }
        }
        loop {
            let head = decisions.last().map(|&(start, _, _)| start).unwrap_or(0);
            if propagate(&mut assign, &mut trail, &mut watches, &clauses, head) {
                break;
            }
            conflicts += 1;
            if conflicts > conflict_budget {
                return Err(Error::SolverBudgetExceeded);
            }
            // Backtrack to the most recent decision not yet tried both ways.
            loop {
                match decisions.pop() {
                    None => return Ok(SatResult::Unsat),
                    Some((start, var, tried_both)) => {
                        for &t in &trail[start..] {
                            assign[t as usize] = None;
                        }
                        trail.truncate(start);
                        if !tried_both {
                            decisions.push((start, var, true));
                            assign[var as usize] = Some(true);
                            trail.push(var);
                            break;
                        }
                    }
                }
            }
        }
    }
}

/// Decodes a satisfying assignment into the witness commit order: sort
/// transactions by their number of CO predecessors.
pub fn decode_order(f: &CnfFormula, model: &[bool]) -> Vec<String> {
    let mut pred_count: std::collections::BTreeMap<&str, usize> = Default::default();
    for (i, entry) in f.var_map.iter().enumerate() {
        if let Some((RelTag::Co, a, b)) = entry {
            pred_count.entry(a.as_str()).or_default();
            let slot = pred_count.entry(b.as_str()).or_default();
            if model[i] {
                *slot += 1;
            }
        }
    }
    let mut order: Vec<(usize, &str)> = pred_count.into_iter().map(|(t, c)| (c, t)).collect();
    order.sort();
    order.into_iter().map(|(_, t)| t.to_string()).collect()
}

/// Checks a criterion by encoding and solving; models decode to witnesses.
pub fn check_via_sat(
    h: &History,
    criterion: Criterion,
    conflict_budget: u64,
) -> Result<crate::verdict::Verdict> {
    let f = encode(h, criterion)?;
    match solve_with_budget(&f, conflict_budget)? {
        SatResult::Sat(model) => {
            let witness = decode_order(&f, &model);
            debug_assert!({
                let co: Vec<Tid> =
                    witness.iter().map(|n| h.tid_by_name(n).unwrap()).collect();
                crate::serializable::verify_witness(h, &co, criterion).unwrap()
            });
            Ok(crate::verdict::Verdict::valid(Some(witness)))
        }
        SatResult::Unsat => Ok(crate::verdict::Verdict::violation(None)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::{HistoryInput, RawOp, RawTransaction};
    use crate::serializable::SearchOptions;

    fn txn(id: &str, ops: Vec<RawOp>) -> RawTransaction {
        RawTransaction::new(id, ops)
    }

    fn r(var: &str, value: u64) -> RawOp {
        RawOp::read(var, value)
    }

    fn w(var: &str, value: u64) -> RawOp {
        RawOp::write(var, value)
    }

    fn sessions(s: Vec<Vec<RawTransaction>>) -> History {
        History::build(HistoryInput::Sessions(s)).unwrap()
    }

    fn causal_violation() -> History {
        sessions(vec![
            vec![txn("s11", vec![w("x", 1)]), txn("s12", vec![w("x", 2)])],
            vec![txn("t1", vec![r("x", 2), w("y", 1)])],
            vec![txn("t2", vec![r("x", 1), r("y", 1)])],
        ])
    }

    #[test]
    fn trivially_satisfiable_and_unsatisfiable() {
        let f = CnfFormula::new(1, vec![vec![1]]);
        assert!(matches!(solve(&f).unwrap(), SatResult::Sat(_)));
        let f = CnfFormula::new(1, vec![vec![1], vec![-1]]);
        assert_eq!(solve(&f).unwrap(), SatResult::Unsat);
    }

    #[test]
    fn solver_handles_small_pigeonholes() {
        // 3 pigeons, 2 holes: vars p(i,h) = 2i + h + 1.
        let p = |i: i32, h: i32| 2 * i + h + 1;
        let mut clauses = Vec::new();
        for i in 0..3 {
            clauses.push(vec![p(i, 0), p(i, 1)]);
        }
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    clauses.push(vec![-p(i, h), -p(j, h)]);
                }
            }
        }
        let f = CnfFormula::new(6, clauses);
        assert_eq!(solve(&f).unwrap(), SatResult::Unsat);
    }

    #[test]
    fn conflict_budget_is_enforced() {
        // An unsatisfiable pigeonhole needs more than one conflict.
        let p = |i: i32, h: i32| 2 * i + h + 1;
        let mut clauses = Vec::new();
        for i in 0..3 {
            clauses.push(vec![p(i, 0), p(i, 1)]);
        }
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    clauses.push(vec![-p(i, h), -p(j, h)]);
                }
            }
        }
        let f = CnfFormula::new(6, clauses);
        assert!(matches!(solve_with_budget(&f, 1), Err(Error::SolverBudgetExceeded)));
    }

    #[test]
    fn clause_splitting_preserves_satisfiability() {
        let long = CnfFormula::new(5, vec![vec![1, 2, 3, 4, 5]]).into_3sat();
        assert!(long.clauses.iter().all(|c| c.len() <= 3));
        assert!(long.num_vars > 5);
        assert!(matches!(solve(&long).unwrap(), SatResult::Sat(_)));

        let contradictory =
            CnfFormula::new(4, vec![vec![1, 2, 3, 4], vec![-1], vec![-2], vec![-3], vec![-4]])
                .into_3sat();
        assert_eq!(solve(&contradictory).unwrap(), SatResult::Unsat);
    }

    #[test]
    fn dimacs_shape() {
        let f = CnfFormula::new(1, vec![vec![1]]);
        let text = emit_dimacs(&f);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text, "c txncheck cnf encoding\np cnf 1 1\n1 0\n");
    }

    #[test]
    fn dimacs_is_deterministic_and_mapped() {
        let h = causal_violation();
        let f = encode(&h, Criterion::Causal).unwrap();
        let a = emit_dimacs(&f);
        let b = emit_dimacs(&encode(&h, Criterion::Causal).unwrap());
        assert_eq!(a, b);
        assert!(a.contains("c var 1 = CAUSAL"));
    }

    #[test]
    fn causal_violation_is_unsat() {
        let h = causal_violation();
        let f = encode(&h, Criterion::Causal).unwrap();
        assert_eq!(solve(&f).unwrap(), SatResult::Unsat);
        // But the same history is Read Atomic.
        let f = encode(&h, Criterion::ReadAtomic).unwrap();
        assert!(matches!(solve(&f).unwrap(), SatResult::Sat(_)));
    }

    #[test]
    fn init_only_history_is_sat() {
        let h = History::build(HistoryInput::Sessions(vec![])).unwrap();
        for c in Criterion::ALL {
            let f = encode(&h, c).unwrap();
            assert!(matches!(solve(&f).unwrap(), SatResult::Sat(_)), "{c}");
        }
    }

    #[test]
    fn decoded_models_are_verified_witnesses() {
        let h = sessions(vec![
            vec![txn("t1", vec![r("x", 0)]), txn("t3", vec![w("x", 1)])],
            vec![txn("t2", vec![r("x", 0)]), txn("t4", vec![w("x", 2)])],
        ]);
        for c in Criterion::ALL {
            let v = check_via_sat(&h, c, DEFAULT_CONFLICT_BUDGET).unwrap();
            assert!(v.is_valid(), "{c}");
            let co: Vec<Tid> = v
                .witness
                .unwrap()
                .iter()
                .map(|n| h.tid_by_name(n).unwrap())
                .collect();
            assert!(crate::serializable::verify_witness(&h, &co, c).unwrap());
        }
    }

    #[test]
    fn sat_agrees_with_direct_checkers_on_fixtures() {
        let fixtures = [
            causal_violation(),
            sessions(vec![
                vec![txn("t1", vec![r("x", 0), w("x", 1)])],
                vec![txn("t2", vec![r("x", 0), w("x", 2)])],
            ]),
            sessions(vec![
                vec![txn("t1", vec![r("x", 0), r("y", 0), w("x", 1)])],
                vec![txn("t2", vec![r("x", 0), r("y", 0), w("y", 1)])],
            ]),
        ];
        let opts = SearchOptions::default();
        for h in &fixtures {
            for c in Criterion::ALL {
                let direct = crate::check(h, c, &opts).unwrap().is_valid();
                let sat = check_via_sat(h, c, DEFAULT_CONFLICT_BUDGET).unwrap().is_valid();
                assert_eq!(direct, sat, "{c}");
            }
        }
    }

    #[test]
    fn clause_count_grows_cubically() {
        // Transitivity dominates: 2·n·(n−1)·(n−2) three-literal clauses.
        let make = |k: usize| {
            sessions(
                (0..k)
                    .map(|i| vec![txn(&format!("t{i}"), vec![w(&format!("v{i}"), 1)])])
                    .collect(),
            )
        };
        let count = |h: &History| encode(h, Criterion::Serializability).unwrap().clauses.len();
        let (c6, c12) = (count(&make(5)), count(&make(11)));
        let lower = |n: usize| 2 * n * (n - 1) * (n - 2);
        assert!(c6 >= lower(6) && c12 >= lower(12));
        // Doubling n scales clause count by roughly 8.
        let ratio = c12 as f64 / c6 as f64;
        assert!((6.0..11.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn encoding_cap_is_enforced() {
        let h = sessions((0..4).map(|i| vec![txn(&format!("t{i}"), vec![])]).collect());
        assert!(matches!(
            encode_with_cap(&h, Criterion::Serializability, 3),
            Err(Error::InstanceTooLarge(_))
        ));
    }
}
