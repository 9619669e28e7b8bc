//! Prefix-consistency and snapshot-isolation checking by reduction to
//! serializability: every transaction is split into a read part and a write
//! part; snapshot isolation additionally wires auxiliary variables between
//! the parts of each pair of transactions writing a common variable, so that
//! neither can commit between the other's read and write parts.

use crate::error::Result;
use crate::history::{History, HistoryInput, OpKind, RawOp, RawTransaction, Tid, INIT};
use crate::serializable::{check_ser, verify_witness, SearchOptions};
use crate::verdict::{Criterion, Evidence, Status, Verdict};

/// Values for auxiliary conflict variables come from a reserved high range
/// so reduced histories stay legal input files alongside ordinary values.
const AUX_VALUE_BASE: u64 = 1 << 32;

/// Auxiliary conflict wiring for one pair of transactions writing a common
/// variable, in canonical (ascending tid name) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxPair {
    pub first: String,
    pub second: String,
    /// Written by first's read part and second's write part; read back by
    /// first's write part.
    pub var_forward: String,
    /// The symmetric variable for the second transaction.
    pub var_backward: String,
}

/// Correspondence between original transactions and their split parts.
/// The original init transaction is represented by the reduced history's
/// own init (its read part is empty and never materialized).
#[derive(Debug, Clone, Default)]
pub struct SplitMap {
    read_part: std::collections::BTreeMap<String, String>,
    write_part: std::collections::BTreeMap<String, String>,
    back: std::collections::HashMap<String, String>,
    pub aux: Vec<AuxPair>,
}

impl SplitMap {
    pub fn read_part(&self, original: &str) -> Option<&str> {
        self.read_part.get(original).map(String::as_str)
    }

    pub fn write_part(&self, original: &str) -> Option<&str> {
        self.write_part.get(original).map(String::as_str)
    }

    /// Maps a split tid back to its original transaction.
    pub fn original(&self, split: &str) -> Option<&str> {
        self.back.get(split).map(String::as_str)
    }

    fn insert(&mut self, original: &str, read: String, write: String) {
        self.back.insert(read.clone(), original.to_string());
        self.back.insert(write.clone(), original.to_string());
        self.read_part.insert(original.to_string(), read);
        self.write_part.insert(original.to_string(), write);
    }
}

fn read_part_name(tid: &str) -> String {
    format!("r:{tid}")
}

fn write_part_name(tid: &str) -> String {
    format!("w:{tid}")
}

struct Split {
    reads: Vec<RawOp>,
    writes: Vec<RawOp>,
}

fn split_ops(h: &History, t: Tid) -> Split {
    let mut reads = Vec::new();
    let mut writes = Vec::new();
    for op in h.ops(t) {
        let raw = RawOp {
            kind: op.kind,
            var: h.var_name(op.var).to_string(),
            value: op.value,
        };
        match op.kind {
            OpKind::Read => reads.push(raw),
            OpKind::Write => writes.push(raw),
        }
    }
    Split { reads, writes }
}

fn build_split(h: &History, conflict_aux: bool) -> (History, SplitMap) {
    let mut map = SplitMap::default();
    map.insert("init", "init".to_string(), "init".to_string());

    let mut parts: std::collections::HashMap<Tid, Split> = h
        .tids()
        .skip(1)
        .map(|t| (t, split_ops(h, t)))
        .collect();

    if conflict_aux {
        // Every unordered pair writing a common variable, enumerated once in
        // ascending tid-name order. Init conflicts are skipped: init is
        // first in every commit order, so its pair gadget is vacuous (and
        // our init cannot carry reads).
        let mut by_rank: Vec<Tid> = h.tids().skip(1).collect();
        by_rank.sort_by_key(|&t| h.rank()[t.0 as usize]);
        let mut aux_value = AUX_VALUE_BASE;
        let mut next = || {
            aux_value += 1;
            aux_value
        };
        for (i, &t1) in by_rank.iter().enumerate() {
            for &t2 in &by_rank[i + 1..] {
                let shares = h.writes_of(t1).iter().any(|&x| h.writes_var(t2, x));
                if !shares {
                    continue;
                }
                let n1 = h.name(t1);
                let n2 = h.name(t2);
                let var_fwd = format!("\u{22a5}si:{n1}:{n2}");
                let var_bwd = format!("\u{22a5}si:{n2}:{n1}");
                let v_fwd = next();
                let v_fwd_over = next();
                let v_bwd = next();
                let v_bwd_over = next();
                // R_t1 and W_t2 write var_fwd; W_t1 reads it from R_t1.
                let p1 = parts.get_mut(&t1).unwrap();
                p1.reads.push(RawOp::write(&var_fwd, v_fwd));
                p1.writes.insert(0, RawOp::read(&var_fwd, v_fwd));
                p1.writes.push(RawOp::write(&var_bwd, v_bwd_over));
                let p2 = parts.get_mut(&t2).unwrap();
                p2.reads.push(RawOp::write(&var_bwd, v_bwd));
                p2.writes.insert(0, RawOp::read(&var_bwd, v_bwd));
                p2.writes.push(RawOp::write(&var_fwd, v_fwd_over));
                map.aux.push(AuxPair {
                    first: n1.to_string(),
                    second: n2.to_string(),
                    var_forward: var_fwd,
                    var_backward: var_bwd,
                });
            }
        }
    }

    let mut make_txns = |t: Tid| -> (RawTransaction, RawTransaction) {
        let name = h.name(t);
        let rp = read_part_name(name);
        let wp = write_part_name(name);
        map.insert(name, rp.clone(), wp.clone());
        let split = parts.remove(&t).unwrap();
        (RawTransaction::new(rp, split.reads), RawTransaction::new(wp, split.writes))
    };

    let input = match h.sessions() {
        Some(sessions) => {
            let split_sessions = sessions
                .iter()
                .map(|chain| {
                    let mut out = Vec::with_capacity(chain.len() * 2);
                    for &t in chain {
                        let (r, w) = make_txns(t);
                        out.push(r);
                        out.push(w);
                    }
                    out
                })
                .collect();
            HistoryInput::Sessions(split_sessions)
        }
        None => {
            let mut transactions = Vec::with_capacity((h.txn_count() - 1) * 2);
            let mut so_edges = Vec::new();
            for t in h.tids().skip(1) {
                let (rp, wp) = make_txns(t);
                so_edges.push((rp.id.clone(), wp.id.clone()));
                transactions.push(rp);
                transactions.push(wp);
            }
            for &(a, b) in h.so_edges().unwrap() {
                let (na, nb) = (h.name(a), h.name(b));
                so_edges.push((read_part_name(na), read_part_name(nb)));
                so_edges.push((read_part_name(na), write_part_name(nb)));
                so_edges.push((write_part_name(na), read_part_name(nb)));
                so_edges.push((write_part_name(na), write_part_name(nb)));
            }
            HistoryInput::Graph { transactions, so_edges }
        }
    };

    let reduced = History::build(input)
        .expect("split history preserves all history invariants");
    (reduced, map)
}

/// Splits every transaction into its read and write parts, preserving the
/// session layout by interleaving the parts in place. The result is
/// serializable iff `h` satisfies prefix consistency.
pub fn reduce_pc_to_ser(h: &History) -> (History, SplitMap) {
    build_split(h, false)
}

/// The prefix reduction plus auxiliary conflict variables for every pair of
/// transactions writing a common variable. The result is serializable iff
/// `h` satisfies snapshot isolation.
pub fn reduce_si_to_ser(h: &History) -> (History, SplitMap) {
    build_split(h, true)
}

fn map_back(h: &History, reduced: &History, map: &SplitMap, v: Verdict, criterion: Criterion) -> Verdict {
    let explored = v.explored_states;
    let mut out = match v.status {
        Status::Valid => {
            // Project the witness onto write parts; the write part order is
            // the original commit order.
            let witness: Vec<String> = v
                .witness
                .as_ref()
                .map(|w| {
                    w.iter()
                        .filter_map(|split| {
                            let t = reduced.tid_by_name(split)?;
                            if t == INIT {
                                return Some("init".to_string());
                            }
                            split
                                .strip_prefix("w:")
                                .map(|orig| orig.to_string())
                        })
                        .collect()
                })
                .unwrap_or_default();
            debug_assert!({
                let co: Vec<Tid> =
                    witness.iter().map(|n| h.tid_by_name(n).unwrap()).collect();
                verify_witness(h, &co, criterion).unwrap()
            });
            Verdict::valid(Some(witness))
        }
        Status::Violation => {
            let evidence = v.evidence.map(|e| match e {
                Evidence::DeepestPrefix(tids) => {
                    let mut seen = std::collections::HashSet::new();
                    let mapped = tids
                        .iter()
                        .filter_map(|split| map.original(split))
                        .filter(|orig| seen.insert(orig.to_string()))
                        .map(str::to_string)
                        .collect();
                    Evidence::DeepestPrefix(mapped)
                }
                other => other,
            });
            Verdict::violation(evidence)
        }
    };
    out.explored_states = explored;
    out
}

/// Prefix consistency via the split reduction and the serializability
/// search; witnesses and diagnostics are mapped back to original tids.
pub fn check_pc(h: &History, opts: &SearchOptions) -> Result<Verdict> {
    let (reduced, map) = reduce_pc_to_ser(h);
    let v = check_ser(&reduced, opts)?;
    Ok(map_back(h, &reduced, &map, v, Criterion::Prefix))
}

/// Snapshot isolation via the conflict-augmented split reduction.
pub fn check_si(h: &History, opts: &SearchOptions) -> Result<Verdict> {
    let (reduced, map) = reduce_si_to_ser(h);
    let v = check_ser(&reduced, opts)?;
    Ok(map_back(h, &reduced, &map, v, Criterion::SnapshotIsolation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::history::Width;
    use crate::oracle::brute_check;

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

    fn long_fork() -> History {
        sessions(vec![
            vec![txn("t1", vec![r("x", 0), w("x", 1)])],
            vec![txn("t2", vec![r("y", 0), w("y", 1)])],
            vec![txn("t3", vec![r("x", 1), r("y", 0)])],
            vec![txn("t4", vec![r("x", 0), r("y", 1)])],
        ])
    }

    fn lost_update() -> History {
        sessions(vec![
            vec![txn("t1", vec![r("x", 0), w("x", 1)])],
            vec![txn("t2", vec![r("x", 0), w("x", 2)])],
        ])
    }

    fn write_skew() -> History {
        sessions(vec![
            vec![txn("t1", vec![r("x", 0), r("y", 0), w("x", 1)])],
            vec![txn("t2", vec![r("x", 0), r("y", 0), w("y", 1)])],
        ])
    }

    fn fork_violation() -> History {
        sessions(vec![
            vec![txn("t1", vec![w("x", 1), w("y", 1)])],
            vec![txn("t2", vec![r("x", 1), w("x", 2)])],
            vec![txn("t3", vec![r("y", 1), w("y", 2)])],
            vec![txn("t4", vec![r("x", 2), r("y", 1)])],
            vec![txn("t5", vec![r("y", 2), r("x", 1)])],
        ])
    }

    fn conflict_violation() -> History {
        sessions(vec![
            vec![txn("t1", vec![w("x", 1)])],
            vec![txn("t2", vec![r("x", 1), w("x", 2)])],
            vec![txn("t3", vec![r("x", 1), w("x", 3)])],
        ])
    }

    #[test]
    fn long_fork_splits_into_read_and_write_parts() {
        let h = long_fork();
        let (red, map) = reduce_pc_to_ser(&h);
        // 4 read parts + 4 write parts + init.
        assert_eq!(red.txn_count(), 9);
        let read_parts: Vec<_> =
            red.tids().skip(1).filter(|&t| red.name(t).starts_with("r:")).collect();
        let write_parts: Vec<_> =
            red.tids().skip(1).filter(|&t| red.name(t).starts_with("w:")).collect();
        assert_eq!(read_parts.len(), 4);
        assert_eq!(write_parts.len(), 4);
        // Read-only transactions keep an empty write part.
        let empty: Vec<&str> = write_parts
            .iter()
            .filter(|&&t| red.ops(t).is_empty())
            .map(|&t| red.name(t))
            .collect();
        assert_eq!(empty, vec!["w:t3", "w:t4"]);
        assert_eq!(map.write_part("t3"), Some("w:t3"));
        assert_eq!(map.original("r:t1"), Some("t1"));
        // The reduced history is a legal input file.
        let reparsed = crate::history::parse_history(&crate::serialize_history(&red)).unwrap();
        assert_eq!(reparsed, red);
    }

    #[test]
    fn lost_update_keeps_session_shape() {
        let (red, _) = reduce_pc_to_ser(&lost_update());
        assert_eq!(red.txn_count(), 5);
        let sess = red.sessions().unwrap();
        assert_eq!(sess.len(), 2);
        assert_eq!(
            sess[0].iter().map(|&t| red.name(t)).collect::<Vec<_>>(),
            vec!["r:t1", "w:t1"]
        );
    }

    #[test]
    fn init_only_history_reduces_to_init_only() {
        let h = History::build(HistoryInput::Sessions(vec![])).unwrap();
        let (red, map) = reduce_pc_to_ser(&h);
        assert_eq!(red.txn_count(), 1);
        // Init's write part is the reduced history's init; the read part is
        // empty and not materialized.
        assert_eq!(map.write_part("init"), Some("init"));
    }

    #[test]
    fn widths_are_preserved() {
        for h in [long_fork(), lost_update(), write_skew(), fork_violation()] {
            let (pc, _) = reduce_pc_to_ser(&h);
            let (si, _) = reduce_si_to_ser(&h);
            assert_eq!(h.width(), pc.width());
            assert_eq!(h.width(), si.width());
        }
        // General form: diamond over four transactions.
        let g = History::build(HistoryInput::Graph {
            transactions: vec![
                txn("a", vec![w("x", 1)]),
                txn("b", vec![r("x", 1), w("y", 1)]),
                txn("c", vec![r("x", 1), w("y", 2)]),
                txn("d", vec![r("y", 1)]),
            ],
            so_edges: vec![
                ("a".into(), "b".into()),
                ("a".into(), "c".into()),
                ("b".into(), "d".into()),
                ("c".into(), "d".into()),
            ],
        })
        .unwrap();
        assert_eq!(g.width(), Width::Exact(2));
        let (pc, _) = reduce_pc_to_ser(&g);
        let (si, _) = reduce_si_to_ser(&g);
        assert_eq!(pc.width(), Width::Exact(2));
        assert_eq!(si.width(), Width::Exact(2));
    }

    #[test]
    fn si_reduction_wires_conflict_variables() {
        let h = lost_update();
        let (red, map) = reduce_si_to_ser(&h);
        assert_eq!(map.aux.len(), 1);
        let aux = &map.aux[0];
        assert_eq!((aux.first.as_str(), aux.second.as_str()), ("t1", "t2"));
        // W_t1 reads the forward variable written by R_t1; W_t2 overwrites it.
        let fwd = red.var_by_name(&aux.var_forward).unwrap();
        let r1 = red.tid_by_name("r:t1").unwrap();
        let w1 = red.tid_by_name("w:t1").unwrap();
        let w2 = red.tid_by_name("w:t2").unwrap();
        assert!(red.writes_var(r1, fwd));
        assert!(red.writes_var(w2, fwd));
        assert_eq!(red.wro_pairs(fwd), &[(r1, w1)]);
        let bwd = red.var_by_name(&aux.var_backward).unwrap();
        let r2 = red.tid_by_name("r:t2").unwrap();
        assert!(red.writes_var(r2, bwd));
        assert!(red.writes_var(w1, bwd));
        assert_eq!(red.wro_pairs(bwd), &[(r2, red.tid_by_name("w:t2").unwrap())]);
    }

    #[test]
    fn si_reduction_without_conflicts_equals_pc_reduction() {
        // Write skew: no common written variable, so no aux wiring.
        let h = write_skew();
        let (pc, _) = reduce_pc_to_ser(&h);
        let (si, map) = reduce_si_to_ser(&h);
        assert!(map.aux.is_empty());
        assert_eq!(pc, si);
    }

    #[test]
    fn pc_verdicts() {
        let opts = SearchOptions::default();
        assert!(!check_pc(&long_fork(), &opts).unwrap().is_valid());
        assert!(!check_pc(&fork_violation(), &opts).unwrap().is_valid());
        let v = check_pc(&lost_update(), &opts).unwrap();
        assert!(v.is_valid());
        // Witness maps back onto original tids.
        let w = v.witness.unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w[0], "init");
        assert!(w.contains(&"t1".to_string()) && w.contains(&"t2".to_string()));
    }

    #[test]
    fn si_verdicts() {
        let opts = SearchOptions::default();
        assert!(!check_si(&lost_update(), &opts).unwrap().is_valid());
        assert!(check_si(&write_skew(), &opts).unwrap().is_valid());
        assert!(!check_si(&conflict_violation(), &opts).unwrap().is_valid());
        // Diagnostics come back in original tid space.
        let v = check_si(&lost_update(), &opts).unwrap();
        if let Some(Evidence::DeepestPrefix(tids)) = &v.evidence {
            for t in tids {
                assert!(h_names().contains(&t.as_str()), "unexpected tid {t}");
            }
        }
        fn h_names() -> [&'static str; 3] {
            ["init", "t1", "t2"]
        }
    }

    #[test]
    fn reductions_match_oracle_iff() {
        let opts = SearchOptions::default();
        for h in [long_fork(), lost_update(), write_skew(), conflict_violation()] {
            let (pc_red, _) = reduce_pc_to_ser(&h);
            let (si_red, _) = reduce_si_to_ser(&h);
            assert_eq!(
                brute_check(&h, Criterion::Prefix).unwrap(),
                brute_check_limit24(&pc_red),
                "pc iff"
            );
            assert_eq!(
                brute_check(&h, Criterion::SnapshotIsolation).unwrap(),
                brute_check_limit24(&si_red),
                "si iff"
            );
            // And the production checkers agree with the oracle.
            assert_eq!(
                check_pc(&h, &opts).unwrap().is_valid(),
                brute_check(&h, Criterion::Prefix).unwrap()
            );
            assert_eq!(
                check_si(&h, &opts).unwrap().is_valid(),
                brute_check(&h, Criterion::SnapshotIsolation).unwrap()
            );
        }
        fn brute_check_limit24(h: &History) -> bool {
            crate::oracle::brute_check_with_limit(h, Criterion::Serializability, 24).unwrap()
        }
    }
}
