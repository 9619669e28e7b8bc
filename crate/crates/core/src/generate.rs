//! Test-history producers: random client workloads, a catalogue of canned
//! anomaly histories, and the CNF-to-history gadget whose consistency under
//! PC/SI/SER coincides with satisfiability of the formula.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::history::{History, HistoryInput, RawOp, RawTransaction};

/// Read redirection mode for [`gen_random`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Transactions execute in a fixed serial order; every read returns the
    /// latest committed value, so the history is serializable by
    /// construction.
    Serial,
    /// Serial execution, then the given number of reads are redirected to
    /// uniformly-chosen older versions of their variable.
    StaleRead(u32),
}

/// Workload shape for the random generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub sessions: u32,
    pub txns_per_session: u32,
    pub ops_per_txn: u32,
    pub vars: u32,
    pub seed: u64,
    /// Restrict each session's writes to its own variable partition.
    pub disjoint_writes: bool,
    pub mode: GenMode,
}

impl GenParams {
    pub fn new(sessions: u32, txns_per_session: u32, ops_per_txn: u32, vars: u32, seed: u64) -> Self {
        GenParams {
            sessions: sessions.max(1),
            txns_per_session: txns_per_session.max(1),
            ops_per_txn: ops_per_txn.max(1),
            vars: vars.max(1),
            seed,
            disjoint_writes: false,
            mode: GenMode::Serial,
        }
    }
}

struct PendingRead {
    session: usize,
    txn: usize,
    op: usize,
    var: usize,
    /// Number of versions (including the initial one) available when the
    /// read executed; the current version is `version_count - 1`.
    version_count: usize,
}

/// Deterministic under `(params, seed)`: the same parameters serialize to
/// identical bytes regardless of the host.
pub fn gen_random(p: &GenParams) -> History {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let sessions = p.sessions as usize;
    let vars = p.vars as usize;
    let var_name = |v: usize| format!("x{v}");

    // Per-variable version lists; index 0 is the initial value 0.
    let mut versions: Vec<Vec<u64>> = vec![vec![0]; vars];
    let mut next_value: Vec<u64> = vec![1; vars];
    let mut ops: Vec<Vec<Vec<RawOp>>> =
        vec![vec![Vec::new(); p.txns_per_session as usize]; sessions];
    let mut reads: Vec<PendingRead> = Vec::new();

    // Round-robin serial order across sessions.
    for txn_idx in 0..p.txns_per_session as usize {
        for session in 0..sessions {
            let mut local: std::collections::HashMap<usize, u64> = Default::default();
            for op_idx in 0..p.ops_per_txn as usize {
                let is_write = rng.gen_bool(0.5);
                if is_write {
                    let var = if p.disjoint_writes {
                        // Variables v with v % sessions == session.
                        let count =
                            if session < vars { (vars - session).div_ceil(sessions) } else { 0 };
                        if count == 0 {
                            // No writable variable: fall through to a read.
                            let var = rng.gen_range(0..vars);
                            push_read(
                                &mut ops, &mut reads, &versions, &local, session, txn_idx, op_idx,
                                var, &var_name,
                            );
                            continue;
                        }
                        session + rng.gen_range(0..count) * sessions
                    } else {
                        rng.gen_range(0..vars)
                    };
                    let value = next_value[var];
                    next_value[var] += 1;
                    local.insert(var, value);
                    ops[session][txn_idx].push(RawOp::write(var_name(var), value));
                } else {
                    let var = rng.gen_range(0..vars);
                    push_read(
                        &mut ops, &mut reads, &versions, &local, session, txn_idx, op_idx, var,
                        &var_name,
                    );
                }
            }
            // Commit: the last write per variable becomes visible.
            let mut committed: Vec<(usize, u64)> = local.into_iter().collect();
            committed.sort_unstable();
            for (var, value) in committed {
                versions[var].push(value);
            }
        }
    }

    if let GenMode::StaleRead(k) = p.mode {
        // Redirect up to k reads with at least two available versions.
        let mut eligible: Vec<usize> = reads
            .iter()
            .enumerate()
            .filter(|(_, r)| r.version_count >= 2)
            .map(|(i, _)| i)
            .collect();
        for _ in 0..k {
            if eligible.is_empty() {
                break;
            }
            let pick = rng.gen_range(0..eligible.len());
            let idx = eligible.swap_remove(pick);
            let read = &reads[idx];
            let older = rng.gen_range(0..read.version_count - 1);
            let value = versions[read.var][older];
            ops[read.session][read.txn][read.op] =
                RawOp::read(var_name(read.var), value);
        }
    }

    let input = HistoryInput::Sessions(
        ops.into_iter()
            .enumerate()
            .map(|(s, txns)| {
                txns.into_iter()
                    .enumerate()
                    .map(|(i, ops)| RawTransaction::new(format!("s{}t{}", s + 1, i + 1), ops))
                    .collect()
            })
            .collect(),
    );
    History::build(input).expect("generated histories satisfy all invariants")
}

#[allow(clippy::too_many_arguments)]
fn push_read(
    ops: &mut [Vec<Vec<RawOp>>],
    reads: &mut Vec<PendingRead>,
    versions: &[Vec<u64>],
    local: &std::collections::HashMap<usize, u64>,
    session: usize,
    txn: usize,
    op: usize,
    var: usize,
    var_name: &impl Fn(usize) -> String,
) {
    let value = match local.get(&var) {
        Some(&v) => v, // internal read of the local write
        None => *versions[var].last().unwrap(),
    };
    if !local.contains_key(&var) {
        reads.push(PendingRead {
            session,
            txn,
            op: ops[session][txn].len(),
            var,
            version_count: versions[var].len(),
        });
        let _ = op;
    }
    ops[session][txn].push(RawOp::read(var_name(var), value));
}

fn r(var: &str, value: u64) -> RawOp {
    RawOp::read(var, value)
}

fn w(var: &str, value: u64) -> RawOp {
    RawOp::write(var, value)
}

fn t(id: &str, ops: Vec<RawOp>) -> RawTransaction {
    RawTransaction::new(id, ops)
}

fn single(tx: RawTransaction) -> Vec<RawTransaction> {
    vec![tx]
}

pub const CANNED_NAMES: [&str; 21] = [
    "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig5f", "fig5g", "fig5h", "fig6a", "fig6b",
    "fig6c", "fig7a", "fig8a", "fig8c", "fig9a", "fig9c", "fig10a", "long-fork", "lost-update",
    "write-skew", "comm-5sessions",
];

/// The catalogue of canned anomaly histories.
pub fn canned(name: &str) -> Result<History> {
    let input = match name {
        // Non-monotonic reads: y=2 observed, then the x its writer session
        // had already overwritten.
        "fig5a" => HistoryInput::Sessions(vec![
            vec![t("t1", vec![w("x", 1)]), t("t2", vec![w("x", 2), w("y", 2)])],
            single(t("t3", vec![r("y", 2), r("x", 1)])),
        ]),
        // Unrepeatable read of two x versions; monotonic, so RC holds.
        "fig5b" => HistoryInput::Sessions(vec![
            vec![t("t1", vec![w("x", 1)]), t("t2", vec![w("x", 2)])],
            single(t("t3", vec![r("x", 1), r("x", 2)])),
        ]),
        // Session overwrites y, successor still reads the old y.
        "fig5c" => HistoryInput::Sessions(vec![
            single(t("t1", vec![w("x", 1), w("y", 1)])),
            vec![
                t("t2", vec![r("x", 1), w("y", 2)]),
                t("t3", vec![r("x", 1), r("y", 1)]),
            ],
        ]),
        // Fractured read across two double-writers.
        "fig5d" => HistoryInput::Sessions(vec![
            single(t("t1", vec![w("x", 1), w("y", 1)])),
            single(t("t2", vec![w("x", 2), w("y", 2)])),
            single(t("t3", vec![r("x", 1), r("y", 2)])),
        ]),
        // Causal chain: t4 saw x=2 before writing the y that t3 reads.
        "fig5e" => HistoryInput::Sessions(vec![
            single(t("t1", vec![w("x", 1)])),
            single(t("t2", vec![r("x", 1), w("x", 2)])),
            single(t("t3", vec![r("x", 1), r("y", 1)])),
            single(t("t4", vec![r("x", 2), w("y", 1)])),
        ]),
        // Long fork over dependent writers.
        "fig5f" => HistoryInput::Sessions(vec![
            single(t("t1", vec![w("x", 1), w("y", 1)])),
            single(t("t2", vec![r("x", 1), w("x", 2)])),
            single(t("t3", vec![r("y", 1), w("y", 2)])),
            single(t("t4", vec![r("x", 2), r("y", 1)])),
            single(t("t5", vec![r("y", 2), r("x", 1)])),
        ]),
        // Two overwrites of the same stale x.
        "fig5g" => HistoryInput::Sessions(vec![
            single(t("t1", vec![w("x", 1)])),
            single(t("t2", vec![r("x", 1), w("x", 2)])),
            single(t("t3", vec![r("x", 1), w("x", 3)])),
        ]),
        // Write skew over a shared snapshot.
        "fig5h" => HistoryInput::Sessions(vec![
            single(t("t1", vec![w("x", 1), w("y", 1)])),
            single(t("t2", vec![r("x", 1), r("y", 1), w("x", 2)])),
            single(t("t3", vec![r("x", 1), r("y", 1), w("y", 2)])),
        ]),
        // Fractured read plus an unrelated z writer.
        "fig6a" => HistoryInput::Sessions(vec![
            single(t("t1", vec![w("x", 1), w("y", 1)])),
            single(t("t2", vec![w("x", 2), w("y", 2)])),
            single(t("t3", vec![w("z", 2)])),
            single(t("t4", vec![r("x", 1), r("y", 2), r("z", 2)])),
        ]),
        // Stale x=1 read after the session already observed x=2 indirectly;
        // read-atomic because the observation is not direct.
        "fig6b" => HistoryInput::Sessions(vec![
            vec![t("s11", vec![w("x", 1)]), t("s12", vec![w("x", 2)])],
            vec![
                t("t1", vec![r("x", 2), w("y", 1)]),
                t("t2", vec![r("x", 1), r("y", 1)]),
            ],
        ]),
        // Same accesses with independent readers: a causality violation.
        "fig6c" => HistoryInput::Sessions(vec![
            vec![t("s11", vec![w("x", 1)]), t("s12", vec![w("x", 2)])],
            single(t("t1", vec![r("x", 2), w("y", 1)])),
            single(t("t2", vec![r("x", 1), r("y", 1)])),
        ]),
        // Two sessions racing on x after reading its initial value.
        "fig7a" => HistoryInput::Sessions(vec![
            vec![t("t1", vec![r("x", 0)]), t("t3", vec![w("x", 1)])],
            vec![t("t2", vec![r("x", 0)]), t("t4", vec![w("x", 2)])],
        ]),
        // Long fork.
        "fig8a" | "long-fork" => HistoryInput::Sessions(vec![
            single(t("t1", vec![r("x", 0), w("x", 1)])),
            single(t("t2", vec![r("y", 0), w("y", 1)])),
            single(t("t3", vec![r("x", 1), r("y", 0)])),
            single(t("t4", vec![r("x", 0), r("y", 1)])),
        ]),
        // Lost update.
        "fig8c" | "fig9a" | "lost-update" => HistoryInput::Sessions(vec![
            single(t("t1", vec![r("x", 0), w("x", 1)])),
            single(t("t2", vec![r("x", 0), w("x", 2)])),
        ]),
        // Write skew.
        "fig9c" | "write-skew" => HistoryInput::Sessions(vec![
            single(t("t1", vec![r("x", 0), r("y", 0), w("x", 1)])),
            single(t("t2", vec![r("x", 0), r("y", 0), w("y", 1)])),
        ]),
        // Five sessions with sparse sharing; three biconnected components.
        "fig10a" | "comm-5sessions" => HistoryInput::Sessions(vec![
            vec![t("t11", vec![w("x", 1)]), t("t12", vec![r("x", 1)])],
            vec![t("t21", vec![w("t", 1)]), t("t22", vec![w("y", 1), r("x", 1)])],
            vec![t("t31", vec![r("y", 1)]), t("t32", vec![r("z", 1)])],
            vec![t("t41", vec![w("z", 1), r("w", 1)]), t("t42", vec![r("t", 1)])],
            vec![t("t51", vec![w("w", 1)])],
        ]),
        other => return Err(Error::UnknownName(other.to_string())),
    };
    Ok(History::build(input).expect("canned histories are valid"))
}

/// A CNF formula as input to the hardness gadget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInput {
    num_vars: u32,
    clauses: Vec<Vec<i32>>,
}

impl CnfInput {
    /// Literals are nonzero signed variable indices in `1..=num_vars`;
    /// clauses must be non-empty.
    pub fn new(num_vars: u32, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for c in &clauses {
            if c.is_empty() {
                return Err(Error::MalformedInput("empty clause".into()));
            }
            for &l in c {
                if l == 0 || l.unsigned_abs() > num_vars {
                    return Err(Error::MalformedInput(format!("literal {l} out of range")));
                }
            }
        }
        Ok(CnfInput { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Standard DIMACS CNF.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut num_vars = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    ["cnf", v, _c] => {
                        num_vars = Some(v.parse::<u32>().map_err(|e| {
                            Error::MalformedInput(format!("bad variable count: {e}"))
                        })?);
                    }
                    _ => return Err(Error::MalformedInput("bad DIMACS header".into())),
                }
                continue;
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|e| Error::MalformedInput(format!("bad literal {tok:?}: {e}")))?;
                if lit == 0 {
                    if !current.is_empty() {
                        clauses.push(std::mem::take(&mut current));
                    }
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let num_vars = num_vars
            .ok_or_else(|| Error::MalformedInput("missing DIMACS p-line".into()))?;
        CnfInput::new(num_vars, clauses)
    }

    /// Exhaustive satisfiability over all assignments (tiny formulas only).
    pub fn brute_force_satisfiable(&self) -> bool {
        let n = self.num_vars as usize;
        assert!(n <= 20, "brute-force SAT is for tiny formulas");
        (0..1u32 << n).any(|bits| {
            self.clauses.iter().all(|c| {
                c.iter().any(|&l| {
                    let val = bits >> (l.unsigned_abs() - 1) & 1 == 1;
                    val == (l > 0)
                })
            })
        })
    }
}

/// Builds the hardness gadget: a general-form history that satisfies PC, SI,
/// or SER exactly when the formula is satisfiable.
///
/// Per CNF variable k there is a transaction pair `a_k`/`b_k` whose commit
/// polarity encodes the assignment. Per literal j of clause i there are
/// `y_i_j`/`z_i_j` (two writers of a private variable) and a reader `w_i_j`,
/// wired through session order to `a_k`/`b_k` so the literal's polarity must
/// follow the variable's; the z→y session ring across a clause turns an
/// all-false clause into a commit-order cycle.
pub fn gen_from_cnf(cnf: &CnfInput) -> History {
    let mut transactions = Vec::new();
    let mut so_edges: Vec<(String, String)> = Vec::new();

    for k in 1..=cnf.num_vars {
        transactions.push(t(&format!("a{k}"), vec![]));
        transactions.push(t(&format!("b{k}"), vec![]));
    }

    for (ci, clause) in cnf.clauses.iter().enumerate() {
        let i = ci + 1;
        let m = clause.len();
        for (lj, &lit) in clause.iter().enumerate() {
            let j = lj + 1;
            let var = format!("v{i}_{j}");
            let y = format!("y{i}_{j}");
            let z = format!("z{i}_{j}");
            let wt = format!("w{i}_{j}");
            transactions.push(t(&y, vec![w(&var, 1)]));
            transactions.push(t(&z, vec![w(&var, 2)]));
            transactions.push(t(&wt, vec![r(&var, 2)]));
            // Clause ring: z of this literal precedes y of the next.
            let jn = (lj + 1) % m + 1;
            so_edges.push((z.clone(), format!("y{i}_{jn}")));
            let k = lit.unsigned_abs();
            if lit > 0 {
                so_edges.push((y.clone(), format!("a{k}")));
                so_edges.push((format!("b{k}"), wt.clone()));
            } else {
                so_edges.push((y.clone(), format!("b{k}")));
                so_edges.push((format!("a{k}"), wt.clone()));
            }
        }
    }

    History::build(HistoryInput::Graph { transactions, so_edges })
        .expect("gadget histories are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_check, brute_check_with_limit};
    use crate::serializable::{check_ser, SearchOptions};
    use crate::verdict::Criterion;

    #[test]
    fn serial_mode_is_serializable() {
        for seed in 0..100 {
            let p = GenParams::new(3, 3, 4, 4, seed);
            let h = gen_random(&p);
            assert!(check_ser(&h, &SearchOptions::default()).unwrap().is_valid(), "seed {seed}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let mut p = GenParams::new(3, 4, 5, 6, 42);
        p.mode = GenMode::StaleRead(3);
        let a = crate::serialize_history(&gen_random(&p));
        let b = crate::serialize_history(&gen_random(&p));
        assert_eq!(a, b);
        p.seed = 43;
        let c = crate::serialize_history(&gen_random(&p));
        assert_ne!(a, c);
    }

    #[test]
    fn generated_histories_round_trip() {
        for seed in 0..20 {
            let mut p = GenParams::new(3, 3, 4, 4, seed);
            p.mode = GenMode::StaleRead(2);
            let h = gen_random(&p);
            let h2 = crate::parse_history(&crate::serialize_history(&h)).unwrap();
            assert_eq!(h, h2);
        }
    }

    #[test]
    fn disjoint_writes_partition_holds() {
        let mut p = GenParams::new(3, 4, 6, 7, 7);
        p.disjoint_writes = true;
        let h = gen_random(&p);
        let sessions = h.sessions().unwrap();
        let mut write_sets: Vec<std::collections::BTreeSet<&str>> = Vec::new();
        for chain in sessions {
            let mut set = std::collections::BTreeSet::new();
            for &txn in chain {
                for &x in h.writes_of(txn) {
                    set.insert(h.var_name(x));
                }
            }
            write_sets.push(set);
        }
        for i in 0..write_sets.len() {
            for j in i + 1..write_sets.len() {
                assert!(write_sets[i].is_disjoint(&write_sets[j]));
            }
        }
    }

    #[test]
    fn stale_reads_inject_violations() {
        let mut violating = 0;
        let total = 30;
        for seed in 0..total {
            let mut p = GenParams::new(3, 2, 4, 2, seed);
            p.mode = GenMode::StaleRead(3);
            let h = gen_random(&p);
            // Verdict vector stays monotone along the entailment chain.
            let mut verdicts = Vec::new();
            for c in [
                Criterion::Serializability,
                Criterion::SnapshotIsolation,
                Criterion::Prefix,
                Criterion::Causal,
                Criterion::ReadAtomic,
                Criterion::ReadCommitted,
            ] {
                verdicts.push(crate::check(&h, c, &SearchOptions::default()).unwrap().is_valid());
            }
            for pair in verdicts.windows(2) {
                assert!(!pair[0] || pair[1], "non-monotone verdicts {verdicts:?}");
            }
            if verdicts.iter().any(|&v| !v) {
                violating += 1;
            }
        }
        assert!(violating * 2 > total, "only {violating}/{total} seeds injected violations");
    }

    #[test]
    fn canned_catalogue_is_complete() {
        for name in CANNED_NAMES {
            assert!(canned(name).is_ok(), "{name}");
        }
        assert!(matches!(canned("no-such"), Err(Error::UnknownName(_))));
        // Aliases point at the same histories.
        assert_eq!(canned("long-fork").unwrap(), canned("fig8a").unwrap());
        assert_eq!(canned("write-skew").unwrap(), canned("fig9c").unwrap());
        assert_eq!(canned("comm-5sessions").unwrap(), canned("fig10a").unwrap());
    }

    #[test]
    fn gadget_counts_transactions() {
        // One variable, one single-literal clause: init + a1 + b1 + w/y/z.
        let cnf = CnfInput::new(1, vec![vec![1]]).unwrap();
        let h = gen_from_cnf(&cnf);
        assert_eq!(h.txn_count(), 6);
        // In general 1 + 2n + 3·Σ m_i.
        let cnf = CnfInput::new(3, vec![vec![1, -2], vec![2, 3], vec![-1]]).unwrap();
        let h = gen_from_cnf(&cnf);
        assert_eq!(h.txn_count(), 1 + 2 * 3 + 3 * 5);
    }

    #[test]
    fn satisfiable_singleton_formula_is_serializable() {
        let cnf = CnfInput::new(1, vec![vec![1]]).unwrap();
        let h = gen_from_cnf(&cnf);
        assert!(brute_check(&h, Criterion::Serializability).unwrap());
    }

    #[test]
    fn contradictory_formula_violates_prefix_consistency() {
        let cnf = CnfInput::new(1, vec![vec![1], vec![-1]]).unwrap();
        let h = gen_from_cnf(&cnf);
        assert!(!brute_check(&h, Criterion::Prefix).unwrap());
        assert!(!brute_check_with_limit(&h, Criterion::Serializability, 20).unwrap());
    }

    #[test]
    fn dimacs_parsing() {
        let cnf = CnfInput::parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n2 3 0\n").unwrap();
        assert_eq!(cnf.num_vars(), 3);
        assert_eq!(cnf.clauses(), &[vec![1, -2], vec![2, 3]]);
        assert!(CnfInput::parse_dimacs("1 2 0").is_err()); // missing header
        assert!(CnfInput::parse_dimacs("p cnf 1 1\n2 0").is_err()); // out of range
    }

    #[test]
    fn brute_force_sat() {
        assert!(CnfInput::new(2, vec![vec![1, 2], vec![-1]]).unwrap().brute_force_satisfiable());
        assert!(!CnfInput::new(1, vec![vec![1], vec![-1]]).unwrap().brute_force_satisfiable());
    }
}
