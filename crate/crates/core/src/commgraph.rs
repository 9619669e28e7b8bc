//! Communication graphs: sessions as vertices, edges between sessions that
//! access a common variable. Consistency of a history follows from the
//! consistency of its projections onto the biconnected components, so
//! checking can be localized to components.

use crate::error::{Error, Result};
use crate::history::{History, HistoryInput, OpKind, RawOp, RawTransaction, Tid, Var, INIT};
use crate::serializable::SearchOptions;
use crate::verdict::{Criterion, Verdict};

/// Graph vertex: the init transaction counts as a distinguished session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CommVertex {
    Init,
    /// Zero-based session index.
    Session(usize),
}

impl std::fmt::Display for CommVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommVertex::Init => f.write_str("init"),
            CommVertex::Session(s) => write!(f, "S{}", s + 1),
        }
    }
}

/// Undirected graph over sessions; edges carry the shared variables.
#[derive(Debug, Clone)]
pub struct CommGraph {
    session_count: usize,
    /// Edge (a, b) with a < b in vertex numbering (0 = init, s + 1 = session s).
    edges: std::collections::BTreeMap<(usize, usize), std::collections::BTreeSet<Var>>,
}

impl CommGraph {
    fn vertex_index(v: CommVertex) -> usize {
        match v {
            CommVertex::Init => 0,
            CommVertex::Session(s) => s + 1,
        }
    }

    fn vertex_at(i: usize) -> CommVertex {
        if i == 0 {
            CommVertex::Init
        } else {
            CommVertex::Session(i - 1)
        }
    }

    pub fn session_count(&self) -> usize {
        self.session_count
    }

    pub fn edge_vars(&self, a: CommVertex, b: CommVertex) -> Option<Vec<Var>> {
        let (mut i, mut j) = (Self::vertex_index(a), Self::vertex_index(b));
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        self.edges.get(&(i, j)).map(|s| s.iter().copied().collect())
    }

    pub fn edges(&self) -> impl Iterator<Item = (CommVertex, CommVertex, &std::collections::BTreeSet<Var>)> {
        self.edges.iter().map(|(&(a, b), vars)| (Self::vertex_at(a), Self::vertex_at(b), vars))
    }
}

/// A maximal biconnected subgraph, as its vertex set. Two components share
/// at most one vertex (an articulation point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiComponent {
    pub vertices: Vec<CommVertex>,
    /// Vertices shared with other components.
    pub articulation: Vec<CommVertex>,
}

impl BiComponent {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

/// Builds the communication graph of a session-form history. Sessions are
/// connected when they access (read or write) a common variable; the init
/// vertex is connected only to sessions that actually read an initial value,
/// so untouched initializations do not merge components.
pub fn build_comm_graph(h: &History) -> Result<CommGraph> {
    let sessions = h.sessions().ok_or(Error::RequiresSessionForm)?;
    let k = sessions.len();
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); h.var_count()];
    let mut zero_read: Vec<Vec<usize>> = vec![Vec::new(); h.var_count()];
    for (s, chain) in sessions.iter().enumerate() {
        for &t in chain {
            for (i, op) in h.ops(t).iter().enumerate() {
                touching[op.var.0 as usize].push(s);
                if op.kind == OpKind::Read && h.read_src(t, i) == Some(INIT) {
                    zero_read[op.var.0 as usize].push(s);
                }
            }
        }
    }
    let mut edges: std::collections::BTreeMap<(usize, usize), std::collections::BTreeSet<Var>> =
        Default::default();
    for x in 0..h.var_count() {
        touching[x].sort_unstable();
        touching[x].dedup();
        for (i, &a) in touching[x].iter().enumerate() {
            for &b in &touching[x][i + 1..] {
                edges.entry((a + 1, b + 1)).or_default().insert(Var(x as u32));
            }
        }
        zero_read[x].sort_unstable();
        zero_read[x].dedup();
        for &s in &zero_read[x] {
            edges.entry((0, s + 1)).or_default().insert(Var(x as u32));
        }
    }
    Ok(CommGraph { session_count: k, edges })
}

/// Standard articulation-point decomposition into biconnected components,
/// ordered by smallest vertex. Sessions without any shared variable form
/// singleton components; an isolated init vertex is omitted (its projection
/// is the empty history).
pub fn biconnected_components(g: &CommGraph) -> Vec<BiComponent> {
    let n = g.session_count + 1;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in g.edges.keys() {
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }

    let mut num = vec![usize::MAX; n]; // discovery order
    let mut low = vec![0usize; n];
    let mut counter = 0usize;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut components: Vec<std::collections::BTreeSet<usize>> = Vec::new();

    // Iterative DFS: (vertex, parent, next neighbor index).
    for root in 0..n {
        if num[root] != usize::MAX || adj[root].is_empty() {
            continue;
        }
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        num[root] = counter;
        low[root] = counter;
        counter += 1;
        while let Some(&(v, parent, next)) = stack.last() {
            if next < adj[v].len() {
                stack.last_mut().unwrap().2 += 1;
                let w = adj[v][next];
                if num[w] == usize::MAX {
                    edge_stack.push((v, w));
                    num[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push((w, v, 0));
                } else if w != parent && num[w] < num[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(num[w]);
                }
            } else {
                stack.pop();
                if let Some(&(u, _, _)) = stack.last() {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= num[u] {
                        // u is an articulation point (or the root): every
                        // edge above (u, v) on the stack is one block.
                        let mut comp = std::collections::BTreeSet::new();
                        loop {
                            let (a, b) = edge_stack.pop().expect("tree edge must be stacked");
                            comp.insert(a);
                            comp.insert(b);
                            if (a, b) == (u, v) {
                                break;
                            }
                        }
                        components.push(comp);
                    }
                }
            }
        }
    }

    // Singleton components for isolated non-init sessions.
    for s in 0..g.session_count {
        if adj[s + 1].is_empty() {
            components.push([s + 1].into_iter().collect());
        }
    }

    components.sort_by_key(|c| *c.iter().next().unwrap());

    let mut seen_in: std::collections::HashMap<usize, usize> = Default::default();
    for c in &components {
        for &v in c {
            *seen_in.entry(v).or_default() += 1;
        }
    }
    components
        .into_iter()
        .map(|c| BiComponent {
            articulation: c.iter().filter(|&&v| seen_in[&v] > 1).map(|&v| CommGraph::vertex_at(v)).collect(),
            vertices: c.into_iter().map(CommGraph::vertex_at).collect(),
        })
        .collect()
}

/// Projects the history onto the sessions of one component. Init is always
/// retained; reads whose writer falls outside the projection are dropped
/// (they participate in no write-read pair of the projection).
pub fn project(h: &History, component: &BiComponent) -> History {
    let sessions = h.sessions().expect("projection requires session form");
    let keep_sessions: std::collections::BTreeSet<usize> = component
        .vertices
        .iter()
        .filter_map(|v| match v {
            CommVertex::Session(s) => Some(*s),
            CommVertex::Init => None,
        })
        .collect();
    let kept_txns: std::collections::HashSet<Tid> = keep_sessions
        .iter()
        .flat_map(|&s| sessions[s].iter().copied())
        .chain([INIT])
        .collect();
    let projected: Vec<Vec<RawTransaction>> = keep_sessions
        .iter()
        .map(|&s| {
            sessions[s]
                .iter()
                .map(|&t| {
                    let ops = h
                        .ops(t)
                        .iter()
                        .enumerate()
                        .filter(|(i, op)| match op.kind {
                            OpKind::Write => true,
                            OpKind::Read => kept_txns.contains(&h.read_src(t, *i).unwrap()),
                        })
                        .map(|(_, op)| RawOp {
                            kind: op.kind,
                            var: h.var_name(op.var).to_string(),
                            value: op.value,
                        })
                        .collect();
                    RawTransaction::new(h.name(t), ops)
                })
                .collect()
        })
        .collect();
    History::build(HistoryInput::Sessions(projected))
        .expect("projection preserves all history invariants")
}

/// Checks the criterion on every biconnected component's projection;
/// valid iff all components are valid. Violations report the offending
/// component's evidence (tids are unchanged by projection).
pub fn check_decomposed(h: &History, criterion: Criterion, opts: &SearchOptions) -> Result<Verdict> {
    let graph = build_comm_graph(h)?;
    for component in biconnected_components(&graph) {
        let sub = project(h, &component);
        let v = crate::check(&sub, criterion, opts)?;
        if !v.is_valid() {
            return Ok(v);
        }
    }
    Ok(Verdict::valid(None))
}
