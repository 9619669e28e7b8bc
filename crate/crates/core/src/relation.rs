//! Binary relations over dense transaction indices.

use crate::error::{Error, Result};

/// A binary relation over `0..n`, stored as forward adjacency lists.
///
/// Successor lists are kept sorted and deduplicated so iteration order is
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    succ: Vec<Vec<u32>>,
}

impl Relation {
    pub fn new(n: usize) -> Self {
        Relation { n, succ: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut r = Relation::new(n);
        for (a, b) in edges {
            r.add(a, b);
        }
        r.normalize();
        r
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add(&mut self, a: u32, b: u32) {
        self.succ[a as usize].push(b);
    }

    fn normalize(&mut self) {
        for s in &mut self.succ {
            s.sort_unstable();
            s.dedup();
        }
    }

    pub fn successors(&self, a: u32) -> &[u32] {
        &self.succ[a as usize]
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.succ[a as usize].binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a as u32, b)))
    }

    fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for s in &self.succ {
            for &b in s {
                deg[b as usize] += 1;
            }
        }
        deg
    }
}

/// Transitive closure, computed per source over the successor graph.
pub fn transitive_closure(r: &Relation) -> Relation {
    let n = r.len();
    let mut reach: Vec<BitRow> = vec![BitRow::new(n); n];
    // Process in reverse topological order when acyclic; fall back to a
    // fixpoint otherwise (closure is still well defined for cyclic input).
    let order = topo_order(r);
    match order {
        Some(order) => {
            for &a in order.iter().rev() {
                let mut row = BitRow::new(n);
                for &b in r.successors(a) {
                    row.set(b as usize);
                    row.union_with(&reach[b as usize]);
                }
                reach[a as usize] = row;
            }
        }
        None => {
            for a in 0..n as u32 {
                for &b in r.successors(a) {
                    reach[a as usize].set(b as usize);
                }
            }
            let mut changed = true;
            while changed {
                changed = false;
                for a in 0..n {
                    let mut row = reach[a].clone();
                    for b in reach[a].iter() {
                        row.union_with(&reach[b]);
                    }
                    if row != reach[a] {
                        reach[a] = row;
                        changed = true;
                    }
                }
            }
        }
    }
    let mut out = Relation::new(n);
    for (row, succ) in reach.iter().zip(&mut out.succ) {
        *succ = row.iter().map(|b| b as u32).collect();
    }
    out
}

/// Relational composition: `(a, c)` iff `(a, b) ∈ r1` and `(b, c) ∈ r2`.
pub fn compose(r1: &Relation, r2: &Relation) -> Relation {
    let n = r1.len().max(r2.len());
    let mut out = Relation::new(n);
    for a in 0..r1.len() as u32 {
        for &b in r1.successors(a) {
            if (b as usize) < r2.len() {
                for &c in r2.successors(b) {
                    out.add(a, c);
                }
            }
        }
    }
    out.normalize();
    out
}

fn topo_order(r: &Relation) -> Option<Vec<u32>> {
    let n = r.len();
    let mut deg = r.in_degrees();
    let mut stack: Vec<u32> = (0..n as u32).filter(|&v| deg[v as usize] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        order.push(v);
        for &b in r.successors(v) {
            deg[b as usize] -= 1;
            if deg[b as usize] == 0 {
                stack.push(b);
            }
        }
    }
    (order.len() == n).then_some(order)
}

pub fn is_acyclic(r: &Relation) -> bool {
    topo_order(r).is_some()
}

/// Topological sort with ties broken by the smallest `rank`.
///
/// The returned order is the unique lexicographically-least (by rank)
/// linearization; callers pass the ascending-tid rank to get deterministic
/// witnesses. Fails on cyclic input.
pub fn topo_sort(r: &Relation, rank: &[u32]) -> Result<Vec<u32>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let n = r.len();
    let mut deg = r.in_degrees();
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> = (0..n as u32)
        .filter(|&v| deg[v as usize] == 0)
        .map(|v| Reverse((rank[v as usize], v)))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, v))) = heap.pop() {
        order.push(v);
        for &b in r.successors(v) {
            deg[b as usize] -= 1;
            if deg[b as usize] == 0 {
                heap.push(Reverse((rank[b as usize], b)));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err(Error::CyclicRelation)
    }
}

/// Shortest cycle through the edge `(a, b)`: BFS from `b` back to `a`, with
/// neighbors visited in ascending `rank` so the result is deterministic.
/// Returns the cycle as an edge list starting with `(a, b)`, or `None` when
/// `a` is unreachable from `b`.
pub fn shortest_cycle_through(r: &Relation, edge: (u32, u32), rank: &[u32]) -> Option<Vec<(u32, u32)>> {
    use std::collections::VecDeque;

    let (a, b) = edge;
    let n = r.len();
    if a == b {
        return Some(vec![(a, b)]);
    }
    let mut prev: Vec<Option<u32>> = vec![None; n];
    let mut queue = VecDeque::new();
    prev[b as usize] = Some(b);
    queue.push_back(b);
    'bfs: while let Some(v) = queue.pop_front() {
        let mut next: Vec<u32> = r.successors(v).to_vec();
        next.sort_unstable_by_key(|&w| rank[w as usize]);
        for w in next {
            if prev[w as usize].is_none() {
                prev[w as usize] = Some(v);
                if w == a {
                    break 'bfs;
                }
                queue.push_back(w);
            }
        }
    }
    prev[a as usize]?;
    let mut path = vec![a];
    let mut cur = a;
    while cur != b {
        cur = prev[cur as usize].unwrap();
        path.push(cur);
    }
    path.reverse(); // b .. a
    let mut cycle = vec![(a, b)];
    for pair in path.windows(2) {
        cycle.push((pair[0], pair[1]));
    }
    Some(cycle)
}

/// Dense bit row used for closure and reachability computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn new(n: usize) -> Self {
        BitRow { words: vec![0; n.div_ceil(64)] }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn union_with(&mut self, other: &BitRow) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }
}

/// All-pairs reachability rows for a DAG given by generator edges.
pub(crate) fn reachability(n: usize, edges: &[(u32, u32)]) -> Vec<BitRow> {
    let r = Relation::from_edges(n, edges.iter().copied());
    let order = topo_order(&r).expect("reachability requires acyclic edges");
    let mut reach = vec![BitRow::new(n); n];
    for &a in order.iter().rev() {
        let mut row = BitRow::new(n);
        for &b in r.successors(a) {
            row.set(b as usize);
            row.union_with(&reach[b as usize]);
        }
        reach[a as usize] = row;
    }
    reach
}
