//! Exact ν(H), l(H) and longest tight path.
//!
//! All three searches are depth-first branch-and-bound over vertex bitmasks.
//! The path searches memoize `(used vertices, open tail)` states together with
//! the best edge count seen on arrival, which keeps them polynomial in the
//! number of states for the desk-scale sizes used here.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::hypergraph::{BitIter, Hypergraph};

/// Membership test for vertex-mask edges.
pub(crate) trait EdgeLookup {
    fn has(&self, mask: u64) -> bool;
}

/// One bit per vertex subset; for `n <= DENSE_MAX_N`.
#[derive(Clone, Debug)]
pub(crate) struct DenseEdges {
    words: Vec<u64>,
}

pub(crate) const DENSE_MAX_N: usize = 20;

impl DenseEdges {
    pub(crate) fn new(n: usize) -> Self {
        debug_assert!(n <= DENSE_MAX_N);
        DenseEdges { words: vec![0; (1usize << n).div_ceil(64)] }
    }

    #[inline]
    pub(crate) fn set(&mut self, mask: u64) {
        self.words[(mask >> 6) as usize] |= 1 << (mask & 63);
    }

    #[inline]
    pub(crate) fn clear(&mut self, mask: u64) {
        self.words[(mask >> 6) as usize] &= !(1 << (mask & 63));
    }
}

impl EdgeLookup for DenseEdges {
    #[inline]
    fn has(&self, mask: u64) -> bool {
        self.words
            .get((mask >> 6) as usize)
            .is_some_and(|w| w & (1 << (mask & 63)) != 0)
    }
}

impl EdgeLookup for HashSet<u64> {
    fn has(&self, mask: u64) -> bool {
        self.contains(&mask)
    }
}

pub(crate) enum EdgeTable {
    Dense(DenseEdges),
    Sparse(HashSet<u64>),
}

impl EdgeTable {
    pub(crate) fn for_graph(h: &Hypergraph) -> Self {
        if h.n() <= DENSE_MAX_N {
            let mut t = DenseEdges::new(h.n());
            for e in h.edges() {
                t.set(e.bits());
            }
            EdgeTable::Dense(t)
        } else {
            EdgeTable::Sparse(h.edges().iter().map(|e| e.bits()).collect())
        }
    }
}

impl EdgeLookup for EdgeTable {
    #[inline]
    fn has(&self, mask: u64) -> bool {
        match self {
            EdgeTable::Dense(d) => d.has(mask),
            EdgeTable::Sparse(s) => s.has(mask),
        }
    }
}

/// A tight path: every `r` consecutive vertices form an edge.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TightPath {
    pub vertices: Vec<usize>,
}

impl TightPath {
    pub fn new(vertices: Vec<usize>) -> Self {
        TightPath { vertices }
    }

    /// Number of windows, `len - r + 1` (0 when shorter than `r`).
    pub fn edge_count(&self, r: usize) -> usize {
        (self.vertices.len() + 1).saturating_sub(r)
    }

    pub fn vertex_mask(&self) -> u64 {
        self.vertices.iter().fold(0, |acc, &v| acc | (1u64 << v))
    }

    /// Orientation with the lexicographically smaller vertex sequence.
    pub fn normalized(mut self) -> Self {
        let mut rev = self.vertices.clone();
        rev.reverse();
        if rev < self.vertices {
            self.vertices = rev;
        }
        self
    }

    /// Distinct vertices, at least `r` of them, every window an edge of `host`.
    pub fn is_valid_for(&self, host: &Hypergraph) -> bool {
        let r = host.r();
        let distinct = self.vertices.iter().collect::<HashSet<_>>().len() == self.vertices.len();
        distinct
            && self.vertices.len() >= r
            && self.vertices.iter().all(|&v| v < host.n())
            && self.vertices.windows(r).all(|w| host.contains_vertices(w))
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TightLinearForest {
    pub n: usize,
    pub r: usize,
    pub paths: Vec<TightPath>,
}

impl TightLinearForest {
    pub fn edge_count(&self) -> usize {
        self.paths.iter().map(|p| p.edge_count(self.r)).sum()
    }

    pub fn is_valid_for(&self, host: &Hypergraph) -> bool {
        let mut used = 0u64;
        for p in &self.paths {
            let m = p.vertex_mask();
            if used & m != 0 || !p.is_valid_for(host) {
                return false;
            }
            used |= m;
        }
        self.n == host.n() && self.r == host.r()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Matching {
    pub edges: Vec<Vec<usize>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn is_valid_for(&self, host: &Hypergraph) -> bool {
        let mut used = 0u64;
        for e in &self.edges {
            let m = e.iter().fold(0u64, |acc, &v| acc | (1 << v));
            if used & m != 0 || !host.contains_vertices(e) {
                return false;
            }
            used |= m;
        }
        true
    }
}

/// ν(H) with a maximum matching.
pub fn nu(h: &Hypergraph) -> (usize, Matching) {
    let edges = h.edge_bits();
    let (value, chosen) = matching_search(h.n(), h.r(), &edges, usize::MAX);
    let edges = chosen.into_iter().map(|e| BitIter(e).collect()).collect();
    (value, Matching { edges })
}

/// True iff ν(H) ≥ k.
pub fn matching_at_least(h: &Hypergraph, k: usize) -> bool {
    matching_search(h.n(), h.r(), &h.edge_bits(), k).0 >= k
}

/// l(H) with a witness forest.
pub fn lforest(h: &Hypergraph) -> (usize, TightLinearForest) {
    let table = EdgeTable::for_graph(h);
    let (value, paths) = path_search(h.n(), h.r(), &h.edge_bits(), &table, usize::MAX, true);
    let mut paths: Vec<TightPath> = paths
        .into_iter()
        .map(|p| TightPath::new(p.into_iter().map(usize::from).collect()).normalized())
        .collect();
    paths.sort();
    (value, TightLinearForest { n: h.n(), r: h.r(), paths })
}

/// True iff l(H) ≥ k.
pub fn forest_at_least(h: &Hypergraph, k: usize) -> bool {
    let table = EdgeTable::for_graph(h);
    path_search(h.n(), h.r(), &h.edge_bits(), &table, k, true).0 >= k
}

/// H is 𝓛_{n,k}-free iff l(H) < k.
pub fn is_forest_free(h: &Hypergraph, k: usize) -> bool {
    !forest_at_least(h, k)
}

/// Longest tight path, by edge count.
pub fn max_tight_path(h: &Hypergraph) -> (usize, Option<TightPath>) {
    let table = EdgeTable::for_graph(h);
    let (value, paths) = path_search(h.n(), h.r(), &h.edge_bits(), &table, usize::MAX, false);
    let path = paths
        .into_iter()
        .next()
        .map(|p| TightPath::new(p.into_iter().map(usize::from).collect()).normalized());
    (value, path)
}

/// True iff H has a tight path with at least `k` edges.
pub fn tight_path_at_least(h: &Hypergraph, k: usize) -> bool {
    let table = EdgeTable::for_graph(h);
    path_search(h.n(), h.r(), &h.edge_bits(), &table, k, false).0 >= k
}

/// Maximum matching by branching on the lowest undecided vertex. Stops early
/// once `target` edges are found.
pub(crate) fn matching_search(n: usize, r: usize, edges: &[u64], target: usize) -> (usize, Vec<u64>) {
    let mut by_min: Vec<Vec<u64>> = vec![Vec::new(); n];
    for &e in edges {
        by_min[e.trailing_zeros() as usize].push(e);
    }
    struct State<'a> {
        r: usize,
        by_min: &'a [Vec<u64>],
        target: usize,
        stack: Vec<u64>,
        best: usize,
        best_edges: Vec<u64>,
    }
    fn dfs(s: &mut State, free: u64) {
        let cur = s.stack.len();
        if cur > s.best {
            s.best = cur;
            s.best_edges = s.stack.clone();
        }
        if s.best >= s.target || free == 0 {
            return;
        }
        if cur + free.count_ones() as usize / s.r <= s.best {
            return;
        }
        let v = free.trailing_zeros() as usize;
        for i in 0..s.by_min[v].len() {
            let e = s.by_min[v][i];
            if e & !free == 0 {
                s.stack.push(e);
                dfs(s, free & !e);
                s.stack.pop();
                if s.best >= s.target {
                    return;
                }
            }
        }
        dfs(s, free & !(1 << v));
    }
    let mut s = State { r, by_min: &by_min, target, stack: Vec::new(), best: 0, best_edges: Vec::new() };
    let free = crate::hypergraph::low_mask(n);
    dfs(&mut s, free);
    (s.best, s.best_edges)
}

enum Memo {
    Dense { data: Vec<u8>, tails: usize },
    Sparse(HashMap<(u64, u64), u8>),
}

const DENSE_MEMO_LIMIT: usize = 1 << 24;

impl Memo {
    fn new(n: usize, r: usize) -> Self {
        let tails = n.checked_pow(r as u32 - 1).map(|t| t + 1);
        match tails {
            Some(t) if n < 32 && (1usize << n).checked_mul(t).is_some_and(|s| s <= DENSE_MEMO_LIMIT) => {
                Memo::Dense { data: vec![0; (1usize << n) * t], tails: t }
            }
            _ => Memo::Sparse(HashMap::new()),
        }
    }

    /// True when the state was already reached with at least `cur` edges.
    #[inline]
    fn seen(&mut self, used: u64, tail: u64, cur: usize) -> bool {
        let mark = cur as u8 + 1;
        let slot = match self {
            Memo::Dense { data, tails } => &mut data[used as usize * *tails + tail as usize],
            Memo::Sparse(map) => map.entry((used, tail)).or_insert(0),
        };
        if *slot >= mark {
            return true;
        }
        *slot = mark;
        false
    }
}

struct PathSearch<'a, L: EdgeLookup> {
    n: usize,
    r: usize,
    edges: &'a [u64],
    lookup: &'a L,
    target: usize,
    forest: bool,
    orders: Vec<Vec<usize>>,
    memo: Memo,
    stack: Vec<Vec<u8>>,
    best: usize,
    best_paths: Vec<Vec<u8>>,
}

impl<L: EdgeLookup> PathSearch<'_, L> {
    #[inline]
    fn done(&self) -> bool {
        self.best >= self.target
    }

    fn record(&mut self, cur: usize) {
        if cur > self.best {
            self.best = cur;
            self.best_paths = self.stack.clone();
        }
    }

    fn tail_code(&self) -> (u64, u64) {
        let path = self.stack.last().expect("open path");
        let tail = &path[path.len() + 1 - self.r..];
        let mut mask = 0u64;
        let mut code = 0u64;
        for &v in tail.iter().rev() {
            mask |= 1 << v;
            code = code.wrapping_mul(self.n as u64).wrapping_add(v as u64);
        }
        (mask, code + 1)
    }

    /// No open path: start a new one (or stop).
    fn open(&mut self, used: u64, cur: usize) {
        self.record(cur);
        if self.done() {
            return;
        }
        let free = self.n - used.count_ones() as usize;
        if cur + (free + 1).saturating_sub(self.r) <= self.best {
            return;
        }
        if self.memo.seen(used, 0, cur) {
            return;
        }
        for i in 0..self.edges.len() {
            let e = self.edges[i];
            if e & used != 0 {
                continue;
            }
            let vs: Vec<u8> = BitIter(e).map(|v| v as u8).collect();
            for o in 0..self.orders.len() {
                let seq: Vec<u8> = self.orders[o].iter().map(|&j| vs[j]).collect();
                self.stack.push(seq);
                self.extend(used | e, cur + 1);
                self.stack.pop();
                if self.done() {
                    return;
                }
            }
        }
    }

    /// The last path on the stack is open at its end.
    fn extend(&mut self, used: u64, cur: usize) {
        self.record(cur);
        if self.done() {
            return;
        }
        let free_mask = crate::hypergraph::low_mask(self.n) & !used;
        let free = free_mask.count_ones() as usize;
        if cur + free <= self.best {
            return;
        }
        let (tail_mask, code) = self.tail_code();
        if self.memo.seen(used, code, cur) {
            return;
        }
        for v in BitIter(free_mask) {
            if self.lookup.has(tail_mask | (1 << v)) {
                self.stack.last_mut().expect("open path").push(v as u8);
                self.extend(used | (1 << v), cur + 1);
                self.stack.last_mut().expect("open path").pop();
                if self.done() {
                    return;
                }
            }
        }
        if self.forest {
            self.open(used, cur);
        }
    }
}

/// Maximum tight linear forest (`forest`) or single tight path, stopping once
/// `target` edges are reached. Returns the value and the witness paths.
pub(crate) fn path_search<L: EdgeLookup>(
    n: usize,
    r: usize,
    edges: &[u64],
    lookup: &L,
    target: usize,
    forest: bool,
) -> (usize, Vec<Vec<u8>>) {
    if edges.is_empty() || target == 0 {
        return (0, Vec::new());
    }
    let mut s = PathSearch {
        n,
        r,
        edges,
        lookup,
        target,
        forest,
        orders: permutations(r),
        memo: Memo::new(n, r),
        stack: Vec::new(),
        best: 0,
        best_paths: Vec::new(),
    };
    s.open(0, 0);
    (s.best, s.best_paths)
}

/// All orderings of `0..r`, lexicographic.
fn permutations(r: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            cur.push(v);
            rec(cur, left, out);
            cur.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..r).collect(), &mut out);
    out
}
