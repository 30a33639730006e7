//! r-uniform hypergraphs over `n` labelled vertices.
//!
//! Edges are vertex bitmasks, so `n` is capped at 64. The edge list is kept in
//! lexicographic order of the sorted vertex sequences, which makes the textual
//! form canonical.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binom;
use crate::error::{GraphError, ParseError};

pub const MAX_VERTICES: usize = 64;

/// One edge as a vertex bitmask with exactly `r` bits set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct EdgeMask(u64);

impl EdgeMask {
    pub fn from_bits(bits: u64) -> Self {
        EdgeMask(bits)
    }

    /// Builds a mask from vertex indices; rejects repeats and indices `>= n`.
    pub fn from_vertices(vertices: &[usize], n: usize) -> Result<Self, GraphError> {
        let mut bits = 0u64;
        for &v in vertices {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if bits & (1 << v) != 0 {
                return Err(GraphError::RepeatedVertex(vertices.to_vec()));
            }
            bits |= 1 << v;
        }
        Ok(EdgeMask(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn arity(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 & (1 << v) != 0
    }

    /// Vertices in increasing order.
    pub fn vertices(self) -> impl Iterator<Item = usize> {
        BitIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.vertices().collect()
    }
}

/// Lexicographic order of the increasing vertex sequences. Only meaningful
/// between masks of equal arity.
impl Ord for EdgeMask {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.reverse_bits().cmp(&self.0.reverse_bits())
    }
}

impl PartialOrd for EdgeMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Iterator over set bits, lowest first.
pub(crate) struct BitIter(pub(crate) u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

/// All `r`-subsets of `[0, n)` as masks, in lexicographic order.
pub fn r_subsets(n: usize, r: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for v in start..=n.saturating_sub(left) {
            if n - v < left {
                break;
            }
            rec(v + 1, n, left - 1, acc | (1 << v), out);
        }
    }
    let mut out = Vec::new();
    if r <= n {
        rec(0, n, r, 0, &mut out);
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Hypergraph {
    n: usize,
    r: usize,
    edges: Vec<EdgeMask>,
}

impl Hypergraph {
    /// Validating constructor. Vertex order inside an edge is irrelevant.
    pub fn new<I, E>(n: usize, r: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[usize]>,
    {
        check_shape(n, r)?;
        let mut masks = Vec::new();
        for e in edges {
            let e = e.as_ref();
            if e.len() != r {
                return Err(GraphError::WrongArity { edge: e.to_vec(), got: e.len(), expected: r });
            }
            masks.push(EdgeMask::from_vertices(e, n)?);
        }
        Self::from_masks(n, r, masks)
    }

    /// Builds from raw masks, rejecting wrong arity, range and duplicates.
    pub fn from_masks(
        n: usize,
        r: usize,
        masks: impl IntoIterator<Item = EdgeMask>,
    ) -> Result<Self, GraphError> {
        check_shape(n, r)?;
        let range = low_mask(n);
        let mut edges: Vec<EdgeMask> = masks.into_iter().collect();
        for e in &edges {
            if e.arity() != r {
                return Err(GraphError::WrongArity { edge: e.to_vec(), got: e.arity(), expected: r });
            }
            if e.0 & !range != 0 {
                let vertex = BitIter(e.0 & !range).next().unwrap_or(n);
                return Err(GraphError::VertexOutOfRange { vertex, n });
            }
        }
        edges.sort();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].to_vec()));
        }
        Ok(Hypergraph { n, r, edges })
    }

    /// `K_n^{(r)}`; no edges when `n < r` or `r == 0`.
    pub fn complete(n: usize, r: usize) -> Self {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices");
        let edges = if r == 0 {
            Vec::new()
        } else {
            r_subsets(n, r).into_iter().map(EdgeMask).collect()
        };
        Hypergraph { n, r, edges }
    }

    /// `E_n^{(r)}`: `n` isolated vertices.
    pub fn empty(n: usize, r: usize) -> Self {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices");
        Hypergraph { n, r, edges: Vec::new() }
    }

    /// `floor(n / r)` disjoint edges on consecutive vertices.
    pub fn perfect_matching(n: usize, r: usize) -> Result<Self, GraphError> {
        check_shape(n, r)?;
        let edges = (0..n / r).map(|i| EdgeMask(((1u64 << r) - 1) << (i * r)));
        Self::from_masks(n, r, edges)
    }

    /// The tight path `0, 1, ..., n-1`.
    pub fn tight_path(n: usize, r: usize) -> Result<Self, GraphError> {
        check_shape(n, r)?;
        let count = (n + 1).saturating_sub(r);
        let edges = (0..count).map(|i| EdgeMask(((1u64 << r) - 1) << i));
        Self::from_masks(n, r, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[EdgeMask] {
        &self.edges
    }

    pub fn edge_bits(&self) -> Vec<u64> {
        self.edges.iter().map(|e| e.0).collect()
    }

    pub fn edge_lists(&self) -> Vec<Vec<usize>> {
        self.edges.iter().map(|e| e.to_vec()).collect()
    }

    pub fn contains_edge(&self, e: EdgeMask) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn contains_vertices(&self, vertices: &[usize]) -> bool {
        vertices.len() == self.r
            && EdgeMask::from_vertices(vertices, self.n).is_ok_and(|e| self.contains_edge(e))
    }

    /// `H1 ∨ H2`: disjoint union plus every `r`-set meeting both sides.
    /// `other` is relabelled by offset `self.n()`.
    pub fn join(&self, other: &Hypergraph) -> Result<Self, GraphError> {
        let union = self.disjoint_union(other)?;
        let left = low_mask(self.n);
        let right = low_mask(union.n) & !left;
        let mut edges = union.edges;
        edges.extend(
            r_subsets(union.n, self.r)
                .into_iter()
                .filter(|&s| s & left != 0 && s & right != 0)
                .map(EdgeMask),
        );
        Self::from_masks(union.n, self.r, edges)
    }

    /// Disjoint union with `other` relabelled by offset `self.n()`.
    pub fn disjoint_union(&self, other: &Hypergraph) -> Result<Self, GraphError> {
        if self.r != other.r {
            return Err(GraphError::UniformityMismatch { left: self.r, right: other.r });
        }
        let n = self.n + other.n;
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices { n, max: MAX_VERTICES });
        }
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|e| EdgeMask(e.0 << self.n)));
        Self::from_masks(n, self.r, edges)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::NotABijection { n: self.n });
        }
        let mut seen = 0u64;
        for &p in perm {
            if p >= self.n || seen & (1 << p) != 0 {
                return Err(GraphError::NotABijection { n: self.n });
            }
            seen |= 1 << p;
        }
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeMask(e.vertices().fold(0, |acc, v| acc | (1 << perm[v]))));
        Self::from_masks(self.n, self.r, edges)
    }

    /// Subgraph induced on `keep`, relabelled to `0..keep.len()` in the given order.
    pub fn induced(&self, keep: &[usize]) -> Result<Self, GraphError> {
        let mut index = [usize::MAX; MAX_VERTICES];
        for (i, &v) in keep.iter().enumerate() {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            index[v] = i;
        }
        let edges = self.edges.iter().filter_map(|e| {
            e.vertices()
                .try_fold(0u64, |acc, v| (index[v] != usize::MAX).then(|| acc | (1 << index[v])))
                .map(EdgeMask)
        });
        Self::from_masks(keep.len(), self.r, edges)
    }

    /// Adds one edge, returning the enlarged graph.
    pub fn with_edge(&self, vertices: &[usize]) -> Result<Self, GraphError> {
        let e = EdgeMask::from_vertices(vertices, self.n)?;
        Self::from_masks(self.n, self.r, self.edges.iter().copied().chain([e]))
    }

    /// Each of the `C(n, r)` edges independently with probability `p`.
    pub fn random(n: usize, r: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = r_subsets(n, r)
            .into_iter()
            .filter(|_| rng.gen::<f64>() < p)
            .map(EdgeMask);
        Self::from_masks(n, r, edges).expect("generated edges are valid")
    }

    /// Exactly `min(count, C(n, r))` edges chosen uniformly.
    pub fn random_with_edges(n: usize, r: usize, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut all = r_subsets(n, r);
        all.shuffle(&mut rng);
        all.truncate(count);
        Self::from_masks(n, r, all.into_iter().map(EdgeMask)).expect("generated edges are valid")
    }

    /// Canonical `.hg` text.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges: Vec<(usize, EdgeMask)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((n, r)) = header else {
                let fields: Vec<&str> = line.split_whitespace().collect();
                let parsed = match fields.as_slice() {
                    [a, b] => a.parse::<usize>().ok().zip(b.parse::<usize>().ok()),
                    _ => None,
                };
                let Some((n, r)) = parsed else {
                    return Err(ParseError::MalformedHeader { line: line_no, text: raw.to_string() });
                };
                check_shape(n, r)?;
                header = Some((n, r));
                continue;
            };
            let mut vertices = Vec::with_capacity(r);
            for tok in line.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| ParseError::BadToken { line: line_no, token: tok.to_string() })?;
                if v >= n {
                    return Err(ParseError::OutOfRange { line: line_no, vertex: v, n });
                }
                vertices.push(v);
            }
            if vertices.len() != r {
                return Err(ParseError::WrongArity { line: line_no, expected: r, got: vertices.len() });
            }
            if vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ParseError::NotIncreasing { line: line_no });
            }
            edges.push((line_no, EdgeMask::from_vertices(&vertices, n)?));
        }
        let (n, r) = header.ok_or(ParseError::MissingHeader)?;
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (line, e) in &edges {
            if !seen.insert(*e) {
                return Err(ParseError::DuplicateEdge { line: *line });
            }
        }
        Ok(Self::from_masks(n, r, edges.into_iter().map(|(_, e)| e))?)
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.r)?;
        for e in &self.edges {
            let mut first = true;
            for v in e.vertices() {
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
                first = false;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

impl FromStr for Hypergraph {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for Hypergraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            r: usize,
            edges: Vec<Vec<usize>>,
        }
        Repr { n: self.n, r: self.r, edges: self.edge_lists() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypergraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            r: usize,
            edges: Vec<Vec<usize>>,
        }
        let repr = Repr::deserialize(d)?;
        Hypergraph::new(repr.n, repr.r, repr.edges).map_err(serde::de::Error::custom)
    }
}

/// Mask of the lowest `n` bits.
pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_shape(n: usize, r: usize) -> Result<(), GraphError> {
    if r == 0 {
        return Err(GraphError::ZeroUniformity);
    }
    if n > MAX_VERTICES {
        return Err(GraphError::TooManyVertices { n, max: MAX_VERTICES });
    }
    Ok(())
}

/// The two candidate extremal graphs for `𝓛_{n,k}` with `k ≡ 1 (mod r)`:
/// `A = K_{k+r-2} ∪ E_{n-k-r+2}` and `B = K_{(k-1)/r} ∨ E_{n-(k-1)/r}`.
pub fn extremal_construction(
    n: usize,
    r: usize,
    k: usize,
) -> Result<(Hypergraph, Hypergraph), GraphError> {
    if r == 0 {
        return Err(GraphError::ZeroUniformity);
    }
    if k <= r || k % r != 1 % r {
        return Err(GraphError::Divisibility { k, r });
    }
    let clique = k + r - 2;
    if n < clique {
        return Err(GraphError::TooFewVertices { n, min: clique });
    }
    if n > MAX_VERTICES {
        return Err(GraphError::TooManyVertices { n, max: MAX_VERTICES });
    }
    let a = Hypergraph::complete(clique, r).disjoint_union(&Hypergraph::empty(n - clique, r))?;
    let apex = (k - 1) / r;
    let b = Hypergraph::complete(apex, r).join(&Hypergraph::empty(n - apex, r))?;
    Ok((a, b))
}

/// `K_s ∪ E_{n-s}`.
pub fn clique_plus_isolated(n: usize, r: usize, s: usize) -> Result<Hypergraph, GraphError> {
    if s > n {
        return Err(GraphError::TooFewVertices { n, min: s });
    }
    check_shape(n, r)?;
    Hypergraph::complete(s, r).disjoint_union(&Hypergraph::empty(n - s, r))
}

/// `K_s ∨ E_{n-s}`.
pub fn clique_join_empty(n: usize, r: usize, s: usize) -> Result<Hypergraph, GraphError> {
    if s > n {
        return Err(GraphError::TooFewVertices { n, min: s });
    }
    check_shape(n, r)?;
    Hypergraph::complete(s, r).join(&Hypergraph::empty(n - s, r))
}

/// Expected edge count of a join, from the counting identity.
pub fn join_edge_count(h1: &Hypergraph, h2: &Hypergraph) -> usize {
    let r = h1.r;
    h1.edge_count() + h2.edge_count() + binom::small(h1.n + h2.n, r)
        - binom::small(h1.n, r)
        - binom::small(h2.n, r)
}
