//! Exact canonical forms and isomorphism-class counting for small hypergraphs.
//!
//! A labelling of the vertices induces an adjacency string: bit `i` says
//! whether the `i`-th `r`-set in colex order is an edge. The canonical form is
//! the lexicographically greatest such string over all labellings, so dense
//! parts of a graph land on the low labels. Labels are assigned one at a time;
//! fixing label `j` settles exactly the bits of the `r`-sets with maximum `j`,
//! which form the next contiguous colex block. That lets a partial labelling be
//! compared against the best string so far and abandoned early.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::binom;
use crate::error::SearchError;
use crate::hypergraph::{r_subsets, BitIter, EdgeMask, Hypergraph};
use crate::limits::Limits;
use crate::solvers::{EdgeLookup, EdgeTable};

const WORDS: usize = 4;
/// Largest edge universe a form can hold.
pub const MAX_FORM_BITS: usize = 64 * WORDS;

/// Canonical adjacency string. Orders with the greatest string first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalForm {
    n: u8,
    r: u8,
    words: [u64; WORDS],
}

impl Ord for CanonicalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.n, self.r)
            .cmp(&(other.n, other.r))
            .then_with(|| other.words.cmp(&self.words))
    }
}

impl PartialOrd for CanonicalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn r(&self) -> usize {
        self.r as usize
    }

    fn universe(&self) -> usize {
        binom::small(self.n as usize, self.r as usize)
    }

    fn bit(&self, i: usize) -> bool {
        self.words[i / 64] & (1 << (63 - i % 64)) != 0
    }

    /// The canonically labelled representative.
    pub fn to_hypergraph(&self) -> Hypergraph {
        let colex = colex_subsets(self.n(), self.r());
        let edges = (0..colex.len()).filter(|&i| self.bit(i)).map(|i| EdgeMask::from_bits(colex[i]));
        Hypergraph::from_masks(self.n(), self.r(), edges).expect("form decodes to a valid graph")
    }

    pub fn edge_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// `n:r:hex`, the hex digits covering the `C(n, r)` adjacency bits.
impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:", self.n, self.r)?;
        let nibbles = self.universe().div_ceil(4).max(1);
        for i in 0..nibbles {
            let word = self.words[i / 16];
            let shift = 60 - 4 * (i % 16);
            write!(f, "{:x}", (word >> shift) & 0xf)?;
        }
        Ok(())
    }
}

impl FromStr for CanonicalForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let (Some(n), Some(r), Some(hex), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(format!("malformed form {s:?}"));
        };
        let n: u8 = n.parse().map_err(|_| format!("bad n in {s:?}"))?;
        let r: u8 = r.parse().map_err(|_| format!("bad r in {s:?}"))?;
        let universe = binom::binomial(n as u128, r as u128).unwrap_or(u128::MAX);
        if r == 0 || universe > MAX_FORM_BITS as u128 || hex.len() > 16 * WORDS {
            return Err(format!("form {s:?} out of range"));
        }
        let mut words = [0u64; WORDS];
        for (i, ch) in hex.chars().enumerate() {
            let d = ch.to_digit(16).ok_or_else(|| format!("bad hex in {s:?}"))? as u64;
            words[i / 16] |= d << (60 - 4 * (i % 16));
        }
        let form = CanonicalForm { n, r, words };
        if (universe as usize..MAX_FORM_BITS).any(|i| form.bit(i)) {
            return Err(format!("form {s:?} sets bits beyond C(n, r)"));
        }
        Ok(form)
    }
}

/// All `r`-subsets of `[0, n)` in colex order (numeric order of the masks).
pub fn colex_subsets(n: usize, r: usize) -> Vec<u64> {
    let mut v = r_subsets(n, r);
    v.sort_unstable();
    v
}

/// Reusable canonical labelling engine for fixed `(n, r)`.
pub struct Canonizer {
    n: usize,
    r: usize,
    /// `(r-1)`-subsets of labels in colex order.
    lower: Vec<u64>,
    /// `C(j, r)` and `C(j, r-1)` per label `j`.
    block_start: Vec<usize>,
    block_len: Vec<usize>,
}

impl Canonizer {
    pub fn new(n: usize, r: usize) -> Self {
        assert!(r >= 1 && binom::small(n, r) <= MAX_FORM_BITS, "edge universe too large for a form");
        Canonizer {
            n,
            r,
            lower: colex_subsets(n, r - 1),
            block_start: (0..=n).map(|j| binom::small(j, r)).collect(),
            block_len: (0..=n).map(|j| binom::small(j, r - 1)).collect(),
        }
    }

    /// Canonical form of the graph with the given edge masks.
    pub(crate) fn form_of<L: EdgeLookup>(&self, edges: &[u64], lookup: &L) -> CanonicalForm {
        let twins = twin_classes(self.n, edges, lookup);
        let mut run = Run {
            c: self,
            lookup,
            twins: &twins,
            labels: vec![0; self.n],
            cur: [0; WORDS],
            best: None,
        };
        run.label(0, 0);
        CanonicalForm { n: self.n as u8, r: self.r as u8, words: run.best.unwrap_or([0; WORDS]) }
    }

    pub fn form(&self, h: &Hypergraph) -> CanonicalForm {
        assert_eq!((h.n(), h.r()), (self.n, self.r));
        self.form_of(&h.edge_bits(), &EdgeTable::for_graph(h))
    }
}

struct Run<'a, L: EdgeLookup> {
    c: &'a Canonizer,
    lookup: &'a L,
    twins: &'a [usize],
    labels: Vec<usize>,
    cur: [u64; WORDS],
    best: Option<[u64; WORDS]>,
}

impl<L: EdgeLookup> Run<'_, L> {
    fn label(&mut self, j: usize, assigned: u64) {
        let n = self.c.n;
        if j == n {
            if self.best.is_none_or(|b| self.cur > b) {
                self.best = Some(self.cur);
            }
            return;
        }
        let start = self.c.block_start[j];
        let len = self.c.block_len[j];
        let mut tried_classes = 0u64;
        for v in 0..n {
            if assigned & (1 << v) != 0 || tried_classes & (1 << self.twins[v]) != 0 {
                continue;
            }
            tried_classes |= 1 << self.twins[v];
            for s in 0..len {
                let mut mask = 1u64 << v;
                for l in BitIter(self.c.lower[s]) {
                    mask |= 1 << self.labels[l];
                }
                set_bit(&mut self.cur, start + s, self.lookup.has(mask));
            }
            if let Some(best) = &self.best {
                if prefix_cmp(&self.cur, best, start + len) == Ordering::Less {
                    continue;
                }
            }
            self.labels[j] = v;
            self.label(j + 1, assigned | (1 << v));
        }
    }
}

#[inline]
fn set_bit(words: &mut [u64; WORDS], i: usize, on: bool) {
    let bit = 1u64 << (63 - i % 64);
    if on {
        words[i / 64] |= bit;
    } else {
        words[i / 64] &= !bit;
    }
}

fn prefix_cmp(a: &[u64; WORDS], b: &[u64; WORDS], len: usize) -> Ordering {
    let full = len / 64;
    for w in 0..full {
        match a[w].cmp(&b[w]) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    let rest = len % 64;
    if rest == 0 {
        return Ordering::Equal;
    }
    let keep = !0u64 << (64 - rest);
    (a[full] & keep).cmp(&(b[full] & keep))
}

/// Class id (smallest member) per vertex, where `u ~ w` iff swapping them is
/// an automorphism.
#[allow(clippy::needless_range_loop)]
fn twin_classes<L: EdgeLookup>(n: usize, edges: &[u64], lookup: &L) -> Vec<usize> {
    let mut class: Vec<usize> = (0..n).collect();
    for u in 0..n {
        if class[u] != u {
            continue;
        }
        for w in (u + 1)..n {
            if class[w] != w {
                continue;
            }
            let (bu, bw) = (1u64 << u, 1u64 << w);
            let swap_ok = edges.iter().all(|&e| {
                let hu = e & bu != 0;
                let hw = e & bw != 0;
                hu == hw || lookup.has(e ^ bu ^ bw)
            });
            if swap_ok {
                class[w] = u;
            }
        }
    }
    class
}

/// Canonical form with the `canonical_max_n` limit enforced.
pub fn canonical_form(h: &Hypergraph, limits: &Limits) -> Result<CanonicalForm, SearchError> {
    if h.n() > limits.canonical_max_n {
        return Err(SearchError::Infeasible(format!(
            "canonical form needs n <= {}, got {}",
            limits.canonical_max_n,
            h.n()
        )));
    }
    if binom::small(h.n(), h.r()) > MAX_FORM_BITS {
        return Err(SearchError::Infeasible(format!("C({}, {}) exceeds {MAX_FORM_BITS}", h.n(), h.r())));
    }
    Ok(Canonizer::new(h.n(), h.r()).form(h))
}

/// Number of isomorphism classes of `r`-graphs on `n` vertices, by Burnside's
/// lemma summed over cycle types of `S_n`.
pub fn count_nonisomorphic(n: usize, r: usize, limits: &Limits) -> Result<u128, SearchError> {
    if r == 0 || n > 64 {
        return Err(SearchError::Infeasible(format!("unsupported (n, r) = ({n}, {r})")));
    }
    let universe = binom::binomial(n as u128, r as u128).unwrap_or(u128::MAX);
    if universe > limits.count_max_edges as u128 {
        return Err(SearchError::Infeasible(format!(
            "C({n}, {r}) = {universe} exceeds count limit {}",
            limits.count_max_edges
        )));
    }
    let sets = r_subsets(n, r);
    let index: HashMap<u64, usize> = sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let factorial = |k: usize| (1..=k).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i));
    let mut total = BigUint::from(0u32);
    for parts in partitions(n) {
        // one permutation of this cycle type: consecutive blocks rotated
        let mut perm = vec![0usize; n];
        let mut at = 0;
        for &len in &parts {
            for i in 0..len {
                perm[at + i] = at + (i + 1) % len;
            }
            at += len;
        }
        let mut seen = vec![false; sets.len()];
        let mut cycles = 0u32;
        for start in 0..sets.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                let img = BitIter(sets[i]).fold(0u64, |acc, v| acc | (1 << perm[v]));
                i = index[&img];
            }
        }
        // class size n! / prod(len^m * m!)
        let mut denom = BigUint::from(1u32);
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for &len in &parts {
            *counts.entry(len).or_default() += 1;
            denom *= BigUint::from(len);
        }
        for &m in counts.values() {
            denom *= factorial(m);
        }
        total += (factorial(n) / denom) * (BigUint::from(1u32) << cycles);
    }
    let count = total / factorial(n);
    u128::try_from(count).map_err(|_| SearchError::Infeasible("class count exceeds u128".into()))
}

/// Integer partitions of `n`, parts non-increasing.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=left.min(max)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}
