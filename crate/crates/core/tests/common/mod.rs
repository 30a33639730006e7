//! Brute-force oracles. They enumerate vertex sequences and edge subsets
//! directly and share no code with the library's solvers.
#![allow(dead_code)]

use std::collections::HashMap;

use tlf_core::Hypergraph;

/// All `r`-sets of `0..n` as bitmasks, lex order of sorted vertex lists.
pub fn all_r_sets(n: usize, r: usize) -> Vec<u64> {
    fn rec(start: usize, n: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for v in start..n {
            rec(v + 1, n, left - 1, acc | (1 << v), out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, 0, &mut out);
    out
}

fn graph_masks(h: &Hypergraph) -> Vec<u64> {
    h.edges().iter().map(|e| e.bits()).collect()
}

/// Largest set of pairwise disjoint edges.
pub fn brute_nu(h: &Hypergraph) -> usize {
    fn rec(edges: &[u64], used: u64) -> usize {
        match edges.split_first() {
            None => 0,
            Some((&e, rest)) => {
                let skip = rec(rest, used);
                if e & used == 0 {
                    skip.max(1 + rec(rest, used | e))
                } else {
                    skip
                }
            }
        }
    }
    rec(&graph_masks(h), 0)
}

/// Tight paths as vertex sequences whose windows all lie in `edges`,
/// visiting every sequence from every start.
fn for_each_path(n: usize, r: usize, is_edge: &dyn Fn(u64) -> bool, avail: u64, f: &mut dyn FnMut(&[usize])) {
    fn grow(
        n: usize,
        r: usize,
        is_edge: &dyn Fn(u64) -> bool,
        avail: u64,
        seq: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if seq.len() >= r {
            let w = seq[seq.len() - r..].iter().fold(0u64, |a, &v| a | (1 << v));
            if !is_edge(w) {
                return;
            }
            f(seq);
        }
        for v in 0..n {
            if avail & (1 << v) != 0 && !seq.contains(&v) {
                seq.push(v);
                grow(n, r, is_edge, avail, seq, f);
                seq.pop();
            }
        }
    }
    grow(n, r, is_edge, avail, &mut Vec::new(), f);
}

/// l(H): the best path on some vertex set plus the best forest on the rest,
/// memoised by the set of available vertices.
pub fn brute_l(h: &Hypergraph) -> usize {
    let edges: std::collections::HashSet<u64> = graph_masks(h).into_iter().collect();
    fn rec(n: usize, r: usize, edges: &std::collections::HashSet<u64>, avail: u64, memo: &mut HashMap<u64, usize>) -> usize {
        if let Some(&v) = memo.get(&avail) {
            return v;
        }
        let mut per_set: HashMap<u64, usize> = HashMap::new();
        let is_edge = |m: u64| edges.contains(&m);
        for_each_path(n, r, &is_edge, avail, &mut |seq| {
            let mask = seq.iter().fold(0u64, |a, &v| a | (1 << v));
            let slot = per_set.entry(mask).or_default();
            *slot = (*slot).max(seq.len() + 1 - r);
        });
        let best = per_set
            .into_iter()
            .map(|(mask, e)| e + rec(n, r, edges, avail & !mask, memo))
            .max()
            .unwrap_or(0);
        memo.insert(avail, best);
        best
    }
    rec(h.n(), h.r(), &edges, (1u64 << h.n()) - 1, &mut HashMap::new())
}

/// Longest tight path by edge count.
pub fn brute_path(h: &Hypergraph) -> usize {
    let edges: std::collections::HashSet<u64> = graph_masks(h).into_iter().collect();
    let mut best = 0;
    let is_edge = |m: u64| edges.contains(&m);
    for_each_path(h.n(), h.r(), &is_edge, (1u64 << h.n()) - 1, &mut |seq| {
        best = best.max(seq.len() + 1 - h.r());
    });
    best
}

/// Every edge set (bitmask over `all_r_sets(n, r)` indices) that is a tight
/// linear forest with exactly `k` edges.
pub fn forest_patterns(n: usize, r: usize, k: usize) -> Vec<u64> {
    let sets = all_r_sets(n, r);
    let index: HashMap<u64, usize> = sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut out = std::collections::BTreeSet::new();
    fn rec(
        n: usize,
        r: usize,
        index: &HashMap<u64, usize>,
        avail: u64,
        left: usize,
        acc: u64,
        out: &mut std::collections::BTreeSet<u64>,
    ) {
        if left == 0 {
            out.insert(acc);
            return;
        }
        let is_edge = |_: u64| true;
        let mut paths: Vec<Vec<usize>> = Vec::new();
        for_each_path(n, r, &is_edge, avail, &mut |seq| {
            if seq.len() + 1 - r <= left {
                paths.push(seq.to_vec());
            }
        });
        for seq in paths {
            let used = seq.iter().fold(0u64, |a, &v| a | (1 << v));
            let windows = seq.windows(r).fold(acc, |a, w| {
                a | 1 << index[&w.iter().fold(0u64, |m, &v| m | (1 << v))]
            });
            rec(n, r, index, avail & !used, left - (seq.len() + 1 - r), windows, out);
        }
    }
    rec(n, r, &index, (1u64 << n) - 1, k, 0, &mut out);
    out.into_iter().collect()
}

/// Every edge set that is a matching of exactly `k` edges.
pub fn matching_patterns(n: usize, r: usize, k: usize) -> Vec<u64> {
    let sets = all_r_sets(n, r);
    let mut out = Vec::new();
    fn rec(sets: &[u64], from: usize, used: u64, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in from..sets.len() {
            if sets[i] & used == 0 {
                rec(sets, i + 1, used | sets[i], left - 1, acc | (1 << i), out);
            }
        }
    }
    rec(&sets, 0, 0, k, 0, &mut out);
    out
}

/// Maximum edge count over edge subsets avoiding every pattern, with all
/// maximisers as edge-index bitmasks. Exhaustive over `2^C(n, r)` subsets.
#[allow(clippy::manual_contains)] // the pattern test is a subset check
pub fn brute_turan(n: usize, r: usize, patterns: &[u64]) -> (usize, Vec<u64>) {
    let e = all_r_sets(n, r).len();
    assert!(e <= 24, "too many subsets for brute force");
    let mut best = 0usize;
    let mut winners = Vec::new();
    for s in 0u64..(1 << e) {
        let c = s.count_ones() as usize;
        if c < best || patterns.iter().any(|&p| p & s == p) {
            continue;
        }
        if c > best {
            best = c;
            winners.clear();
        }
        winners.push(s);
    }
    (best, winners)
}

/// Builds the graph whose edges are the chosen `all_r_sets` indices.
pub fn graph_of(n: usize, r: usize, chosen: u64) -> Hypergraph {
    let sets = all_r_sets(n, r);
    let edges: Vec<Vec<usize>> = (0..sets.len())
        .filter(|i| chosen >> i & 1 == 1)
        .map(|i| (0..n).filter(|v| sets[i] >> v & 1 == 1).collect())
        .collect();
    Hypergraph::new(n, r, edges).unwrap()
}
