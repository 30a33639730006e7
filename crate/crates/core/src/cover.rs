//! r-partite r-graphs: densities, exhaustive ε-regularity, tight-path
//! extraction, iterative path covers and reduced graphs.
//!
//! Vertex `v` of an [`RPartite`] on parts of size `m` lies in part `v / m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoverError, ParseError};
use crate::hypergraph::{BitIter, EdgeMask, Hypergraph, MAX_VERTICES};
use crate::limits::Limits;
use crate::solvers::{self, TightPath};

/// Name of the edge sampler used by [`random_rpartite`].
pub const GENERATOR: &str = "chacha8-transversal-v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RPartite {
    r: usize,
    m: usize,
    graph: Hypergraph,
}

impl RPartite {
    pub fn new(r: usize, m: usize, graph: Hypergraph) -> Result<Self, CoverError> {
        if r < 2 || m == 0 || r * m > MAX_VERTICES {
            return Err(CoverError::Parameter(format!("r = {r}, m = {m}")));
        }
        if graph.r() != r || graph.n() != r * m {
            return Err(CoverError::Parameter(format!(
                "graph has n = {}, r = {}; expected n = {}, r = {r}",
                graph.n(),
                graph.r(),
                r * m
            )));
        }
        for e in graph.edges() {
            let parts = e.vertices().fold(0u64, |acc, v| acc | (1 << (v / m)));
            if parts.count_ones() as usize != r {
                return Err(CoverError::NotTransversal(e.to_vec()));
            }
        }
        Ok(RPartite { r, m, graph })
    }

    /// Edges given as `r`-tuples of in-part indices, tuple entry `i` in part `i`.
    pub fn from_tuples<I>(r: usize, m: usize, tuples: I) -> Result<Self, CoverError>
    where
        I: IntoIterator,
        I::Item: AsRef<[usize]>,
    {
        if r < 2 || m == 0 || r * m > MAX_VERTICES {
            return Err(CoverError::Parameter(format!("r = {r}, m = {m}")));
        }
        let mut masks = Vec::new();
        for t in tuples {
            let t = t.as_ref();
            if t.len() != r || t.iter().any(|&j| j >= m) {
                return Err(CoverError::NotTransversal(t.to_vec()));
            }
            masks.push(EdgeMask::from_bits(
                t.iter().enumerate().fold(0u64, |acc, (i, &j)| acc | (1 << (i * m + j))),
            ));
        }
        Self::new(r, m, Hypergraph::from_masks(r * m, r, masks)?)
    }

    pub fn complete(r: usize, m: usize) -> Result<Self, CoverError> {
        Self::from_tuples(r, m, transversal_tuples(r, m))
    }

    pub fn empty(r: usize, m: usize) -> Result<Self, CoverError> {
        Self::from_tuples(r, m, Vec::<Vec<usize>>::new())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn part_of(&self, v: usize) -> usize {
        v / self.m
    }

    pub fn part(&self, i: usize) -> Vec<usize> {
        (i * self.m..(i + 1) * self.m).collect()
    }

    /// Density of the full parts, `e(H) / m^r`.
    pub fn full_density(&self) -> f64 {
        self.edge_count() as f64 / (self.m as f64).powi(self.r as i32)
    }

    /// `.hg` text preceded by a `# parts: m r` line.
    pub fn serialize(&self) -> String {
        format!("# parts: {} {}\n{}", self.m, self.r, self.graph.serialize())
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let (m, r) = text
            .lines()
            .find_map(|l| {
                let rest = l.trim().strip_prefix('#')?.trim().strip_prefix("parts:")?;
                let mut it = rest.split_whitespace().map(str::parse::<usize>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(m)), Some(Ok(r)), None) => Some((m, r)),
                    _ => None,
                }
            })
            .ok_or(ParseError::MissingParts)?;
        let graph = Hypergraph::parse(text)?;
        RPartite::new(r, m, graph).map_err(|e| ParseError::Graph(crate::error::GraphError::InvalidParameter(e.to_string())))
    }

    /// Sub-instance on `keep[i]` (equal-sized subsets of the parts, in order),
    /// with the map from new to old vertex ids.
    fn restrict(&self, keep: &[Vec<usize>]) -> (RPartite, Vec<usize>) {
        let order: Vec<usize> = keep.iter().flatten().copied().collect();
        let graph = self.graph.induced(&order).expect("kept vertices are in range");
        let m = keep[0].len();
        (RPartite { r: self.r, m, graph }, order)
    }
}

/// All `m^r` transversal tuples in lex order.
fn transversal_tuples(r: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(m.pow(r as u32));
    let mut t = vec![0; r];
    loop {
        out.push(t.clone());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < m {
                break;
            }
            t[i] = 0;
        }
    }
}

/// Each transversal tuple, in lex order, kept with probability `d`.
pub fn random_rpartite(r: usize, m: usize, d: f64, seed: u64) -> Result<RPartite, CoverError> {
    if !(0.0..=1.0).contains(&d) {
        return Err(CoverError::Parameter(format!("density {d} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tuples: Vec<Vec<usize>> = transversal_tuples(r, m).into_iter().filter(|_| rng.gen::<f64>() < d).collect();
    RPartite::from_tuples(r, m, tuples)
}

/// Edge count among `sets` (global vertex ids, `sets[i]` inside part `i`)
/// over the product of their sizes.
pub fn density(h: &RPartite, sets: &[Vec<usize>]) -> Result<f64, CoverError> {
    if sets.len() != h.r {
        return Err(CoverError::Parameter(format!("{} subsets for {} parts", sets.len(), h.r)));
    }
    let mut union = 0u64;
    let mut product = 1.0;
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() || s.iter().any(|&v| v >= h.r * h.m || h.part_of(v) != i) {
            return Err(CoverError::BadSubset { index: i });
        }
        union |= s.iter().fold(0u64, |a, &v| a | (1 << v));
        product *= union_count(s) as f64;
    }
    Ok(count_inside(h, union) as f64 / product)
}

fn union_count(s: &[usize]) -> u32 {
    s.iter().fold(0u64, |a, &v| a | (1 << v)).count_ones()
}

fn count_inside(h: &RPartite, union: u64) -> usize {
    h.graph.edges().iter().filter(|e| e.bits() & !union == 0).count()
}

/// Exhaustive ε-regularity: every tuple `A_i ⊆ X_i` with `|A_i| >= εm` has
/// density within `ε` of the full density.
pub fn is_eps_regular(h: &RPartite, eps: f64, limits: &Limits) -> Result<bool, CoverError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CoverError::Parameter(format!("eps = {eps} outside (0, 1]")));
    }
    if h.m > limits.regular_max_m || h.r > limits.regular_max_r {
        return Err(CoverError::TooLarge(format!(
            "regularity check needs m <= {} and r <= {}, got m = {}, r = {}",
            limits.regular_max_m, limits.regular_max_r, h.m, h.r
        )));
    }
    let min_size = ((eps * h.m as f64 - 1e-9).ceil() as usize).max(1);
    let overall = h.full_density();
    // qualifying subsets of part i as (global mask, size)
    let choices: Vec<Vec<(u64, usize)>> = (0..h.r)
        .map(|i| {
            (1u64..(1 << h.m))
                .filter(|s| s.count_ones() as usize >= min_size)
                .map(|s| (s << (i * h.m), s.count_ones() as usize))
                .collect()
        })
        .collect();
    let edges = h.graph.edge_bits();
    fn rec(choices: &[Vec<(u64, usize)>], edges: &[u64], union: u64, size: f64, overall: f64, eps: f64) -> bool {
        let Some((first, rest)) = choices.split_first() else {
            let inside = edges.iter().filter(|&&e| e & !union == 0).count() as f64;
            return (inside / size - overall).abs() <= eps + 1e-12;
        };
        first.iter().all(|&(mask, s)| rec(rest, edges, union | mask, size * s as f64, overall, eps))
    }
    Ok(rec(&choices, &edges, 0, 1.0, overall, eps))
}

/// Deterministic greedy: from each not yet covered edge in lex order, extend
/// forward by the lowest vertex completing an edge; keep the longest path.
pub fn greedy_tight_path(h: &RPartite) -> Result<TightPath, CoverError> {
    let r = h.r;
    let n = r * h.m;
    let edges = h.graph.edges();
    if edges.is_empty() {
        return Err(CoverError::Edgeless);
    }
    let hamilton = n - r + 1;
    let mut covered = std::collections::HashSet::new();
    let mut best: Vec<usize> = Vec::new();
    for e in edges {
        if covered.contains(&e.bits()) {
            continue;
        }
        let mut path = e.to_vec();
        let mut used = e.bits();
        covered.insert(e.bits());
        loop {
            let tail = path[path.len() - r + 1..].iter().fold(0u64, |a, &v| a | (1 << v));
            let next = (0..n).find(|&v| used & (1 << v) == 0 && h.graph.contains_edge(EdgeMask::from_bits(tail | (1 << v))));
            let Some(v) = next else { break };
            path.push(v);
            used |= 1 << v;
            covered.insert(tail | (1 << v));
        }
        if path.len() > best.len() {
            best = path;
        }
        if best.len() + 1 - r == hamilton {
            break;
        }
    }
    Ok(TightPath::new(best))
}

/// Exact longest tight path; refuses when `r·m` exceeds the exact limit.
pub fn max_tight_path_rpartite(h: &RPartite, limits: &Limits) -> Result<(usize, Option<TightPath>), CoverError> {
    let n = h.r * h.m;
    if n > limits.exact_path_max_vertices {
        return Err(CoverError::TooLarge(format!(
            "exact path search needs r*m <= {}, got {n}",
            limits.exact_path_max_vertices
        )));
    }
    Ok(solvers::max_tight_path(&h.graph))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractMode {
    Exact,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub r: usize,
    pub m: usize,
    pub eps: f64,
    pub d: f64,
    pub paths: Vec<TightPath>,
    pub modes: Vec<ExtractMode>,
    pub covered: usize,
    pub leftover: usize,
    pub rounds: usize,
    pub density_trace: Vec<f64>,
    pub violated: bool,
    /// `3r / ((d - ε)ε)`.
    pub path_bound: f64,
    /// `rεm`.
    pub leftover_bound: f64,
    /// Both bounds hold; `None` when `violated`.
    pub bounds_hold: Option<bool>,
}

/// Repeatedly removes a balanced tight path from the residual instance until
/// its parts shrink below `εm`, or its density drops below `d - ε`.
pub fn peel_cover(h: &RPartite, eps: f64, d: f64, limits: &Limits) -> Result<CoverReport, CoverError> {
    if !(eps > 0.0 && eps < d && d <= 1.0) {
        return Err(CoverError::Parameter(format!("need 0 < eps < d <= 1, got eps = {eps}, d = {d}")));
    }
    let (r, m) = (h.r, h.m);
    let stop_below = eps * m as f64 - 1e-9;
    let mut remaining: Vec<Vec<usize>> = (0..r).map(|i| h.part(i)).collect();
    let mut report = CoverReport {
        r,
        m,
        eps,
        d,
        paths: Vec::new(),
        modes: Vec::new(),
        covered: 0,
        leftover: 0,
        rounds: 0,
        density_trace: Vec::new(),
        violated: false,
        path_bound: 3.0 * r as f64 / ((d - eps) * eps),
        leftover_bound: r as f64 * eps * m as f64,
        bounds_hold: None,
    };
    loop {
        let mj = remaining[0].len();
        if mj == 0 || (mj as f64) < stop_below {
            break;
        }
        let (residual, back) = h.restrict(&remaining);
        let dens = residual.full_density();
        report.density_trace.push(dens);
        if dens < d - eps {
            report.violated = true;
            break;
        }
        let (path, mode) = if r * mj <= limits.exact_path_max_vertices {
            (solvers::max_tight_path(&residual.graph).1, ExtractMode::Exact)
        } else {
            (greedy_tight_path(&residual).ok(), ExtractMode::Greedy)
        };
        let Some(path) = path else { break };
        let keep = path.vertices.len() / r * r;
        if keep == 0 {
            break;
        }
        let taken: Vec<usize> = path.vertices[..keep].iter().map(|&v| back[v]).collect();
        let taken_mask = taken.iter().fold(0u64, |a, &v| a | (1 << v));
        for part in &mut remaining {
            part.retain(|&v| taken_mask & (1 << v) == 0);
        }
        debug_assert!(remaining.iter().all(|p| p.len() == mj - keep / r));
        report.covered += keep;
        report.paths.push(TightPath::new(taken));
        report.modes.push(mode);
        report.rounds += 1;
    }
    report.leftover = r * remaining[0].len();
    if !report.violated {
        report.bounds_hold = Some(
            report.paths.len() as f64 <= report.path_bound + 1e-9
                && report.leftover as f64 <= report.leftover_bound + 1e-9,
        );
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regularity {
    Regular,
    Irregular,
    DensityOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterTuple {
    pub classes: Vec<usize>,
    pub density: f64,
    pub regularity: Regularity,
    pub present: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedGraph {
    pub t: usize,
    pub r: usize,
    pub eps: f64,
    pub tuples: Vec<ClusterTuple>,
}

impl ReducedGraph {
    pub fn edges(&self) -> impl Iterator<Item = &[usize]> {
        self.tuples.iter().filter(|t| t.present).map(|t| t.classes.as_slice())
    }

    pub fn as_hypergraph(&self) -> Hypergraph {
        Hypergraph::new(self.t, self.r, self.edges()).expect("cluster tuples are valid edges")
    }
}

/// Cluster graph of `host` over equal `classes`: an `r`-tuple of classes is
/// an edge when its transversal density is at least `2ε` and it is ε-regular
/// (or regularity is beyond the exhaustive limit, flagged `density-only`).
pub fn reduced_graph(
    host: &Hypergraph,
    classes: &[Vec<usize>],
    eps: f64,
    limits: &Limits,
) -> Result<ReducedGraph, CoverError> {
    let r = host.r();
    let t = classes.len();
    let m = classes.first().map_or(0, Vec::len);
    let mut seen = 0u64;
    for c in classes {
        for &v in c {
            if v >= host.n() || seen & (1 << v) != 0 {
                return Err(CoverError::BadClasses);
            }
            seen |= 1 << v;
        }
    }
    if t < r || m == 0 || classes.iter().any(|c| c.len() != m) {
        return Err(CoverError::BadClasses);
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CoverError::Parameter(format!("eps = {eps} outside (0, 1]")));
    }
    let exact = r <= limits.regular_max_r && m <= limits.regular_max_m;
    let mut tuples = Vec::new();
    for combo in crate::hypergraph::r_subsets(t, r) {
        let idx: Vec<usize> = BitIter(combo).collect();
        let keep: Vec<usize> = idx.iter().flat_map(|&i| classes[i].iter().copied()).collect();
        let sub = host.induced(&keep)?;
        let transversal = sub.edges().iter().filter(|e| {
            e.vertices().fold(0u64, |a, v| a | (1 << (v / m))).count_ones() as usize == r
        });
        let tuple = RPartite::new(
            r,
            m,
            Hypergraph::from_masks(r * m, r, transversal.copied())?,
        )?;
        let dens = tuple.full_density();
        let regularity = if !exact {
            Regularity::DensityOnly
        } else if is_eps_regular(&tuple, eps, limits)? {
            Regularity::Regular
        } else {
            Regularity::Irregular
        };
        tuples.push(ClusterTuple {
            classes: idx,
            density: dens,
            regularity,
            present: dens >= 2.0 * eps && regularity != Regularity::Irregular,
        });
    }
    Ok(ReducedGraph { t, r, eps, tuples })
}
