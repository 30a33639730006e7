//! Feasibility limits. Exceeding one is a refusal, never a crash.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest `n` accepted by the exact Turán search, keyed by `r`.
    pub search_max_n: BTreeMap<usize, usize>,
    /// Largest `n` for exact canonical forms.
    pub canonical_max_n: usize,
    /// Largest edge universe `C(n, r)` for orbit counting.
    pub count_max_edges: usize,
    /// Exhaustive ε-regularity check: part size and uniformity caps.
    pub regular_max_m: usize,
    pub regular_max_r: usize,
    /// Largest `r·m` handed to the exact r-partite path solver.
    pub exact_path_max_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            search_max_n: BTreeMap::from([(2, 8), (3, 7), (4, 7)]),
            canonical_max_n: 10,
            count_max_edges: 256,
            regular_max_m: 5,
            regular_max_r: 3,
            exact_path_max_vertices: 14,
        }
    }
}

impl Limits {
    /// Applies one `KEY=VAL` override. Keys: `r<r>` (search max n for that r),
    /// `canonical`, `count-edges`, `regular-m`, `regular-r`, `exact-path`.
    pub fn apply(&mut self, spec: &str) -> Result<(), String> {
        let (key, val) = spec
            .split_once('=')
            .ok_or_else(|| format!("limit override {spec:?} is not KEY=VAL"))?;
        let (key, val) = (key.trim(), val.trim());
        let val: usize = val.parse().map_err(|_| format!("limit value {val:?} is not an integer"))?;
        match key {
            "canonical" => self.canonical_max_n = val,
            "count-edges" => self.count_max_edges = val,
            "regular-m" => self.regular_max_m = val,
            "regular-r" => self.regular_max_r = val,
            "exact-path" => self.exact_path_max_vertices = val,
            k if k.starts_with('r') && k[1..].parse::<usize>().is_ok() => {
                self.search_max_n.insert(k[1..].parse().unwrap(), val);
            }
            other => return Err(format!("unknown limit key {other:?}")),
        }
        Ok(())
    }

    /// Applies every non-comment line of an override file.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .try_for_each(|l| self.apply(l))
    }

    pub fn search_allows(&self, n: usize, r: usize) -> bool {
        self.search_max_n.get(&r).is_some_and(|&max| n <= max)
    }
}
