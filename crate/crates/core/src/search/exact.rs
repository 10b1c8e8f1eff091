//! Exhaustive minimization of `dist_perm` over all k-permutations.
//!
//! Supports are visited in lexicographic order and, within a support, images
//! in lexicographic order, so the reported witness is the first minimizer of
//! the enumeration stream. The search assigns images position by position,
//! charging each edge as soon as its image pair is determined, and prunes a
//! branch once its cost plus a per-position lower bound cannot beat the
//! incumbent.

use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::ToPrimitive;

use super::{check_normalizable, DeltaEntry};
use crate::error::{Error, Result};
use crate::graph::{and_not_count, Graph};
use crate::perm::{count_k_perms, Combinations, Permutation};

/// Default number of permutations the exact search may enumerate per k.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone)]
struct Found {
    cost: u64,
    subset: Vec<u32>,
    images: Vec<usize>,
}

struct SubsetSearch<'a> {
    g: &'a Graph,
    k: usize,
    subset: Vec<u32>,
    in_subset: Vec<bool>,
    /// `cost_out[i * k + j]`: edges from `s_i` leaving the subset that become
    /// non-edges when `s_i` maps to `s_j`.
    cost_out: Vec<u64>,
    inside: Vec<bool>,
    /// `lower[i]`: sum over positions `>= i` of the cheapest outgoing cost.
    lower: Vec<u64>,
    images: Vec<usize>,
    used: Vec<bool>,
    best: u64,
    found: Option<Found>,
    global: &'a AtomicU64,
}

impl<'a> SubsetSearch<'a> {
    fn new(g: &'a Graph, k: usize, limit: u64, global: &'a AtomicU64) -> Self {
        SubsetSearch {
            g,
            k,
            subset: Vec::with_capacity(k),
            in_subset: vec![false; g.n()],
            cost_out: vec![0; k * k],
            inside: vec![false; k * k],
            lower: vec![0; k + 1],
            images: Vec::with_capacity(k),
            used: vec![false; k],
            best: limit,
            found: None,
            global,
        }
    }

    fn load(&mut self, subset: &[u32]) {
        for &s in &self.subset {
            self.in_subset[s as usize] = false;
        }
        self.subset.clear();
        self.subset.extend_from_slice(subset);
        for &s in subset {
            self.in_subset[s as usize] = true;
        }
        let (g, k) = (self.g, self.k);
        for i in 0..k {
            let si = subset[i] as usize;
            for j in 0..k {
                let sj = subset[j] as usize;
                self.inside[i * k + j] = g.has_edge(si, sj);
                if i == j {
                    continue;
                }
                self.cost_out[i * k + j] = match g.rows() {
                    Some(rows) => {
                        let raw = and_not_count(rows.row(si), rows.row(sj)) as u64;
                        let in_s = subset
                            .iter()
                            .filter(|&&t| g.has_edge(si, t as usize) && !g.has_edge(sj, t as usize))
                            .count() as u64;
                        raw - in_s
                    }
                    None => g
                        .neighbors(si)
                        .iter()
                        .filter(|&&w| !self.in_subset[w as usize] && !g.has_edge(sj, w as usize))
                        .count() as u64,
                };
            }
        }
        self.lower[k] = 0;
        for i in (0..k).rev() {
            let cheapest = (0..k).filter(|&j| j != i).map(|j| self.cost_out[i * k + j]).min().unwrap_or(0);
            self.lower[i] = self.lower[i + 1] + cheapest;
        }
    }

    fn dfs(&mut self, pos: usize, cost: u64) {
        let k = self.k;
        if pos == k {
            if cost < self.best {
                self.best = cost;
                self.found = Some(Found { cost, subset: self.subset.clone(), images: self.images.clone() });
            }
            return;
        }
        let forced = k >= 2 && pos == k - 2 && !self.used[k - 1];
        for j in 0..k {
            if j == pos || self.used[j] || (forced && j != k - 1) {
                continue;
            }
            let mut add = self.cost_out[pos * k + j];
            for i in 0..pos {
                if self.inside[i * k + pos] && !self.inside[self.images[i] * k + j] {
                    add += 1;
                }
            }
            let bound = cost + add + self.lower[pos + 1];
            if bound >= self.best || bound > self.global.load(Ordering::Relaxed) {
                continue;
            }
            self.used[j] = true;
            self.images.push(j);
            self.dfs(pos + 1, cost + add);
            self.images.pop();
            self.used[j] = false;
            if self.best == 0 {
                return;
            }
        }
    }
}

/// Searches the supports whose smallest element is `first`.
fn search_prefix(g: &Graph, k: usize, first: Option<u32>, limit: u64, global: &AtomicU64) -> Option<Found> {
    let mut search = SubsetSearch::new(g, k, limit, global);
    let mut subsets = Combinations::new(g.n(), k, first);
    while let Some(subset) = subsets.current() {
        search.load(subset);
        search.dfs(0, 0);
        if search.best == 0 {
            break;
        }
        subsets.advance();
    }
    if let Some(f) = &search.found {
        global.fetch_min(f.cost, Ordering::Relaxed);
    }
    search.found
}

/// First permutation in enumeration order with `dist_perm < limit` that is
/// minimal, or `None` if no k-permutation beats `limit`.
pub(crate) fn minimize(g: &Graph, k: usize, limit: u64) -> Option<(u64, Permutation)> {
    let n = g.n();
    if k == 1 || k > n {
        return None;
    }
    let global = AtomicU64::new(limit);
    let best = if k == 0 {
        search_prefix(g, 0, None, limit, &global)
    } else {
        let firsts: Vec<u32> = (0..=(n - k) as u32).collect();
        let results = crate::par::map(firsts, |f| search_prefix(g, k, Some(f), limit, &global));
        // results are in prefix order, so the first strict minimum is the
        // first minimizer of the whole stream
        results.into_iter().flatten().fold(None::<Found>, |acc, f| match acc {
            Some(a) if a.cost <= f.cost => Some(a),
            _ => Some(f),
        })
    }?;
    let mut mapping: Vec<u32> = (0..n as u32).collect();
    for (i, &j) in best.images.iter().enumerate() {
        mapping[best.subset[i] as usize] = best.subset[j];
    }
    Some((best.cost, Permutation::from_mapping_unchecked(mapping)))
}

pub(crate) fn check_budget(n: usize, k: usize, budget: u64) -> Result<u64> {
    let count = count_k_perms(n, k)?;
    match count.to_u64() {
        Some(c) if c <= budget => Ok(c),
        _ => Err(Error::BudgetExceeded { count, budget }),
    }
}

/// Exact `delta(k)`: the minimum of `dist_perm(G, pi) * n / (k * m)` over all
/// k-permutations, with the first minimizer in enumeration order as witness.
pub fn exact_delta_k(g: &Graph, k: usize, budget: u64) -> Result<DeltaEntry> {
    check_normalizable(g)?;
    if k < 2 || k > g.n() {
        return Err(Error::domain(format!("k = {k} outside [2, n = {}]", g.n())));
    }
    check_budget(g.n(), k, budget)?;
    if k == 2 {
        // the scan finds the lexicographically first minimizer as well
        return Ok(delta2_scan(g)?.entry);
    }
    let (dist, witness) = minimize(g, k, u64::MAX).expect("a k-permutation exists for 2 <= k <= n");
    Ok(DeltaEntry::new(g, k, dist, witness, true))
}

/// `dist_perm` of the transposition `(u v)`:
/// `|N(u) \ N(v) \ {v}| + |N(v) \ N(u) \ {u}|`.
pub fn transposition_dist(g: &Graph, u: usize, v: usize) -> u64 {
    let adjacent = u64::from(g.has_edge(u, v));
    let sym = match g.rows() {
        Some(rows) => (and_not_count(rows.row(u), rows.row(v)) + and_not_count(rows.row(v), rows.row(u))) as u64,
        None => {
            let (a, b) = (g.neighbors(u), g.neighbors(v));
            let common = sorted_intersection_len(a, b);
            (a.len() + b.len() - 2 * common) as u64
        }
    };
    sym - 2 * adjacent
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// All transposition distances summarized.
#[derive(Debug, Clone)]
pub struct Delta2Scan {
    pub entry: DeltaEntry,
    pub pairs: u64,
    pub mean_dist: f64,
    /// Mean over all transpositions of `dist * n / (2 m)`.
    pub mean_normalized: f64,
}

pub fn delta2_scan(g: &Graph) -> Result<Delta2Scan> {
    check_normalizable(g)?;
    let n = g.n();
    let rows: Vec<(u64, u64, u32)> = crate::par::map((0..n - 1).collect(), |u| {
        let mut best = (u64::MAX, 0u32);
        let mut total = 0u64;
        for v in u + 1..n {
            let d = transposition_dist(g, u, v);
            total += d;
            if d < best.0 {
                best = (d, v as u32);
            }
        }
        (total, best.0, best.1)
    });
    let mut total = 0u64;
    let mut best = (u64::MAX, 0u32, 0u32);
    for (u, &(t, d, v)) in rows.iter().enumerate() {
        total += t;
        if d < best.0 {
            best = (d, u as u32, v);
        }
    }
    let pairs = (n * (n - 1) / 2) as u64;
    let mean_dist = total as f64 / pairs as f64;
    let witness = Permutation::transposition(n, best.1, best.2);
    Ok(Delta2Scan {
        entry: DeltaEntry::new(g, 2, best.0, witness, true),
        pairs,
        mean_dist,
        mean_normalized: mean_dist * n as f64 / (2.0 * g.m() as f64),
    })
}

/// `delta(2)` in `O(n^2)` row differences; same result as
/// `exact_delta_k(g, 2, _)`.
pub fn exact_delta_2(g: &Graph) -> Result<DeltaEntry> {
    Ok(delta2_scan(g)?.entry)
}

/// A non-identity automorphism, searching supports of increasing size, or
/// `None` when the graph is asymmetric. Refuses when the enumeration needed
/// exceeds `budget` permutations in total.
pub fn has_nontrivial_automorphism(g: &Graph, budget: u64) -> Result<Option<Permutation>> {
    let mut remaining = budget;
    for k in 2..=g.n() {
        let count = check_budget(g.n(), k, remaining)?;
        remaining -= count;
        if let Some((_, pi)) = minimize(g, k, 1) {
            return Ok(Some(pi));
        }
    }
    Ok(None)
}
