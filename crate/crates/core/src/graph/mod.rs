//! Simple undirected labeled graphs and the distance and coverage statistics
//! used by the asymmetry search and the structure checks.
//!
//! Vertices are `0..n`. Adjacency is kept as sorted neighbor lists; for
//! `n <= DENSE_LIMIT` a dense bit matrix is kept alongside for constant-time
//! edge queries and popcount-based row differences.

mod bits;
mod io;

use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::Rational;

pub(crate) use bits::{and_not_count, BitRows};
pub use io::{parse_edge_list, read_edge_list, write_edge_list};

/// Largest vertex count for which the dense adjacency matrix is built.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Clone)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<u32>>,
    rows: Option<BitRows>,
    /// Edges added by a degree-repair pass, sorted, `u < v`.
    aux: Vec<(u32, u32)>,
}

/// Identifies the graph a profile was computed for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    pub n: usize,
    pub m: usize,
    pub hash: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeStats {
    pub min: usize,
    pub max: usize,
    /// Exactly `2m / n`.
    pub average: Rational,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range endpoints. Edge orientation does not matter.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::domain(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop at vertex {u}")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u.min(w[0] as usize), u.max(w[0] as usize));
                return Err(Error::domain(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self::from_sorted_adj(adj, Vec::new()))
    }

    /// `adj` must be symmetric, loop-free, with each list sorted and
    /// duplicate-free.
    pub(crate) fn from_sorted_adj(adj: Vec<Vec<u32>>, mut aux: Vec<(u32, u32)>) -> Self {
        let n = adj.len();
        let m = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let rows = (n <= DENSE_LIMIT).then(|| {
            let mut rows = BitRows::new(n);
            for (u, list) in adj.iter().enumerate() {
                for &v in list {
                    rows.set(u, v as usize);
                }
            }
            rows
        });
        aux.sort_unstable();
        Graph { n, m, adj, rows, aux }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_adj(vec![Vec::new(); n], Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n as u32)
            .map(|u| (0..n as u32).filter(|&v| v != u).collect())
            .collect();
        Self::from_sorted_adj(adj, Vec::new())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let n32 = n as u32;
        Self::new(n, (0..n32).map(|i| (i, (i + 1) % n32))).expect("valid cycle")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n as u32).map(|i| (i - 1, i))).expect("valid path")
    }

    /// `K_{1,leaves}` with the center at vertex 0.
    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves as u32).map(|i| (0, i))).expect("valid star")
    }

    /// Attaches auxiliary-edge metadata. Every auxiliary edge must be an edge.
    pub fn with_aux(mut self, aux: Vec<(u32, u32)>) -> Result<Self> {
        let mut aux: Vec<_> = aux.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        aux.sort_unstable();
        aux.dedup();
        if let Some(&(u, v)) = aux.iter().find(|&&(u, v)| !self.has_edge(u as usize, v as usize)) {
            return Err(Error::domain(format!("auxiliary pair ({u}, {v}) is not an edge")));
        }
        self.aux = aux;
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match &self.rows {
            Some(rows) => rows.get(u, v),
            None => self.adj[u].binary_search(&(v as u32)).is_ok(),
        }
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub(crate) fn rows(&self) -> Option<&BitRows> {
        self.rows.as_ref()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u32;
            list.iter().copied().filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    pub fn aux_edges(&self) -> &[(u32, u32)] {
        &self.aux
    }

    pub fn is_aux(&self, u: u32, v: u32) -> bool {
        self.aux.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.n != other {
            return Err(Error::Dimension { left: self.n, right: other });
        }
        Ok(())
    }

    /// Half the Hamming distance between the adjacency matrices, i.e.
    /// `|E(G) △ E(H)| / 2`.
    pub fn dist(&self, other: &Graph) -> Result<Rational> {
        self.check_dim(other.n)?;
        let only_self = self.edges().filter(|&(u, v)| !other.has_edge(u as usize, v as usize)).count();
        let only_other = other.edges().filter(|&(u, v)| !self.has_edge(u as usize, v as usize)).count();
        Ok(Rational::new((only_self + only_other) as u64, 2))
    }

    /// Number of edges mapped to non-edges by `pi`; equals
    /// `dist(G, G_pi)` since both graphs have `m` edges.
    pub fn dist_perm(&self, pi: &Permutation) -> Result<u64> {
        self.check_dim(pi.n())?;
        let mut count = 0u64;
        for &s in pi.support_slice() {
            let s = s as usize;
            let ps = pi.image(s);
            for &w in &self.adj[s] {
                let w = w as usize;
                // count an edge with both ends moved once, from its larger end
                if w < s && pi.moves(w) {
                    continue;
                }
                if !self.has_edge(ps, pi.image(w)) {
                    count += 1;
                }
            }
        }
        Ok(count)
    }

    /// `G_pi`: the edge set `{ {pi(u), pi(v)} : {u, v} in E }`.
    pub fn apply_perm(&self, pi: &Permutation) -> Result<Graph> {
        self.check_dim(pi.n())?;
        let map = |(u, v): (u32, u32)| {
            let (a, b) = (pi.image(u as usize) as u32, pi.image(v as usize) as u32);
            (a.min(b), a.max(b))
        };
        let mut adj = vec![Vec::new(); self.n];
        for (a, b) in self.edges().map(map) {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        let aux = self.aux.iter().copied().map(map).collect();
        Ok(Self::from_sorted_adj(adj, aux))
    }

    /// `m_S = |E(S)| + |E(S, V \ S)|`.
    pub fn covered_edges(&self, s: &VertexSet) -> usize {
        let mask = s.mask();
        s.iter()
            .map(|u| {
                self.adj[u as usize]
                    .iter()
                    // edges inside S are seen from both ends; keep one
                    .filter(|&&w| !mask[w as usize] || w > u)
                    .count()
            })
            .sum()
    }

    /// `|E(S)|`.
    pub fn induced_edge_count(&self, s: &VertexSet) -> usize {
        let mask = s.mask();
        s.iter()
            .map(|u| self.adj[u as usize].iter().filter(|&&w| w > u && mask[w as usize]).count())
            .sum()
    }

    pub fn degree_stats(&self) -> DegreeStats {
        assert!(self.n >= 1, "degree statistics need at least one vertex");
        let degrees = self.adj.iter().map(Vec::len);
        DegreeStats {
            min: degrees.clone().min().unwrap_or(0),
            max: degrees.max().unwrap_or(0),
            average: Rational::new(2 * self.m as u64, self.n as u64),
        }
    }

    /// Calls `f(u, x, c)` for every pair `u < x` with `c >= 1` common
    /// neighbors. Cost is `sum_w deg(w)^2`.
    pub fn for_each_common_neighbor_count(&self, mut f: impl FnMut(u32, u32, u32)) {
        let mut counts = vec![0u32; self.n];
        let mut touched = Vec::new();
        for u in 0..self.n {
            for &w in &self.adj[u] {
                for &x in &self.adj[w as usize] {
                    if x as usize > u {
                        if counts[x as usize] == 0 {
                            touched.push(x);
                        }
                        counts[x as usize] += 1;
                    }
                }
            }
            for x in touched.drain(..) {
                f(u as u32, x, counts[x as usize]);
                counts[x as usize] = 0;
            }
        }
    }

    /// Largest `|N(u) ∩ N(v)|` over vertex pairs, by two-path counting.
    pub fn max_common_neighbors(&self) -> usize {
        let mut best = 0;
        self.for_each_common_neighbor_count(|_, _, c| best = best.max(c));
        best as usize
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let text = write_edge_list(self, false);
        let digest = Sha256::digest(text.as_bytes());
        Fingerprint { n: self.n, m: self.m, hash: format!("{digest:x}") }
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// A subset of `0..n`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    n: usize,
    members: Vec<u32>,
}

impl VertexSet {
    pub fn new<I: IntoIterator<Item = u32>>(n: usize, members: I) -> Result<Self> {
        let mut members: Vec<u32> = members.into_iter().collect();
        members.sort_unstable();
        if let Some(&v) = members.iter().find(|&&v| v as usize >= n) {
            return Err(Error::domain(format!("vertex {v} out of range for n = {n}")));
        }
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::domain(format!("vertex {} listed twice", w[0])));
        }
        Ok(VertexSet { n, members })
    }

    pub(crate) fn from_sorted(n: usize, members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        VertexSet { n, members }
    }

    pub fn empty(n: usize) -> Self {
        VertexSet { n, members: Vec::new() }
    }

    pub fn all(n: usize) -> Self {
        VertexSet { n, members: (0..n as u32).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.members
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &v in &self.members {
            mask[v as usize] = true;
        }
        mask
    }
}

/// `dist(G, H)` as a free function.
pub fn dist(g: &Graph, h: &Graph) -> Result<Rational> {
    g.dist(h)
}
