//! Seeded samplers for `G(n, p)` and the degree-repaired `G(n, p, d)` model.
//!
//! The `G(n, p)` phase reads one uniform draw per vertex pair, pairs in
//! lexicographic order, from substream `("gnp", 0)`. The repair pass of
//! `G(n, p, d)` visits vertices in ascending order; vertex `i` draws from its
//! own substream `("aux", i)`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnpParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnpdParams {
    pub n: usize,
    pub p: f64,
    pub d: usize,
    pub seed: u64,
}

impl GnpParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("n must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::domain(format!("p = {} is not a probability", self.p)));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::domain("n too large"));
        }
        Ok(())
    }
}

impl GnpdParams {
    /// Degree floor defaulting to `ceil(p (n - 1))`.
    pub fn with_default_d(n: usize, p: f64, seed: u64) -> Self {
        GnpdParams { n, p, d: default_degree(n, p), seed }
    }

    pub fn gnp(&self) -> GnpParams {
        GnpParams { n: self.n, p: self.p, seed: self.seed }
    }

    pub fn validate(&self) -> Result<()> {
        self.gnp().validate()?;
        if self.d < 1 || self.d > self.n - 1 {
            return Err(Error::domain(format!("d = {} must lie in [1, n - 1] for n = {}", self.d, self.n)));
        }
        Ok(())
    }
}

/// `ceil(p (n - 1))`, clamped to `[1, n - 1]` when `n >= 2`.
pub fn default_degree(n: usize, p: f64) -> usize {
    let d = (p * (n.saturating_sub(1)) as f64).ceil() as usize;
    d.clamp(1, n.saturating_sub(1).max(1))
}

fn sample_gnp_adj(params: &GnpParams) -> Vec<Vec<u32>> {
    let n = params.n;
    let mut rng = substream(params.seed, "gnp", 0);
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < params.p {
                adj[u].push(v as u32);
                adj[v].push(u as u32);
            }
        }
    }
    adj
}

/// Every pair independently with probability `p`.
pub fn gen_gnp(params: &GnpParams) -> Result<Graph> {
    params.validate()?;
    Ok(Graph::from_sorted_adj(sample_gnp_adj(params), Vec::new()))
}

/// `G(n, p)` followed by the repair pass: each vertex `i` (ascending) whose
/// current degree `d_i` is below `d` is joined to a uniform `(d - d_i)`-subset
/// of its current non-neighbors. Current degree includes auxiliary edges added
/// at earlier vertices. The added edges are recorded as auxiliary.
pub fn gen_gnpd(params: &GnpdParams) -> Result<Graph> {
    params.validate()?;
    let n = params.n;
    let mut adj = sample_gnp_adj(&params.gnp());
    let mut aux = Vec::new();
    let mut is_neighbor = vec![false; n];
    let mut candidates = Vec::with_capacity(n);
    for i in 0..n {
        let deficit = params.d.saturating_sub(adj[i].len());
        if deficit == 0 {
            continue;
        }
        for &w in &adj[i] {
            is_neighbor[w as usize] = true;
        }
        candidates.clear();
        candidates.extend((0..n as u32).filter(|&w| w as usize != i && !is_neighbor[w as usize]));
        for &w in &adj[i] {
            is_neighbor[w as usize] = false;
        }
        let mut rng = substream(params.seed, "aux", i as u64);
        let (chosen, _) = candidates.partial_shuffle(&mut rng, deficit);
        for &w in chosen.iter() {
            adj[i].push(w);
            adj[w as usize].push(i as u32);
            aux.push((w.min(i as u32), w.max(i as u32)));
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Ok(Graph::from_sorted_adj(adj, aux))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::write_edge_list;

    #[test]
    fn gnp_extremes() {
        assert_eq!(gen_gnp(&GnpParams { n: 7, p: 0.0, seed: 1 }).unwrap(), Graph::empty(7));
        assert_eq!(gen_gnp(&GnpParams { n: 7, p: 1.0, seed: 1 }).unwrap(), Graph::complete(7));
        assert!(gen_gnp(&GnpParams { n: 7, p: 1.5, seed: 1 }).is_err());
        assert!(gen_gnp(&GnpParams { n: 0, p: 0.5, seed: 1 }).is_err());
    }

    #[test]
    fn gnpd_forced_complete() {
        let g = gen_gnpd(&GnpdParams { n: 6, p: 0.0, d: 5, seed: 9 }).unwrap();
        assert_eq!(g, Graph::complete(6));
        assert_eq!(g.aux_edges().len(), 15);
        let full = gen_gnpd(&GnpdParams { n: 6, p: 1.0, d: 3, seed: 9 }).unwrap();
        assert_eq!(full, Graph::complete(6));
        assert!(full.aux_edges().is_empty());
    }

    #[test]
    fn gnpd_small_degree_floor() {
        for seed in 0..200 {
            let g = gen_gnpd(&GnpdParams { n: 5, p: 0.0, d: 2, seed }).unwrap();
            assert!(g.degree_stats().min >= 2);
            assert!((5..=10).contains(&g.m()), "m = {}", g.m());
            assert_eq!(g.aux_edges().len(), g.m());
        }
    }

    #[test]
    fn gnpd_min_degree_and_determinism() {
        for seed in 0..20 {
            let params = GnpdParams { n: 60, p: 0.05, d: 4, seed };
            let a = gen_gnpd(&params).unwrap();
            let b = gen_gnpd(&params).unwrap();
            assert!(a.degree_stats().min >= 4);
            assert_eq!(write_edge_list(&a, true), write_edge_list(&b, true));
            // the G(n, p) part comes from the same seed stream
            let base = gen_gnp(&params.gnp()).unwrap();
            assert!(base.edges().all(|(u, v)| a.has_edge(u as usize, v as usize) && !a.is_aux(u, v)));
            assert_eq!(base.m() + a.aux_edges().len(), a.m());
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(GnpdParams { n: 5, p: 0.1, d: 5, seed: 0 }.validate().is_err());
        assert!(GnpdParams { n: 5, p: 0.1, d: 0, seed: 0 }.validate().is_err());
        assert_eq!(default_degree(5000, 20.0 / 5000.0), 20);
        assert_eq!(default_degree(10, 0.0), 1);
    }
}
