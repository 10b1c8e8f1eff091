//! Simulated annealing over k-permutations, used to upper-bound `delta(k)`
//! when exhaustive enumeration is out of budget.
//!
//! The state is a permutation with support size exactly `k`. Moves:
//!
//! * exchange: a support vertex leaves the support and an outside vertex
//!   takes its place in its cycle;
//! * recompose: two support vertices swap images;
//! * rotate: three support vertices cycle their images.
//!
//! Moves that would create a fixed point are rejected before evaluation. The
//! objective is `dist_perm`; a move is scored by recounting only edges incident
//! to the (at most three) vertices whose image changed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_normalizable, DeltaEntry};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::perm::{sample_k_perm, Permutation};
use crate::rng::{substream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub restarts: u32,
    pub steps: u32,
    /// Geometric factor applied to the temperature after every step.
    pub cooling: f64,
    /// Random moves used to calibrate the initial temperature.
    pub probe_steps: u32,
    /// Target mean acceptance probability of uphill probe moves.
    pub probe_accept: f64,
    pub seed: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams { restarts: 32, steps: 20_000, cooling: 0.999, probe_steps: 100, probe_accept: 0.5, seed: 0 }
    }
}

const NONE: u32 = u32::MAX;

struct State<'a> {
    g: &'a Graph,
    img: Vec<u32>,
    pre: Vec<u32>,
    support: Vec<u32>,
    outside: Vec<u32>,
    /// Index of a vertex within `support` or `outside`.
    slot: Vec<u32>,
    cost: u64,
}

#[derive(Clone, Copy)]
enum Move {
    /// `(s, t)`: `s` leaves the support, `t` joins it.
    Exchange(u32, u32),
    Recompose(u32, u32),
    Rotate(u32, u32, u32),
}

struct Pending {
    changed: [u32; 3],
    len: usize,
    old: [u32; 3],
}

impl<'a> State<'a> {
    fn new(g: &'a Graph, pi: &Permutation) -> Self {
        let n = g.n();
        let img = pi.mapping().to_vec();
        let mut pre = vec![0; n];
        for (v, &x) in img.iter().enumerate() {
            pre[x as usize] = v as u32;
        }
        let mut slot = vec![NONE; n];
        let (mut support, mut outside) = (Vec::new(), Vec::new());
        for v in 0..n as u32 {
            let list = if img[v as usize] != v { &mut support } else { &mut outside };
            slot[v as usize] = list.len() as u32;
            list.push(v);
        }
        let cost = g.dist_perm(pi).expect("dimensions match");
        State { g, img, pre, support, outside, slot, cost }
    }

    /// Edges incident to `changed` mapped to non-edges, each counted once.
    fn incident_cost(&self, changed: &[u32]) -> u64 {
        let mut count = 0;
        for &x in changed {
            let ix = self.img[x as usize] as usize;
            for &w in self.g.neighbors(x as usize) {
                if w < x && changed.contains(&w) {
                    continue;
                }
                if !self.g.has_edge(ix, self.img[w as usize] as usize) {
                    count += 1;
                }
            }
        }
        count
    }

    fn propose<R: Rng>(&self, rng: &mut R) -> Option<Move> {
        let k = self.support.len();
        let can_exchange = !self.outside.is_empty();
        let can_permute = k >= 3;
        let kind = match (can_exchange, can_permute) {
            (false, false) => return None,
            (true, false) => 0,
            (false, true) => rng.random_range(1..3),
            (true, true) => rng.random_range(0..3),
        };
        let pick = |rng: &mut R| self.support[rng.random_range(0..k)];
        match kind {
            0 => {
                let t = self.outside[rng.random_range(0..self.outside.len())];
                Some(Move::Exchange(pick(rng), t))
            }
            1 => {
                let a = pick(rng);
                let b = pick(rng);
                let ok = a != b && self.img[b as usize] != a && self.img[a as usize] != b;
                ok.then_some(Move::Recompose(a, b))
            }
            _ => {
                let (a, b, c) = (pick(rng), pick(rng), pick(rng));
                let (ia, ib, ic) = (self.img[a as usize], self.img[b as usize], self.img[c as usize]);
                let ok = a != b && b != c && a != c && ib != a && ic != b && ia != c;
                ok.then_some(Move::Rotate(a, b, c))
            }
        }
    }

    /// Applies the image changes of `mv`, returning what is needed to undo
    /// them and the change in cost.
    fn apply(&mut self, mv: Move) -> (Pending, i64) {
        let (changed, new_imgs, len) = match mv {
            Move::Exchange(s, t) => {
                let a = self.pre[s as usize];
                let b = self.img[s as usize];
                ([a, t, s], [t, b, s], 3)
            }
            Move::Recompose(a, b) => ([a, b, 0], [self.img[b as usize], self.img[a as usize], 0], 2),
            Move::Rotate(a, b, c) => {
                let (ia, ib, ic) = (self.img[a as usize], self.img[b as usize], self.img[c as usize]);
                ([a, b, c], [ib, ic, ia], 3)
            }
        };
        let before = self.incident_cost(&changed[..len]);
        let mut old = [0; 3];
        for i in 0..len {
            old[i] = self.img[changed[i] as usize];
            self.img[changed[i] as usize] = new_imgs[i];
        }
        for i in 0..len {
            self.pre[new_imgs[i] as usize] = changed[i];
        }
        let after = self.incident_cost(&changed[..len]);
        (Pending { changed, len, old }, after as i64 - before as i64)
    }

    fn revert(&mut self, p: &Pending) {
        for i in 0..p.len {
            self.img[p.changed[i] as usize] = p.old[i];
        }
        for i in 0..p.len {
            self.pre[p.old[i] as usize] = p.changed[i];
        }
    }

    fn commit(&mut self, mv: Move, delta: i64) {
        self.cost = (self.cost as i64 + delta) as u64;
        if let Move::Exchange(s, t) = mv {
            let (ss, ts) = (self.slot[s as usize], self.slot[t as usize]);
            self.support[ss as usize] = t;
            self.outside[ts as usize] = s;
            self.slot[t as usize] = ss;
            self.slot[s as usize] = ts;
        }
    }
}

/// Temperature at which uphill probe moves are accepted with mean
/// probability `target`.
fn calibrate_temperature(uphill: &[f64], target: f64) -> f64 {
    if uphill.is_empty() {
        return 1.0;
    }
    let accept = |t: f64| uphill.iter().map(|d| (-d / t).exp()).sum::<f64>() / uphill.len() as f64;
    let (mut lo, mut hi) = (1e-6_f64, 1e9_f64);
    for _ in 0..100 {
        let mid = (lo * hi).sqrt();
        if accept(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn run_restart(g: &Graph, k: usize, params: &SearchParams, restart: u32) -> (u64, Vec<u32>) {
    let mut rng: Stream = substream(params.seed, "anneal", ((k as u64) << 32) | restart as u64);
    let start = sample_k_perm(g.n(), k, &mut rng).expect("2 <= k <= n");
    let mut state = State::new(g, &start);

    let mut uphill = Vec::new();
    for _ in 0..params.probe_steps {
        if let Some(mv) = state.propose(&mut rng) {
            let (pending, delta) = state.apply(mv);
            state.revert(&pending);
            if delta > 0 {
                uphill.push(delta as f64);
            }
        }
    }
    let mut temperature = calibrate_temperature(&uphill, params.probe_accept);

    let mut best = (state.cost, state.img.clone());
    for _ in 0..params.steps {
        if best.0 == 0 {
            break;
        }
        if let Some(mv) = state.propose(&mut rng) {
            let (pending, delta) = state.apply(mv);
            let accept = delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temperature).exp();
            if accept {
                state.commit(mv, delta);
                if state.cost < best.0 {
                    best.0 = state.cost;
                    best.1.copy_from_slice(&state.img);
                }
            } else {
                state.revert(&pending);
            }
        }
        temperature *= params.cooling;
    }
    best
}

/// Best k-permutation found by multi-restart annealing. The returned delta is
/// attained by its witness, so it upper-bounds the exact `delta(k)`.
pub fn heuristic_delta_k(g: &Graph, k: usize, params: &SearchParams) -> Result<DeltaEntry> {
    check_normalizable(g)?;
    if k < 2 || k > g.n() {
        return Err(Error::domain(format!("k = {k} outside [2, n = {}]", g.n())));
    }
    if params.restarts == 0 {
        return Err(Error::domain("at least one restart is required"));
    }
    let restarts: Vec<u32> = (0..params.restarts).collect();
    let results = crate::par::map(restarts, |r| run_restart(g, k, params, r));
    let (dist, mapping) = results
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one restart");
    let witness = Permutation::from_mapping_unchecked(mapping);
    debug_assert_eq!(witness.k(), k);
    debug_assert_eq!(g.dist_perm(&witness).unwrap(), dist);
    Ok(DeltaEntry::new(g, k, dist, witness, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_gnp, GnpParams};

    #[test]
    fn incremental_cost_tracks_full_recount() {
        let g = gen_gnp(&GnpParams { n: 30, p: 0.3, seed: 5 }).unwrap();
        let mut rng = substream(1, "t", 0);
        for k in [2, 3, 7, 30] {
            let start = sample_k_perm(30, k, &mut rng).unwrap();
            let mut state = State::new(&g, &start);
            for _ in 0..2000 {
                let Some(mv) = state.propose(&mut rng) else { continue };
                let (pending, delta) = state.apply(mv);
                if rng.random::<bool>() {
                    state.commit(mv, delta);
                } else {
                    state.revert(&pending);
                }
                let pi = Permutation::from_mapping(state.img.clone()).unwrap();
                assert_eq!(pi.k(), k);
                assert_eq!(g.dist_perm(&pi).unwrap(), state.cost);
                assert!(state.support.iter().all(|&s| pi.moves(s as usize)));
                assert!(state.outside.iter().all(|&s| !pi.moves(s as usize)));
                assert!((0..30).all(|v| state.pre[state.img[v] as usize] == v as u32));
            }
        }
    }

    #[test]
    fn finds_rotation_of_cycle() {
        let c8 = Graph::cycle(8);
        let e = heuristic_delta_k(&c8, 8, &SearchParams::default()).unwrap();
        assert_eq!(e.dist, 0);
        assert!(!e.exact);
    }

    #[test]
    fn deterministic_given_seed() {
        let g = gen_gnp(&GnpParams { n: 40, p: 0.2, seed: 2 }).unwrap();
        let params = SearchParams { restarts: 4, steps: 2000, ..Default::default() };
        let a = heuristic_delta_k(&g, 10, &params).unwrap();
        let b = heuristic_delta_k(&g, 10, &params).unwrap();
        assert_eq!((a.dist, &a.witness), (b.dist, &b.witness));
    }

    #[test]
    fn two_of_two_has_single_candidate() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let e = heuristic_delta_k(&g, 2, &SearchParams::default()).unwrap();
        assert_eq!(e.dist, 0);
    }

    #[test]
    fn calibration_hits_target() {
        let t = calibrate_temperature(&[1.0, 2.0, 3.0], 0.5);
        let mean = [1.0f64, 2.0, 3.0].iter().map(|d| (-d / t).exp()).sum::<f64>() / 3.0;
        assert!((mean - 0.5).abs() < 1e-6);
    }
}
