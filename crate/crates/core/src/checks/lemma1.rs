//! Expected distance of a permuted random edge placement.
//!
//! Fix `S` and a permutation `pi` moving exactly `S`. The pairs covered by `S`
//! form a set `P` that `pi` maps onto itself; `f` of them are fixed as pairs
//! (the 2-cycles of `pi`). Placing `m_S` edges uniformly among `P` and counting
//! `X`, the edges sent to non-edges, gives
//!
//! ```text
//! E[X] = m_S * (|P| - f) / |P| * (|P| - m_S) / (|P| - 1)
//! ```

use num_traits::{ToPrimitive, Zero};
use rand::seq::index::sample;
use serde::Serialize;
use serde_json::json;

use super::{mean_sd, z_verdict, CheckReport, CheckVerdict};
use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::perm::{binomial, Combinations, Derangements, Permutation};
use crate::rng::substream;
use crate::Rational;

/// Largest placement count for which the exhaustive oracle runs.
const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceSpec {
    pub n: usize,
    pub subset: VertexSet,
    pub m_s: usize,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceExperiment {
    pub n: usize,
    pub k: usize,
    pub m_s: usize,
    pub f: usize,
    pub p_size: usize,
    pub trials: u64,
    pub empirical_mean: f64,
    pub closed_form_num: u64,
    pub closed_form_den: u64,
}

/// Pairs with at least one endpoint in `subset`, in lexicographic order.
pub fn covered_pairs(n: usize, subset: &VertexSet) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    for u in 0..n as u32 {
        let u_in = subset.contains(u);
        for v in u + 1..n as u32 {
            if u_in || subset.contains(v) {
                pairs.push((u, v));
            }
        }
    }
    pairs
}

/// `m_s (p - f)/p * (p - m_s)/(p - 1)`, taken as 0 when `p <= 1`.
pub fn lemma1_closed_form(p_size: usize, f: usize, m_s: usize) -> Rational {
    if p_size <= 1 || m_s > p_size {
        return Rational::zero();
    }
    let p = p_size as u64;
    Rational::new(m_s as u64 * (p - f as u64), p) * Rational::new(p - m_s as u64, p - 1)
}

/// The action of `pi` on the covered pairs, as an index permutation.
fn pair_action(pi: &Permutation, pairs: &[(u32, u32)]) -> Vec<usize> {
    pairs
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (pi.image(u as usize) as u32, pi.image(v as usize) as u32);
            pairs.binary_search(&(a.min(b), a.max(b))).expect("pi preserves the covered pairs")
        })
        .collect()
}

fn displaced(action: &[usize], placed: &[bool], edges: impl Iterator<Item = usize>) -> u64 {
    edges.filter(|&i| !placed[action[i]]).count() as u64
}

fn check_hypothesis(n: usize, pi: &Permutation, m_s: usize) -> Result<Vec<(u32, u32)>> {
    if pi.n() != n {
        return Err(Error::Dimension { left: n, right: pi.n() });
    }
    let pairs = covered_pairs(n, &pi.support());
    if m_s > pairs.len() {
        return Err(Error::Precondition(format!("m_S = {m_s} exceeds |P| = {}", pairs.len())));
    }
    Ok(pairs)
}

/// Mean of `X` over every placement of `m_s` edges among the pairs covered
/// by the support of `pi`.
pub fn lemma1_exhaustive(n: usize, pi: &Permutation, m_s: usize) -> Result<Rational> {
    let pairs = check_hypothesis(n, pi, m_s)?;
    let count = binomial(pairs.len(), m_s);
    let budget_ok = count.to_u64().is_some_and(|c| c <= EXHAUSTIVE_LIMIT);
    if !budget_ok {
        return Err(Error::BudgetExceeded { count, budget: EXHAUSTIVE_LIMIT });
    }
    let action = pair_action(pi, &pairs);
    let mut placed = vec![false; pairs.len()];
    let (mut total, mut placements) = (0u64, 0u64);
    let mut combos = Combinations::new(pairs.len(), m_s, None);
    while let Some(chosen) = combos.current() {
        chosen.iter().for_each(|&i| placed[i as usize] = true);
        total += displaced(&action, &placed, chosen.iter().map(|&i| i as usize));
        chosen.iter().for_each(|&i| placed[i as usize] = false);
        placements += 1;
        combos.advance();
    }
    Ok(Rational::new(total, placements))
}

/// Monte Carlo estimate of `E[X]` against the closed form, plus the exact
/// oracle when the placement space is small.
pub fn mc_lemma1_expectation(spec: &DistanceSpec, pi: &Permutation, seed: u64) -> Result<CheckReport> {
    if spec.subset.n() != spec.n {
        return Err(Error::Dimension { left: spec.n, right: spec.subset.n() });
    }
    if pi.support() != spec.subset {
        return Err(Error::Precondition("pi must move exactly the vertices of S".into()));
    }
    if spec.trials < 2 {
        return Err(Error::Precondition("at least two trials required".into()));
    }
    let pairs = check_hypothesis(spec.n, pi, spec.m_s)?;
    let action = pair_action(pi, &pairs);
    let (p_size, f, m_s) = (pairs.len(), pi.pair_fixpoints(), spec.m_s);

    let values: Vec<f64> = crate::par::map((0..spec.trials).collect(), |i| {
        let mut rng = substream(seed, "lemma1", i);
        let chosen = sample(&mut rng, p_size, m_s).into_vec();
        let mut placed = vec![false; p_size];
        chosen.iter().for_each(|&j| placed[j] = true);
        displaced(&action, &placed, chosen.into_iter()) as f64
    });
    let (mean, sd) = mean_sd(&values);
    let closed = lemma1_closed_form(p_size, f, m_s);
    let closed_f = *closed.numer() as f64 / *closed.denom() as f64;
    let se = sd / (spec.trials as f64).sqrt();
    let (mut verdict, p_value) = z_verdict(mean, closed_f, se, 4.0);

    let experiment = DistanceExperiment {
        n: spec.n,
        k: spec.subset.len(),
        m_s,
        f,
        p_size,
        trials: spec.trials,
        empirical_mean: mean,
        closed_form_num: *closed.numer(),
        closed_form_den: *closed.denom(),
    };
    let mut report = CheckReport::new("lemma1-expectation", verdict)
        .stat("experiment", serde_json::to_value(&experiment).expect("serializable"))
        .stat("sd", sd)
        .tol("sigmas", 4.0)
        .tol("standard_error", se)
        .sampled(spec.trials, seed);
    match lemma1_exhaustive(spec.n, pi, m_s) {
        Ok(oracle) => {
            let agrees = oracle == closed;
            report = report.stat("oracle_num", *oracle.numer()).stat("oracle_den", *oracle.denom());
            report = report.stat("oracle_agrees", agrees);
            if !agrees {
                verdict = CheckVerdict::Fail;
            }
        }
        Err(Error::BudgetExceeded { .. }) => {
            report = report.note("placement space too large for the exhaustive oracle");
        }
        Err(e) => return Err(e),
    }
    report.verdict = verdict;
    report.p_value = p_value;
    Ok(report)
}

/// Exhaustive agreement of oracle and closed form for every `(n, k)` with
/// `|P| <= max_p`, every derangement of `S = {0..k-1}` and every `m_S`. Also
/// checks the lower bound `E[X] >= (n-2)/(n-1) * m_S (|P| - m_S)/|P|` and
/// counts cases where `f <= |P|/(n+1)` does not hold.
pub fn lemma1_sweep(max_p: usize) -> Result<CheckReport> {
    let (mut cases, mut mismatches, mut bound_failures, mut f_bound_failures) = (0u64, 0u64, 0u64, 0u64);
    let mut grid = Vec::new();
    let mut first_mismatch = None;
    for n in 2.. {
        // the smallest |P| for this n, at k = 1, exceeds max_p from here on
        if n - 1 > max_p {
            break;
        }
        for k in 2..=n {
            let p_size = k * (k - 1) / 2 + k * (n - k);
            if p_size > max_p {
                continue;
            }
            grid.push(json!([n, k]));
            let subset = VertexSet::new(n, 0..k as u32)?;
            for images in Derangements::new(k) {
                let mut mapping: Vec<u32> = (0..n as u32).collect();
                for (i, &img) in images.iter().enumerate() {
                    mapping[i] = img as u32;
                }
                let pi = Permutation::from_mapping(mapping)?;
                debug_assert_eq!(pi.support(), subset);
                let f = pi.pair_fixpoints();
                if (f * (n + 1)) > p_size {
                    f_bound_failures += 1;
                }
                for m_s in 0..=p_size {
                    cases += 1;
                    let closed = lemma1_closed_form(p_size, f, m_s);
                    let oracle = lemma1_exhaustive(n, &pi, m_s)?;
                    if oracle != closed {
                        mismatches += 1;
                        first_mismatch.get_or_insert_with(|| json!({"n": n, "pi": pi.to_string(), "m_s": m_s}));
                    }
                    let lower = Rational::new((n - 2) as u64, (n - 1) as u64)
                        * Rational::new((m_s * (p_size - m_s)) as u64, p_size as u64);
                    if closed < lower {
                        bound_failures += 1;
                    }
                }
            }
        }
    }
    let verdict = if mismatches == 0 && bound_failures == 0 { CheckVerdict::Pass } else { CheckVerdict::Fail };
    let mut report = CheckReport::new("lemma1-sweep", verdict)
        .stat("cases", cases)
        .stat("grid", grid)
        .stat("oracle_mismatches", mismatches)
        .stat("lower_bound_failures", bound_failures)
        .stat("f_bound_failures", f_bound_failures)
        .tol("max_p", max_p)
        .tol("arithmetic", "exact");
    if let Some(m) = first_mismatch {
        report = report.stat("first_mismatch", m);
    }
    if f_bound_failures > 0 {
        report = report.note(
            "f <= |P|/(n+1) fails for some permutations with k >= n-1; the lower bound on E[X] holds regardless",
        );
    }
    Ok(report)
}
