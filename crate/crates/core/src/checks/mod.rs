//! Verifiers for the structural and probabilistic properties of the random
//! graph models: degree concentration, common neighborhoods, density of small
//! sets, coverage and distance expectations, conditional edge probabilities,
//! and the small-support distance bound.
//!
//! Every check returns a [`CheckReport`]. Statistical checks carry their sample
//! count, seed and tolerance, and are deterministic given the seed.

mod density;
mod lemma1;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::generators::{gen_gnp, gen_gnpd, GnpParams, GnpdParams};
use crate::graph::{Graph, VertexSet};
use crate::perm::sample_k_perm;
use crate::rng::{derive_seed, substream};
use crate::search::{heuristic_delta_k, SearchParams};

pub use density::{check_small_set_density, density_certificate, find_dense_connected_set, DEFAULT_NODE_BUDGET};
pub use lemma1::{
    covered_pairs, lemma1_closed_form, lemma1_exhaustive, lemma1_sweep, mc_lemma1_expectation, DistanceExperiment,
    DistanceSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckVerdict {
    Pass,
    Fail,
    StatisticalPass,
    StatisticalFail,
    Inconclusive,
    Skipped,
}

impl CheckVerdict {
    /// Pass, statistical pass, or skipped as degenerate.
    pub fn ok(self) -> bool {
        matches!(self, CheckVerdict::Pass | CheckVerdict::StatisticalPass | CheckVerdict::Skipped)
    }

    pub fn failed(self) -> bool {
        matches!(self, CheckVerdict::Fail | CheckVerdict::StatisticalFail)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CheckVerdict::Pass => "pass",
            CheckVerdict::Fail => "fail",
            CheckVerdict::StatisticalPass => "statistical-pass",
            CheckVerdict::StatisticalFail => "statistical-fail",
            CheckVerdict::Inconclusive => "inconclusive",
            CheckVerdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub verdict: CheckVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub stats: BTreeMap<String, Value>,
    pub tolerance: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub(crate) fn new(check: &str, verdict: CheckVerdict) -> Self {
        CheckReport {
            check: check.to_string(),
            verdict,
            p_value: None,
            stats: BTreeMap::new(),
            tolerance: BTreeMap::new(),
            samples: None,
            seed: None,
            notes: Vec::new(),
        }
    }

    pub(crate) fn stat(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.stats.insert(key.to_string(), value.into());
        self
    }

    pub(crate) fn tol(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.tolerance.insert(key.to_string(), value.into());
        self
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub(crate) fn sampled(mut self, samples: u64, seed: u64) -> Self {
        self.samples = Some(samples);
        self.seed = Some(seed);
        self
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Two-sided normal p-value of `z`.
pub(crate) fn two_sided_p(z: f64) -> f64 {
    if !z.is_finite() {
        return 0.0;
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    2.0 * (1.0 - normal.cdf(z.abs()))
}

/// Verdict of `|observed - expected| <= sigmas * se`; a zero standard error
/// demands equality.
pub(crate) fn z_verdict(observed: f64, expected: f64, se: f64, sigmas: f64) -> (CheckVerdict, Option<f64>) {
    let diff = (observed - expected).abs();
    if se == 0.0 {
        let v = if diff <= 1e-9 { CheckVerdict::Pass } else { CheckVerdict::Fail };
        return (v, None);
    }
    let p = two_sided_p(diff / se);
    let v = if diff <= sigmas * se { CheckVerdict::StatisticalPass } else { CheckVerdict::StatisticalFail };
    (v, Some(p))
}

pub(crate) fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 { values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

/// Average degree against `p n` with tolerance `slack * sqrt(p n)`.
pub fn check_avg_degree(g: &Graph, p: f64, d: usize, slack: f64) -> CheckReport {
    let stats = g.degree_stats();
    let avg = *stats.average.numer() as f64 / *stats.average.denom() as f64;
    let pn = p * g.n() as f64;
    let report = |v| {
        CheckReport::new("avg-degree", v)
            .stat("avg_degree", avg)
            .stat("avg_degree_num", *stats.average.numer())
            .stat("avg_degree_den", *stats.average.denom())
            .stat("min_degree", stats.min)
            .stat("max_degree", stats.max)
            .stat("pn", pn)
            .stat("d", d)
            .tol("slack", slack)
    };
    if pn == 0.0 {
        return report(CheckVerdict::Skipped).note("p n = 0: the deviation scale sqrt(p n) vanishes");
    }
    let bound = slack * pn.sqrt();
    let dev = (avg - pn).abs();
    let verdict = if dev <= bound { CheckVerdict::Pass } else { CheckVerdict::Fail };
    report(verdict).stat("deviation", dev).tol("bound", bound)
}

/// Every two vertices have at most two common neighbors.
pub fn check_common_neighbors(g: &Graph) -> CheckReport {
    let mut max = 0;
    let mut over = 0u64;
    g.for_each_common_neighbor_count(|_, _, c| {
        max = max.max(c);
        over += u64::from(c > 2);
    });
    let verdict = if max <= 2 { CheckVerdict::Pass } else { CheckVerdict::Fail };
    CheckReport::new("common-neighbors", verdict)
        .stat("max_common_neighbors", max)
        .stat("pairs_over_two", over)
        .tol("max_allowed", 2)
}

/// Covered-edge count of `S = {0..k-1}` over repeated `G(n, p)` samples,
/// against its mean `p (C(k,2) + k (n - k))`.
pub fn mc_covered_edges(n: usize, p: f64, k: usize, trials: u64, seed: u64) -> Result<CheckReport> {
    if trials < 1000 {
        return Err(Error::Precondition(format!("at least 1000 trials required, got {trials}")));
    }
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    GnpParams { n, p, seed }.validate()?;
    let subset = VertexSet::new(n, 0..k as u32)?;
    let values: Vec<f64> = crate::par::map((0..trials).collect(), |i| {
        let g = gen_gnp(&GnpParams { n, p, seed: derive_seed(seed, "covered-edges", i) }).expect("validated");
        g.covered_edges(&subset) as f64
    });
    let pairs = (k * k.saturating_sub(1) / 2 + k * (n - k)) as f64;
    let expected = p * pairs;
    let sd_theory = (p * (1.0 - p) * pairs).sqrt();
    let (mean, sd) = mean_sd(&values);
    let se = sd_theory / (trials as f64).sqrt();
    let (verdict, p_value) = z_verdict(mean, expected, se, 4.0);
    let mut r = CheckReport::new("covered-edges", verdict)
        .stat("n", n)
        .stat("k", k)
        .stat("p", p)
        .stat("pairs", pairs)
        .stat("mean", mean)
        .stat("expected", expected)
        .stat("sd", sd)
        .stat("sd_expected", sd_theory)
        .tol("sigmas", 4.0)
        .tol("standard_error", se)
        .sampled(trials, seed);
    r.p_value = p_value;
    Ok(r)
}

/// Estimates `Pr[e in E | F subset E]` in `G(n, p, d)` by rejection and
/// compares it with `[p, p + 2d/(n-1)]` widened by four binomial standard
/// errors. Trial `i` uses the seed derived from `(seed, i)`; sampling stops
/// once `min_conditional` runs satisfy the condition, or at `max_trials`.
pub fn mc_edge_probability(
    model: &GnpdParams,
    condition: &[(u32, u32)],
    edge: (u32, u32),
    min_conditional: u64,
    max_trials: u64,
    seed: u64,
) -> Result<CheckReport> {
    model.validate()?;
    let norm = |(u, v): (u32, u32)| (u.min(v), u.max(v));
    let edge = norm(edge);
    let condition: Vec<(u32, u32)> = condition.iter().copied().map(norm).collect();
    for &(u, v) in condition.iter().chain([&edge]) {
        if u == v || v as usize >= model.n {
            return Err(Error::domain(format!("({u}, {v}) is not a vertex pair for n = {}", model.n)));
        }
    }
    if condition.contains(&edge) {
        return Err(Error::Precondition("the queried edge belongs to the conditioning set".into()));
    }

    const BATCH: u64 = 256;
    let (mut trials, mut conditional, mut hits) = (0u64, 0u64, 0u64);
    'outer: while trials < max_trials && conditional < min_conditional {
        let batch: Vec<u64> = (trials..(trials + BATCH).min(max_trials)).collect();
        let outcomes = crate::par::map(batch, |i| {
            let g = gen_gnpd(&GnpdParams { seed: derive_seed(seed, "edge-probability", i), ..*model })
                .expect("validated");
            let present = |(u, v): (u32, u32)| g.has_edge(u as usize, v as usize);
            (condition.iter().all(|&f| present(f)), present(edge))
        });
        for (cond, hit) in outcomes {
            trials += 1;
            if cond {
                conditional += 1;
                hits += u64::from(hit);
                if conditional >= min_conditional {
                    break 'outer;
                }
            }
        }
    }

    let (n, p, d) = (model.n, model.p, model.d);
    let upper = p + 2.0 * d as f64 / (n as f64 - 1.0);
    let mut r = CheckReport::new("edge-probability", CheckVerdict::Inconclusive)
        .stat("n", n)
        .stat("p", p)
        .stat("d", d)
        .stat("condition", json!(condition))
        .stat("edge", json!(edge))
        .stat("trials", trials)
        .stat("conditional_samples", conditional)
        .stat("hits", hits)
        .tol("lower", p)
        .tol("upper", upper)
        .tol("sigmas", 4.0)
        .sampled(trials, seed);
    if conditional < min_conditional {
        return Ok(r.note(format!(
            "only {conditional} of the required {min_conditional} conditional samples within {max_trials} trials"
        )));
    }
    let q = hits as f64 / conditional as f64;
    let se = (q * (1.0 - q) / conditional as f64).sqrt();
    let w = 4.0 * se;
    let inside = q >= p - w && q <= upper + w;
    r.verdict = if inside { CheckVerdict::StatisticalPass } else { CheckVerdict::StatisticalFail };
    // distance to the nearest violated end, in standard errors
    let excess = (p - q).max(q - upper).max(0.0);
    r.p_value = Some(if excess == 0.0 { 1.0 } else if se == 0.0 { 0.0 } else { two_sided_p(excess / se) });
    Ok(r.stat("estimate", q).tol("standard_error", se).tol("width", w))
}

/// Sampled check that k-permutations map at least `(d - 8) k` edges to
/// non-edges: `samples` uniform k-permutations plus one annealing search for
/// the smallest distance. Records whether the common-neighbor and small-set
/// density properties hold for `g`, on which the bound is conditional.
pub fn check_small_k_bound(
    g: &Graph,
    d: usize,
    k: usize,
    samples: u64,
    seed: u64,
    search: &SearchParams,
) -> Result<CheckReport> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(Error::domain(format!("k = {k} outside [2, n = {n}]")));
    }
    if d <= 8 {
        return Ok(CheckReport::new("small-k-bound", CheckVerdict::Pass)
            .stat("d", d)
            .stat("k", k)
            .note("d <= 8: the bound (d - 8) k is vacuous"));
    }
    let bound = ((d - 8) * k) as u64;
    let dists: Vec<u64> = crate::par::map((0..samples).collect(), |i| {
        let mut rng = substream(seed, "small-k", i);
        let pi = sample_k_perm(n, k, &mut rng).expect("k checked");
        g.dist_perm(&pi).expect("dimensions match")
    });
    let sampled_violations = dists.iter().filter(|&&x| x < bound).count() as u64;
    let sampled_min = dists.iter().copied().min();
    let searched = heuristic_delta_k(g, k, search)?;

    let limit = n / (d * d);
    let cn = check_common_neighbors(g);
    let density = check_small_set_density(g, limit.max(1), DEFAULT_NODE_BUDGET)?;
    let lemma2 = cn.verdict.ok() && density.verdict.ok();

    let violations = sampled_violations + u64::from(searched.dist < bound);
    let verdict = if violations == 0 { CheckVerdict::Pass } else { CheckVerdict::Fail };
    let mut r = CheckReport::new("small-k-bound", verdict)
        .stat("d", d)
        .stat("k", k)
        .stat("bound", bound)
        .stat("sampled_min_dist", sampled_min)
        .stat("sampled_violations", sampled_violations)
        .stat("search_min_dist", searched.dist)
        .stat("search_witness", searched.witness.to_string())
        .stat("violations", violations)
        .stat("lemma2_common_neighbors", cn.verdict.as_str())
        .stat("lemma2_density", density.verdict.as_str())
        .stat("lemma2_holds", lemma2)
        .tol("min_dist", bound)
        .sampled(samples, seed);
    if k > limit {
        r = r.note(format!("k = {k} exceeds n / d^2 = {limit}; the bound is only claimed below that"));
    }
    Ok(r)
}
