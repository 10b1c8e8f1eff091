//! WebAssembly bindings for the browser demo in `www/`. Every export returns a
//! JSON string; errors come back as `{"error": "..."}`.

use asym_core::checks::{mc_lemma1_expectation, DistanceSpec};
use asym_core::generators::{gen_gnp, GnpParams};
use asym_core::perm::Permutation;
use asym_core::search::{profile_over, transposition_dist, SearchParams};
use asym_core::Rational;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn ratio(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn respond(result: Result<Value, asym_core::Error>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Profile of a `G(n, p)` sample: exact where `budget` allows, annealing
/// with `steps` steps per restart elsewhere.
#[wasm_bindgen]
pub fn gnp_profile(n: usize, p: f64, seed: u64, budget: u64, steps: u32) -> String {
    respond((|| {
        let g = gen_gnp(&GnpParams { n, p, seed })?;
        let search = SearchParams { restarts: 4, steps, seed, ..Default::default() };
        let ks: Vec<usize> = (2..=n).collect();
        let profile = profile_over(&g, &ks, budget, &search)?;
        let entries: Vec<Value> = profile
            .entries()
            .map(|e| {
                json!({
                    "k": e.k,
                    "delta": ratio(e.delta),
                    "delta_text": e.delta.to_string(),
                    "witness": e.witness.to_string(),
                    "exact": e.exact,
                })
            })
            .collect();
        let edges: Vec<[u32; 2]> = g.edges().map(|(u, v)| [u, v]).collect();
        Ok(json!({
            "n": n,
            "m": g.m(),
            "edges": edges,
            "entries": entries,
            "overall": ratio(profile.overall()),
            "overall_text": profile.overall().to_string(),
            "certified": profile.certified(),
        }))
    })())
}

/// Histogram of normalized transposition distances `dist * n / (2 m)` over
/// all pairs, next to the reference value `2 (1 - p)`.
#[wasm_bindgen]
pub fn delta2_histogram(n: usize, p: f64, seed: u64, bins: usize) -> String {
    respond((|| {
        let g = gen_gnp(&GnpParams { n, p, seed })?;
        if g.m() == 0 || bins == 0 {
            return Err(asym_core::Error::Domain("need at least one edge and one bin".into()));
        }
        let scale = n as f64 / (2.0 * g.m() as f64);
        let values: Vec<f64> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| transposition_dist(&g, u, v) as f64 * scale)
            .collect();
        let max = values.iter().copied().fold(0.0, f64::max).max(2.0 * (1.0 - p)) * 1.05;
        let width = max / bins as f64;
        let mut counts = vec![0u64; bins];
        for &x in &values {
            counts[((x / width) as usize).min(bins - 1)] += 1;
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Ok(json!({
            "n": n,
            "m": g.m(),
            "bin_width": width,
            "counts": counts,
            "min": min,
            "mean": mean,
            "reference": 2.0 * (1.0 - p),
        }))
    })())
}

/// Expected number of displaced edges when `m_S` edges are placed among the
/// pairs covered by `S = {0..k-1}` and permuted by the cycle `(0 1 .. k-1)`:
/// closed form and Monte Carlo mean for every `m_S`.
#[wasm_bindgen]
pub fn lemma1_curve(n: usize, k: usize, trials: u64, seed: u64) -> String {
    respond((|| {
        if k < 2 || k > n {
            return Err(asym_core::Error::Domain(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
        }
        let cycle: Vec<u32> = (0..k as u32).collect();
        let pi = Permutation::from_cycles(n, &[&cycle])?;
        let p_size = k * (k - 1) / 2 + k * (n - k);
        let mut points = Vec::with_capacity(p_size + 1);
        for m_s in 0..=p_size {
            let spec = DistanceSpec { n, subset: pi.support(), m_s, trials: trials.max(2) };
            let report = mc_lemma1_expectation(&spec, &pi, seed)?;
            let exp = &report.stats["experiment"];
            points.push(json!({
                "m_s": m_s,
                "closed_form": exp["closed_form_num"].as_f64().unwrap_or(0.0)
                    / exp["closed_form_den"].as_f64().unwrap_or(1.0),
                "empirical": exp["empirical_mean"],
                "verdict": report.verdict.as_str(),
            }));
        }
        Ok(json!({ "n": n, "k": k, "p_size": p_size, "f": pi.pair_fixpoints(), "points": points }))
    })())
}
