//! Robustness profiles: for each support size `k`, the smallest normalized
//! distance `dist_perm(G, pi) * n / (k * m)` over k-permutations `pi`.
//!
//! A graph is delta-asymmetric exactly when every entry of its profile is at
//! least delta. Entries are exact (full enumeration) or heuristic (attained by
//! a witness found by annealing, hence an upper bound). `k = 1` never appears:
//! no permutation moves exactly one point.

mod anneal;
mod exact;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Fingerprint, Graph};
use crate::perm::Permutation;
use crate::Rational;

pub use anneal::{heuristic_delta_k, SearchParams};
pub use exact::{
    delta2_scan, exact_delta_2, exact_delta_k, has_nontrivial_automorphism, transposition_dist, Delta2Scan,
    DEFAULT_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaEntry {
    pub k: usize,
    pub delta: Rational,
    /// `dist_perm(G, witness)`.
    pub dist: u64,
    pub witness: Permutation,
    pub exact: bool,
}

impl DeltaEntry {
    pub(crate) fn new(g: &Graph, k: usize, dist: u64, witness: Permutation, exact: bool) -> Self {
        let delta = normalized(g, k, dist);
        DeltaEntry { k, delta, dist, witness, exact }
    }
}

/// `dist * n / (k * m)`.
pub fn normalized(g: &Graph, k: usize, dist: u64) -> Rational {
    Rational::new(dist * g.n() as u64, (k * g.m()) as u64)
}

pub(crate) fn check_normalizable(g: &Graph) -> Result<()> {
    if g.m() == 0 || g.n() < 2 {
        return Err(Error::Normalization { n: g.n(), m: g.m() });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct AsymmetryProfile {
    fingerprint: Fingerprint,
    entries: BTreeMap<usize, DeltaEntry>,
}

impl AsymmetryProfile {
    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn entries(&self) -> impl Iterator<Item = &DeltaEntry> {
        self.entries.values()
    }

    pub fn entry(&self, k: usize) -> Option<&DeltaEntry> {
        self.entries.get(&k)
    }

    pub fn overall(&self) -> Rational {
        self.entries.values().map(|e| e.delta).min().expect("profiles have at least one entry")
    }

    /// All entries come from complete enumeration.
    pub fn certified(&self) -> bool {
        self.entries.values().all(|e| e.exact)
    }

    pub fn to_doc(&self) -> ProfileDoc {
        let overall = self.overall();
        ProfileDoc {
            n: self.fingerprint.n,
            m: self.fingerprint.m,
            graph_hash: self.fingerprint.hash.clone(),
            certified: self.certified(),
            entries: self
                .entries
                .values()
                .map(|e| EntryDoc {
                    k: e.k,
                    delta_num: *e.delta.numer(),
                    delta_den: *e.delta.denom(),
                    dist: e.dist,
                    witness_cycles: e.witness.to_string(),
                    exact: e.exact,
                })
                .collect(),
            overall: RationalDoc { delta_num: *overall.numer(), delta_den: *overall.denom() },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("profile serializes") + "\n"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileDoc {
    pub n: usize,
    pub m: usize,
    pub graph_hash: String,
    pub certified: bool,
    pub entries: Vec<EntryDoc>,
    pub overall: RationalDoc,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryDoc {
    pub k: usize,
    pub delta_num: u64,
    pub delta_den: u64,
    pub dist: u64,
    pub witness_cycles: String,
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RationalDoc {
    pub delta_num: u64,
    pub delta_den: u64,
}

/// Exact entries for every k whose enumeration fits `budget`, annealing for
/// the rest.
pub fn exact_profile(g: &Graph, budget: u64, search: &SearchParams) -> Result<AsymmetryProfile> {
    let ks: Vec<usize> = (2..=g.n()).collect();
    profile_over(g, &ks, budget, search)
}

/// Like [`exact_profile`], restricted to the support sizes `ks`.
pub fn profile_over(g: &Graph, ks: &[usize], budget: u64, search: &SearchParams) -> Result<AsymmetryProfile> {
    check_normalizable(g)?;
    let mut entries = BTreeMap::new();
    for &k in ks {
        let entry = match exact_delta_k(g, k, budget) {
            Ok(e) => e,
            Err(Error::BudgetExceeded { .. }) => heuristic_delta_k(g, k, search)?,
            Err(e) => return Err(e),
        };
        entries.insert(k, entry);
    }
    if entries.is_empty() {
        return Err(Error::domain("no support sizes requested"));
    }
    Ok(AsymmetryProfile { fingerprint: g.fingerprint(), entries })
}

/// Heuristic-only profile over the given support sizes.
pub fn heuristic_profile(g: &Graph, ks: &[usize], search: &SearchParams) -> Result<AsymmetryProfile> {
    check_normalizable(g)?;
    let mut entries = BTreeMap::new();
    for &k in ks {
        entries.insert(k, heuristic_delta_k(g, k, search)?);
    }
    if entries.is_empty() {
        return Err(Error::domain("no support sizes requested"));
    }
    Ok(AsymmetryProfile { fingerprint: g.fingerprint(), entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every entry is exact and at least delta.
    Certified,
    /// Some entry falls below delta; its witness refutes the claim.
    Refuted { k: usize, delta: Rational },
    /// No entry falls below delta, but some entries are heuristic.
    NotRefuted,
}

/// Decides `delta`-asymmetry from a profile of `g`.
pub fn is_delta_asymmetric(g: &Graph, delta: Rational, profile: &AsymmetryProfile) -> Result<Verdict> {
    if g.fingerprint() != profile.fingerprint {
        return Err(Error::FingerprintMismatch);
    }
    if let Some(e) = profile.entries().find(|e| e.delta < delta) {
        return Ok(Verdict::Refuted { k: e.k, delta: e.delta });
    }
    Ok(if profile.certified() { Verdict::Certified } else { Verdict::NotRefuted })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn asym6() -> Graph {
        Graph::new(6, [(0, 2), (0, 3), (0, 5), (1, 2), (1, 4), (2, 3)]).unwrap()
    }

    #[test]
    fn complete_graph_profile_is_zero() {
        let p = exact_profile(&Graph::complete(3), DEFAULT_BUDGET, &SearchParams::default()).unwrap();
        assert_eq!(p.entries().map(|e| e.k).collect::<Vec<_>>(), vec![2, 3]);
        assert!(p.entries().all(|e| e.dist == 0));
        assert!(p.entry(1).is_none());
        let v = is_delta_asymmetric(&Graph::complete(3), Rational::new(1, 10), &p).unwrap();
        assert_eq!(v, Verdict::Refuted { k: 2, delta: Rational::from_integer(0) });
    }

    #[test]
    fn asymmetric_witness_is_certified() {
        let g = asym6();
        let p = exact_profile(&g, DEFAULT_BUDGET, &SearchParams::default()).unwrap();
        let deltas: Vec<Rational> = p.entries().map(|e| e.delta).collect();
        // frozen from a filter-all-720-permutations enumeration
        let expected = [(1, 2), (2, 3), (1, 4), (2, 5), (1, 6)].map(|(a, b)| Rational::new(a, b));
        assert_eq!(deltas, expected);
        assert_eq!(p.overall(), Rational::new(1, 6));
        assert!(p.certified());
        assert_eq!(is_delta_asymmetric(&g, p.overall(), &p).unwrap(), Verdict::Certified);
        assert!(matches!(is_delta_asymmetric(&g, Rational::new(1, 5), &p).unwrap(), Verdict::Refuted { k: 6, .. }));
    }

    #[test]
    fn budget_zero_gives_heuristic_entries() {
        let g = asym6();
        let p = exact_profile(&g, 0, &SearchParams::default()).unwrap();
        assert!(!p.certified());
        assert_eq!(is_delta_asymmetric(&g, Rational::new(1, 100), &p).unwrap(), Verdict::NotRefuted);
    }

    #[test]
    fn fingerprint_mismatch() {
        let p = exact_profile(&asym6(), DEFAULT_BUDGET, &SearchParams::default()).unwrap();
        assert!(matches!(
            is_delta_asymmetric(&Graph::path(6), Rational::from_integer(0), &p),
            Err(Error::FingerprintMismatch)
        ));
    }

    #[test]
    fn normalization_errors() {
        let params = SearchParams::default();
        assert!(matches!(exact_profile(&Graph::empty(3), 10, &params), Err(Error::Normalization { .. })));
        assert!(matches!(heuristic_delta_k(&Graph::empty(3), 2, &params), Err(Error::Normalization { .. })));
    }

    #[test]
    fn json_shape() {
        let p = exact_profile(&Graph::path(3), DEFAULT_BUDGET, &SearchParams::default()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(v["n"], 3);
        assert_eq!(v["entries"][1]["delta_num"], 1);
        assert_eq!(v["entries"][1]["delta_den"], 2);
        assert_eq!(v["entries"][0]["witness_cycles"], "(0 2)");
        assert_eq!(v["overall"]["delta_num"], 0);
        assert_eq!(v["graph_hash"].as_str().unwrap().len(), 64);
    }
}
