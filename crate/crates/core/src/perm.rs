//! Permutations of `0..n` with explicit support, plus exhaustive and uniform
//! random generation of k-permutations (permutations moving exactly k points).

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::VertexSet;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<u32>,
    support: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { mapping: (0..n as u32).collect(), support: Vec::new() }
    }

    pub fn from_mapping(mapping: Vec<u32>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &x in &mapping {
            if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::domain(format!("{mapping:?} is not a bijection on 0..{n}")));
            }
        }
        Ok(Self::from_mapping_unchecked(mapping))
    }

    pub(crate) fn from_mapping_unchecked(mapping: Vec<u32>) -> Self {
        let support = (0..mapping.len() as u32).filter(|&v| mapping[v as usize] != v).collect();
        Permutation { mapping, support }
    }

    pub fn transposition(n: usize, a: u32, b: u32) -> Self {
        assert!(a != b && (a as usize) < n && (b as usize) < n);
        let mut mapping: Vec<u32> = (0..n as u32).collect();
        mapping.swap(a as usize, b as usize);
        Self::from_mapping_unchecked(mapping)
    }

    /// Builds a permutation from disjoint cycles, e.g. `&[&[0, 1], &[2, 3, 4]]`.
    pub fn from_cycles(n: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut mapping: Vec<u32> = (0..n as u32).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x as usize >= n || std::mem::replace(&mut used[x as usize], true) {
                    return Err(Error::domain(format!("cycle element {x} out of range or repeated")));
                }
                mapping[x as usize] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Self::from_mapping_unchecked(mapping))
    }

    /// Parses cycle notation such as `(0 3)(1 4 2)`; `()` is the identity.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Self> {
        let mut cycles: Vec<Vec<u32>> = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| Error::domain(format!("malformed cycle notation {text:?}")))?;
            let cycle = body
                .0
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u32>().map_err(|_| Error::domain(format!("invalid label {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            cycles.push(cycle);
            rest = body.1.trim_start();
        }
        let refs: Vec<&[u32]> = cycles.iter().map(Vec::as_slice).collect();
        Self::from_cycles(n, &refs)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.mapping.len()
    }

    /// Support size.
    #[inline]
    pub fn k(&self) -> usize {
        self.support.len()
    }

    #[inline]
    pub fn image(&self, v: usize) -> usize {
        self.mapping[v] as usize
    }

    #[inline]
    pub fn moves(&self, v: usize) -> bool {
        self.mapping[v] as usize != v
    }

    pub fn mapping(&self) -> &[u32] {
        &self.mapping
    }

    pub(crate) fn support_slice(&self) -> &[u32] {
        &self.support
    }

    pub fn support(&self) -> VertexSet {
        VertexSet::from_sorted(self.n(), self.support.clone())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (v, &x) in self.mapping.iter().enumerate() {
            inv[x as usize] = v as u32;
        }
        Permutation { mapping: inv, support: self.support.clone() }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::Dimension { left: self.n(), right: other.n() });
        }
        Ok(Self::from_mapping_unchecked(other.mapping.iter().map(|&x| self.mapping[x as usize]).collect()))
    }

    /// Non-trivial cycles, each starting at its smallest element, ordered by
    /// that element.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        for &start in &self.support {
            if seen[start as usize] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start as usize] = true;
            let mut x = self.mapping[start as usize];
            while x != start {
                seen[x as usize] = true;
                cycle.push(x);
                x = self.mapping[x as usize];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of unordered pairs `{u, v}` swapped by the permutation, i.e.
    /// its 2-cycles. These are the pairs it fixes as pairs.
    pub fn pair_fixpoints(&self) -> usize {
        self.support
            .iter()
            .filter(|&&u| {
                let v = self.mapping[u as usize];
                u < v && self.mapping[v as usize] == u
            })
            .count()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[n={}; {}]", self.n(), self)
    }
}

/// Derangement numbers `D(k)`, exact.
pub fn derangements(k: usize) -> BigUint {
    let (mut prev, mut cur) = (BigUint::one(), BigUint::from(0u32)); // D(0), D(1)
    if k == 0 {
        return prev;
    }
    for i in 2..=k {
        let next = BigUint::from(i - 1) * (&cur + &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

/// Number of permutations of `0..n` with support size exactly `k`:
/// `C(n, k) * D(k)`.
pub fn count_k_perms(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    Ok(binomial(n, k) * derangements(k))
}

/// Derangements of `0..k` in lexicographic order of their image sequence.
///
/// Backtracking with the only pruning rule needed for a complete search: at
/// position `k - 2`, if `k - 1` is still unused it must be taken now, since
/// otherwise the last position would be forced onto itself. Every other
/// partial assignment extends to at least one derangement.
#[derive(Debug, Clone)]
pub struct Derangements {
    k: usize,
    img: Vec<usize>,
    used: Vec<bool>,
    state: IterState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

impl Derangements {
    pub fn new(k: usize) -> Self {
        Derangements {
            k,
            img: Vec::with_capacity(k),
            used: vec![false; k],
            state: if k == 1 { IterState::Done } else { IterState::Fresh },
        }
    }

    /// Smallest admissible image for `pos` strictly greater than `after`.
    fn next_choice(&self, pos: usize, after: Option<usize>) -> Option<usize> {
        let k = self.k;
        let lo = after.map_or(0, |a| a + 1);
        if k >= 2 && pos == k - 2 && !self.used[k - 1] {
            return (lo < k).then_some(k - 1);
        }
        (lo..k).find(|&j| j != pos && !self.used[j])
    }

    fn fill_from(&mut self, mut pos: usize) {
        while pos < self.k {
            let j = self.next_choice(pos, None).expect("every partial derangement extends");
            self.used[j] = true;
            self.img.push(j);
            pos += 1;
        }
    }
}

impl Iterator for Derangements {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                self.state = IterState::Running;
                self.fill_from(0);
                if self.k == 0 {
                    self.state = IterState::Done;
                }
                return Some(self.img.clone());
            }
            IterState::Running => {}
        }
        while let Some(prev) = self.img.pop() {
            let pos = self.img.len();
            self.used[prev] = false;
            if let Some(j) = self.next_choice(pos, Some(prev)) {
                self.used[j] = true;
                self.img.push(j);
                self.fill_from(pos + 1);
                return Some(self.img.clone());
            }
        }
        self.state = IterState::Done;
        None
    }
}

/// Lexicographic k-subsets of `0..n`, optionally restricted to those whose
/// smallest element is fixed.
#[derive(Debug, Clone)]
pub(crate) struct Combinations {
    n: usize,
    cur: Vec<u32>,
    first: Option<u32>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize, first: Option<u32>) -> Self {
        let start = first.unwrap_or(0);
        let feasible = k <= n && first.is_none_or(|f| k >= 1 && f as usize + k <= n);
        Combinations {
            n,
            cur: (start..start + k as u32).collect(),
            first,
            done: !feasible,
        }
    }

    pub(crate) fn current(&self) -> Option<&[u32]> {
        (!self.done).then_some(self.cur.as_slice())
    }

    pub(crate) fn advance(&mut self) {
        let k = self.cur.len();
        let lowest = usize::from(self.first.is_some());
        let n = self.n as u32;
        let mut i = k;
        while i > lowest {
            i -= 1;
            if self.cur[i] < n - (k - i) as u32 {
                self.cur[i] += 1;
                for j in i + 1..k {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                return;
            }
        }
        self.done = true;
    }
}

/// Stream of all permutations of `0..n` with support size exactly `k`,
/// ordered by support subset (lexicographic) and then by the image sequence
/// on that subset (lexicographic).
#[derive(Debug, Clone)]
pub struct KPerms {
    n: usize,
    k: usize,
    subsets: Combinations,
    inner: Derangements,
}

impl KPerms {
    fn build(n: usize, k: usize, first: Option<u32>) -> Result<Self> {
        if k > n {
            return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
        }
        Ok(KPerms { n, k, subsets: Combinations::new(n, k, first), inner: Derangements::new(k) })
    }

    /// The sub-stream whose supports have smallest element `first`. The
    /// streams for `first = 0..n` partition the full stream, in order.
    pub fn with_first(n: usize, k: usize, first: u32) -> Result<Self> {
        Self::build(n, k, Some(first))
    }
}

impl Iterator for KPerms {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        loop {
            let subset = self.subsets.current()?;
            if let Some(images) = self.inner.next() {
                let mut mapping: Vec<u32> = (0..self.n as u32).collect();
                for (i, &j) in images.iter().enumerate() {
                    mapping[subset[i] as usize] = subset[j];
                }
                return Some(Permutation::from_mapping_unchecked(mapping));
            }
            self.subsets.advance();
            self.inner = Derangements::new(self.k);
        }
    }
}

/// Every permutation of `0..n` with exactly `k` moved points. `k = 1` yields
/// nothing; `k = 0` yields only the identity.
pub fn enumerate_k_perms(n: usize, k: usize) -> Result<KPerms> {
    KPerms::build(n, k, None)
}

/// Uniform sample from the `C(n, k) * D(k)` k-permutations: a uniform
/// k-subset, then a uniform derangement of it by rejection.
pub fn sample_k_perm<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Permutation> {
    if k < 2 || k > n {
        return Err(Error::domain(format!("sampling needs 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut subset = rand::seq::index::sample(rng, n, k).into_vec();
    subset.sort_unstable();
    let mut order: Vec<usize> = (0..k).collect();
    loop {
        order.shuffle(rng);
        if order.iter().enumerate().all(|(i, &j)| i != j) {
            break;
        }
    }
    let mut mapping: Vec<u32> = (0..n as u32).collect();
    for (i, &j) in order.iter().enumerate() {
        mapping[subset[i]] = subset[j] as u32;
    }
    Ok(Permutation::from_mapping_unchecked(mapping))
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use std::collections::BTreeSet;

    fn filter_all(n: usize, k: usize) -> BTreeSet<Vec<u32>> {
        (0..n as u32)
            .permutations(n)
            .filter(|p| p.iter().enumerate().filter(|&(i, &x)| i as u32 != x).count() == k)
            .collect()
    }

    #[test]
    fn support_examples() {
        assert!(Permutation::identity(4).support().is_empty());
        assert_eq!(Permutation::transposition(5, 0, 1).support().as_slice(), &[0, 1]);
        let c = Permutation::from_cycles(4, &[&[0, 1, 2]]).unwrap();
        assert_eq!(c.support().as_slice(), &[0, 1, 2]);
        assert_eq!(c.k(), 3);
    }

    #[test]
    fn pair_fixpoint_examples() {
        assert_eq!(Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap().pair_fixpoints(), 2);
        assert_eq!(Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap().pair_fixpoints(), 0);
        let p = Permutation::from_cycles(6, &[&[0, 1], &[2, 3, 4]]).unwrap();
        assert_eq!(p.pair_fixpoints(), 1);
        // oracle: scan all pairs
        let scan = (0..6usize)
            .tuple_combinations()
            .filter(|&(u, v)| p.image(u) == v && p.image(v) == u)
            .count();
        assert_eq!(scan, 1);
    }

    #[test]
    fn cycle_notation() {
        let p = Permutation::from_mapping(vec![3, 4, 1, 0, 2]).unwrap();
        assert_eq!(p.to_string(), "(0 3)(1 4 2)");
        assert_eq!(Permutation::identity(3).to_string(), "()");
        assert_eq!(Permutation::parse_cycles(5, "(0 3)(1 4 2)").unwrap(), p);
        assert_eq!(Permutation::parse_cycles(5, "()").unwrap(), Permutation::identity(5));
        assert!(Permutation::parse_cycles(5, "(0 9)").is_err());
        assert!(Permutation::parse_cycles(5, "(0 1").is_err());
        assert!(Permutation::from_mapping(vec![0, 0]).is_err());
    }

    #[test]
    fn counts() {
        let d: Vec<u64> = (0..8).map(|k| derangements(k).try_into().unwrap()).collect();
        assert_eq!(d, [1, 0, 1, 2, 9, 44, 265, 1854]);
        assert_eq!(count_k_perms(7, 0).unwrap(), BigUint::one());
        assert_eq!(count_k_perms(7, 1).unwrap(), BigUint::from(0u32));
        assert_eq!(count_k_perms(6, 4).unwrap(), BigUint::from(135u32));
        assert_eq!(filter_all(6, 4).len(), 135);
        assert!(count_k_perms(3, 4).is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_k_perms(3, 2).unwrap().count(), 3);
        assert_eq!(enumerate_k_perms(4, 3).unwrap().count(), 8);
        let ids: Vec<_> = enumerate_k_perms(5, 0).unwrap().collect();
        assert_eq!(ids, vec![Permutation::identity(5)]);
        assert_eq!(enumerate_k_perms(5, 1).unwrap().count(), 0);
        assert!(enumerate_k_perms(3, 4).is_err());
        assert_eq!(enumerate_k_perms(0, 0).unwrap().count(), 1);
    }

    #[test]
    fn enumeration_matches_filter_oracle() {
        for n in 0..=7 {
            for k in 0..=n {
                let got: Vec<Vec<u32>> = enumerate_k_perms(n, k).unwrap().map(|p| p.mapping().to_vec()).collect();
                let set: BTreeSet<_> = got.iter().cloned().collect();
                assert_eq!(set.len(), got.len(), "duplicates at n={n} k={k}");
                assert_eq!(set, filter_all(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn enumeration_order_is_subset_then_images() {
        let key = |p: &Permutation| (p.support_slice().to_vec(), p.mapping().to_vec());
        let all: Vec<_> = enumerate_k_perms(6, 4).unwrap().collect();
        assert!(all.windows(2).all(|w| key(&w[0]) < key(&w[1])));
    }

    #[test]
    fn prefix_splits_partition_the_stream() {
        let full: Vec<_> = enumerate_k_perms(6, 3).unwrap().collect();
        let split: Vec<_> = (0..6).flat_map(|f| KPerms::with_first(6, 3, f).unwrap()).collect();
        assert_eq!(full, split);
        assert_eq!(KPerms::with_first(6, 0, 0).unwrap().count(), 0);
    }

    #[test]
    fn derangements_lexicographic() {
        let all: Vec<_> = Derangements::new(4).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![1, 0, 3, 2]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sampling_shape() {
        let mut rng = crate::rng::substream(3, "test", 0);
        for _ in 0..50 {
            let p = sample_k_perm(5, 2, &mut rng).unwrap();
            assert_eq!(p.k(), 2);
            let q = sample_k_perm(9, 7, &mut rng).unwrap();
            assert_eq!(q.k(), 7);
        }
        assert!(sample_k_perm(5, 1, &mut rng).is_err());
        assert!(sample_k_perm(5, 6, &mut rng).is_err());
    }

    #[test]
    fn inverse_and_compose() {
        let p = Permutation::from_mapping(vec![2, 0, 3, 1, 4]).unwrap();
        assert!(p.compose(&p.inverse()).unwrap().support().is_empty());
        assert!(p.compose(&Permutation::identity(4)).is_err());
    }
}
