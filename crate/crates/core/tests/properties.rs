use asym_core::graph::{dist, Graph, VertexSet};
use asym_core::perm::{sample_k_perm, Permutation};
use asym_core::rng::substream;
use asym_core::search::{exact_delta_2, exact_delta_k, DEFAULT_BUDGET};
use asym_core::Rational;
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)));
            Graph::new(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e)).unwrap()
        })
    })
}

fn graph_and_perm(max_n: usize) -> impl Strategy<Value = (Graph, Permutation)> {
    graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        let identity: Vec<u32> = (0..n as u32).collect();
        (Just(g), Just(identity).prop_shuffle().prop_map(|m| Permutation::from_mapping(m).unwrap()))
    })
}

fn naive_common(g: &Graph, u: usize, v: usize) -> u32 {
    (0..g.n()).filter(|&w| g.has_edge(u, w) && g.has_edge(v, w)).count() as u32
}

proptest! {
    #[test]
    fn dist_perm_matches_permuted_graph((g, pi) in graph_and_perm(12)) {
        let h = g.apply_perm(&pi).unwrap();
        prop_assert_eq!(Rational::from_integer(g.dist_perm(&pi).unwrap()), dist(&g, &h).unwrap());
        prop_assert_eq!(h.m(), g.m());
    }

    #[test]
    fn dist_is_a_metric(g in graph(9), seed in any::<u64>()) {
        let n = g.n();
        let mut rng = substream(seed, "prop", 0);
        let relabel = |rng: &mut _| {
            let k = if n >= 2 { 2 } else { 0 };
            g.apply_perm(&sample_k_perm(n, k, rng).unwrap()).unwrap()
        };
        let (h, j) = (relabel(&mut rng), relabel(&mut rng));
        prop_assert_eq!(dist(&g, &g).unwrap(), Rational::from_integer(0));
        prop_assert_eq!(dist(&g, &h).unwrap(), dist(&h, &g).unwrap());
        prop_assert!(dist(&g, &j).unwrap() <= dist(&g, &h).unwrap() + dist(&h, &j).unwrap());
    }

    #[test]
    fn covered_edges_is_monotone(g in graph(12), mask in any::<u16>(), extra in any::<u16>()) {
        let n = g.n();
        let small = VertexSet::new(n, (0..n as u32).filter(|&v| mask >> v & 1 == 1)).unwrap();
        let large = VertexSet::new(n, (0..n as u32).filter(|&v| (mask | extra) >> v & 1 == 1)).unwrap();
        prop_assert!(g.covered_edges(&small) <= g.covered_edges(&large));
        prop_assert!(g.induced_edge_count(&small) <= g.covered_edges(&small));
        prop_assert_eq!(g.covered_edges(&VertexSet::all(n)), g.m());
    }

    #[test]
    fn two_path_counts_match_naive(g in graph(14)) {
        let mut seen = 0;
        g.for_each_common_neighbor_count(|u, v, c| {
            assert!(u < v);
            assert_eq!(c, naive_common(&g, u as usize, v as usize));
            seen += 1;
        });
        let expected = (0..g.n()).flat_map(|u| (u + 1..g.n()).map(move |v| (u, v)))
            .filter(|&(u, v)| naive_common(&g, u, v) > 0)
            .count();
        prop_assert_eq!(seen, expected);
    }

    #[test]
    fn dist_perm_bounded_by_covered_edges((g, pi) in graph_and_perm(12)) {
        prop_assert!(g.dist_perm(&pi).unwrap() <= g.covered_edges(&pi.support()) as u64);
    }

    #[test]
    fn delta2_matches_transposition_minimum(g in graph(10)) {
        prop_assume!(g.m() > 0);
        let n = g.n() as u32;
        let naive = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| g.dist_perm(&Permutation::transposition(n as usize, u, v)).unwrap())
            .min()
            .unwrap();
        let fast = exact_delta_2(&g).unwrap();
        prop_assert_eq!(fast.dist, naive);
        prop_assert_eq!(exact_delta_k(&g, 2, DEFAULT_BUDGET).unwrap().dist, naive);
        prop_assert_eq!(g.dist_perm(&fast.witness).unwrap(), fast.dist);
    }

    #[test]
    fn profile_is_relabeling_invariant((g, pi) in graph_and_perm(8)) {
        prop_assume!(g.m() > 0);
        let h = g.apply_perm(&pi).unwrap();
        for k in 2..=g.n() {
            let a = exact_delta_k(&g, k, DEFAULT_BUDGET).unwrap();
            let b = exact_delta_k(&h, k, DEFAULT_BUDGET).unwrap();
            prop_assert_eq!(a.delta, b.delta);
        }
    }

    #[test]
    fn edge_list_round_trip(g in graph(12)) {
        let text = asym_core::graph::write_edge_list(&g, true);
        prop_assert_eq!(asym_core::graph::parse_edge_list(&text).unwrap(), g);
    }
}
