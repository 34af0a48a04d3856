mod common;

use common::{random_digraph, rng, small_random_graph};
use mepcut::baselines::*;
use mepcut::graph::validate_assignment;
use mepcut::mep::{anneal, AnnealConfig};
use mepcut::Graph;
use proptest::prelude::*;
use rand::Rng;

/// Minimum over every vertex bipartition with `source` on one side and
/// `sink` on the other.
fn exhaustive_min_cut(n: usize, caps: &[(usize, usize, f64)], source: usize, sink: usize) -> f64 {
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        let inside = |v: usize| mask & (1 << v) != 0;
        if !inside(source) || inside(sink) {
            continue;
        }
        let value: f64 = caps
            .iter()
            .filter(|&&(u, v, _)| inside(u) && !inside(v))
            .map(|&(_, _, c)| c)
            .sum();
        best = best.min(value);
    }
    best
}

proptest! {
    #[test]
    fn max_flow_matches_bipartition_enumeration(seed in any::<u64>(), n in 2usize..=10) {
        let mut r = rng(seed);
        let mut net = FlowNetwork::new(n, 0, n - 1).unwrap();
        let mut caps = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && r.random_bool(0.35) {
                    let c = r.random_range(1..=9) as f64 / 4.0;
                    net.add_arc(u, v, c).unwrap();
                    caps.push((u, v, c));
                }
            }
        }
        let cut = min_st_cut(&net);
        let expected = exhaustive_min_cut(n, &caps, 0, n - 1);
        prop_assert!((cut.value - expected).abs() < 1e-9, "{} vs {}", cut.value, expected);
        prop_assert!(cut.source_side[0] && !cut.source_side[n - 1]);
        let witnessed: f64 = caps
            .iter()
            .filter(|&&(u, v, _)| cut.source_side[u] && !cut.source_side[v])
            .map(|&(_, _, c)| c)
            .sum();
        prop_assert!((witnessed - cut.value).abs() < 1e-12);
    }
}

#[test]
fn pendant_cycle_family() {
    let g = gen_pendant_cycle(3, 1.98).unwrap();
    assert_eq!(g.n_vertices(), 6);
    assert_eq!(g.edges().len(), 6);
    assert!(gen_pendant_cycle(2, 1.98).is_err());

    for (k, heuristic) in [(3, 3.96), (4, 5.94), (5, 7.92), (6, 9.9)] {
        let g = gen_pendant_cycle(k, 1.98).unwrap();
        let exact = brute_force_exact(&g).unwrap();
        assert!((exact.cut_value - k as f64).abs() < 1e-9, "k = {k}");
        let h = isolating_cut_heuristic(&g).unwrap();
        assert!((h.cut_value - heuristic).abs() < 1e-9, "k = {k}: {}", h.cut_value);
    }
}

#[test]
fn heuristic_ratio_approaches_its_bound() {
    for k in 3..=6 {
        let bound = 2.0 * (1.0 - 1.0 / k as f64);
        let mut last = 0.0;
        for eps in [0.5, 0.1, 0.01, 0.001] {
            let g = gen_pendant_cycle(k, 2.0 - eps).unwrap();
            let ratio = isolating_cut_heuristic(&g).unwrap().cut_value / brute_force_exact(&g).unwrap().cut_value;
            assert!(ratio <= bound + 1e-12);
            assert!(ratio > last);
            last = ratio;
        }
        assert!(bound - last < 1e-3);
    }
}

#[test]
fn two_terminal_heuristic_is_the_min_cut() {
    let mut r = rng(31);
    for _ in 0..30 {
        let g = random_digraph(9, 2, 0.4, &mut r);
        let h = isolating_cut_heuristic(&g).unwrap();
        let net = FlowNetwork::from_graph(&g, &[g.terminals()[0]], &[g.terminals()[1]]).unwrap();
        assert!((h.cut_value - min_st_cut(&net).value).abs() < 1e-9);
        assert!((h.cut_value - brute_force_exact(&g).unwrap().cut_value).abs() < 1e-9);
    }
}

#[test]
fn heuristic_never_beats_the_optimum() {
    for seed in 0..60 {
        let g = small_random_graph(seed, 8, 4, WeightDist::Integer(1, 5));
        let exact = brute_force_exact(&g).unwrap();
        let h = isolating_cut_heuristic(&g).unwrap();
        validate_assignment(&g, &exact.assignment).unwrap();
        validate_assignment(&g, &h.assignment).unwrap();
        assert!(h.cut_value >= exact.cut_value - 1e-9);
        if exact.cut_value > 0.0 {
            let bound = 2.0 * (1.0 - 1.0 / g.k() as f64);
            assert!(h.cut_value / exact.cut_value <= bound + 1e-9);
        }
    }
}

#[test]
fn mep_on_two_terminals_rarely_misses_the_min_cut() {
    let mut hits = 0;
    let total = 50;
    for seed in 0..total {
        let g = small_random_graph(1000 + seed, 9, 2, WeightDist::Unit);
        let net = FlowNetwork::from_graph(&g, &[g.terminals()[0]], &[g.terminals()[1]]).unwrap();
        let st = min_st_cut(&net).value;
        let mep = anneal(&g, &AnnealConfig::default()).unwrap().partition.cut_value;
        assert!(mep >= st - 1e-9);
        if (mep - st).abs() < 1e-9 {
            hits += 1;
        }
    }
    assert!(hits * 10 >= total * 9, "{hits}/{total}");
}

#[test]
fn random_generator_is_seeded_and_valid() {
    let cfg = RandomGraphConfig::default();
    let a = random_graph(&cfg, &mut rng(5)).unwrap();
    let b = random_graph(&cfg, &mut rng(5)).unwrap();
    assert_eq!(a, b);
    for seed in 0..50 {
        let g = random_graph(&cfg, &mut rng(seed)).unwrap();
        assert!((cfg.n_min..=cfg.n_max).contains(&g.n_vertices()));
        assert!((cfg.k_min..=cfg.k_max).contains(&g.k()));
        assert!(g.edges().iter().all(|e| e.source < e.target && e.weight == 1.0));
    }
    let bad = RandomGraphConfig { k_min: 1, ..cfg };
    assert!(random_graph(&bad, &mut rng(0)).is_err());

    let g = random_graph_with_edges(50, 3, 200, &mut rng(1)).unwrap();
    assert_eq!(g.edges().len(), 200);
    assert!(random_graph_with_edges(4, 2, 7, &mut rng(1)).is_err());
    assert_eq!(complete_graph(6, 2).unwrap().edges().len(), 15);
}

#[test]
fn hand_built_instances_have_the_documented_optima() {
    let g = three_cluster_instance();
    let exact = brute_force_exact(&g).unwrap();
    assert_eq!(exact.assignment, vec![0, 0, 0, 1, 1, 1, 1, 2, 2, 2]);
    assert_eq!(exact.cut_value, 3.0);

    let t = degenerate_tie_instance();
    let optima = all_optima(&t);
    assert_eq!(optima.len(), 2);
    let differing: Vec<usize> = (0..8).filter(|&v| optima[0][v] != optima[1][v]).collect();
    assert_eq!(differing, vec![2]);
}

/// Every minimum-cut assignment, by plain enumeration.
fn all_optima(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n_vertices();
    let k = g.k();
    let free: Vec<usize> = (0..n).filter(|&v| !g.is_terminal(v)).collect();
    let mut best = f64::INFINITY;
    let mut found = Vec::new();
    for code in 0..k.pow(free.len() as u32) {
        let mut a: Vec<usize> = (0..n).map(|v| g.terminal_label(v).unwrap_or(0)).collect();
        let mut c = code;
        for &v in &free {
            a[v] = c % k;
            c /= k;
        }
        let value = mepcut::cut_value(g, &a).unwrap();
        if value < best - 1e-12 {
            best = value;
            found.clear();
        }
        if (value - best).abs() <= 1e-12 {
            found.push(a);
        }
    }
    found
}
