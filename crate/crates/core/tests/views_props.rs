mod common;

use colornet::netmodel::PortGraph;
use colornet::oracle::brute::{uncovered_leaf_by_walks, ExplicitTree};
use colornet::views::{Distance, ViewArena};
use proptest::prelude::*;

#[test]
fn handles_agree_with_explicit_encodings() {
    for net in common::small_corpus(4, 40) {
        let mut arena = ViewArena::new();
        for t in 0..=3u32 {
            let views = arena.build_views(&net, t);
            let explicit: Vec<String> = (0..net.node_count())
                .map(|u| ExplicitTree::build(&net, u, t as usize, 1 << 16).unwrap().encode())
                .collect();
            for u in 0..net.node_count() {
                assert_eq!(arena.encode(views[u]), explicit[u]);
                for v in 0..net.node_count() {
                    assert_eq!(views[u] == views[v], explicit[u] == explicit[v]);
                    assert_eq!(
                        arena.compare_encodings(views[u], views[v]),
                        explicit[u].as_bytes().cmp(explicit[v].as_bytes())
                    );
                }
            }
        }
    }
}

#[test]
fn distances_agree_with_explicit_trees() {
    for net in common::small_corpus(4, 20) {
        let mut arena = ViewArena::new();
        for t in 0..=4u32 {
            for u in 0..net.node_count() {
                let view = arena.build_view(&net, u, t);
                let tree = ExplicitTree::build(&net, u, t as usize, 1 << 16).unwrap();
                for alpha in 1..=net.coloring.color_count() {
                    let expected = tree.dist_to_color(0, alpha).map(|d| d as u32);
                    assert_eq!(arena.dist_to_color(view, alpha).finite(), expected);
                }
            }
        }
    }
}

#[test]
fn uncovered_leaf_agrees_with_explicit_trees() {
    for net in common::small_corpus(3, 100) {
        let mut arena = ViewArena::new();
        for l in 0..=7u32 {
            for u in 0..net.node_count() {
                let view = arena.build_view(&net, u, l);
                let tree = ExplicitTree::build(&net, u, l as usize, 1 << 12).unwrap();
                for alpha in 1..=net.coloring.color_count() {
                    for k in 1..=3 {
                        assert_eq!(
                            arena.uncovered_leaf_exists(view, k, alpha),
                            tree.uncovered_leaf_exists(k, alpha),
                            "{}u={u} l={l} k={k} alpha={alpha}",
                            net.serialize()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn uncovered_leaf_agrees_with_walk_enumeration() {
    let mut checked = 0;
    for seed in 0..40 {
        let net = common::random_network(seed, 3 + (seed as usize % 3), 2, 2);
        let mut arena = ViewArena::new();
        for l in 0..=12u32 {
            let views = arena.build_views(&net, l);
            for u in 0..net.node_count() {
                for k in 1..=3 {
                    let Some(expected) = uncovered_leaf_by_walks(&net, u, l as usize, k, 1, 200_000) else {
                        continue;
                    };
                    assert_eq!(arena.uncovered_leaf_exists(views[u], k, 1), expected);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1000, "only {checked} instances fit the budget");
}

#[test]
fn infinite_distance_when_color_is_out_of_reach() {
    let net = common::random_network(3, 6, 0, 2);
    let mut arena = ViewArena::new();
    for u in 0..net.node_count() {
        let view = arena.build_view(&net, u, 0);
        let expected = if net.color(u) == 1 { Distance::Finite(0) } else { Distance::Infinite };
        assert_eq!(arena.dist_to_color(view, 1), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_matches_shallower_builds(net in common::arb_network(7, 3), t in 0u32..6) {
        let mut arena = ViewArena::new();
        let deep = arena.build_views(&net, t);
        for s in 0..=t {
            let shallow = arena.build_views(&net, s);
            for u in 0..net.node_count() {
                prop_assert_eq!(arena.truncate(deep[u], s), shallow[u]);
            }
        }
    }

    #[test]
    fn children_are_neighbor_views(net in common::arb_network(7, 3), t in 0u32..5) {
        let mut arena = ViewArena::new();
        let shallow = arena.build_views(&net, t);
        let deep = arena.build_views(&net, t + 1);
        for v in 0..net.node_count() {
            for p in 0..net.degree(v) {
                let (u, q) = net.neighbor(v, p);
                prop_assert_eq!(arena.children(deep[v])[p], (q, shallow[u]));
            }
        }
    }

    #[test]
    fn assembling_from_neighbors_matches_building(net in common::arb_network(7, 3), t in 0u32..5) {
        let mut arena = ViewArena::new();
        let layer = arena.build_views(&net, t);
        let next = arena.build_views(&net, t + 1);
        for v in 0..net.node_count() {
            let neighbors: Vec<_> = (0..net.degree(v))
                .map(|p| {
                    let (u, q) = net.neighbor(v, p);
                    (q, layer[u])
                })
                .collect();
            prop_assert_eq!(arena.assemble(net.color(v), &neighbors).unwrap(), next[v]);
        }
    }

    #[test]
    fn decoding_inverts_encoding(net in common::arb_network(6, 3), t in 0u32..4) {
        let mut arena = ViewArena::new();
        let views = arena.build_views(&net, t);
        let mut fresh = ViewArena::new();
        for &view in &views {
            let text = arena.encode(view);
            let decoded = fresh.decode(&text).unwrap();
            prop_assert_eq!(fresh.encode(decoded), text);
        }
    }

    #[test]
    fn distance_matches_network_distance_within_depth(net in common::arb_network(7, 3), t in 0u32..6) {
        let mut arena = ViewArena::new();
        let views = arena.build_views(&net, t);
        let n = net.node_count();
        for alpha in 1..=net.coloring.color_count() {
            let mut best = vec![usize::MAX; n];
            for a in (0..n).filter(|&a| net.color(a) == alpha) {
                for (v, d) in net.network.distances_from(a).into_iter().enumerate() {
                    best[v] = best[v].min(d);
                }
            }
            for u in 0..n {
                let expected = (best[u] <= t as usize).then_some(best[u] as u32);
                prop_assert_eq!(arena.dist_to_color(views[u], alpha).finite(), expected);
            }
        }
    }
}
