mod common;

use std::collections::HashSet;

use colornet::engine::RunOptions;
use colornet::generators::small::k_choices;
use colornet::netmodel::{Color, ColoredNetwork, NodeId, Port, PortGraph};
use colornet::oracle::{self, high_copy_brute, represented_nodes};
use colornet::protocol::{
    compute_xi, default_max_rounds, run_protocol, run_protocol_with, test_repetition, NodeOutcome, Params,
    Task,
};
use colornet::views::{shared_arena, PathStep, ViewArena};
use proptest::prelude::*;

fn exit_depth_bound(k: u32, d: usize) -> u32 {
    2 * (k + 1) * (d as u32 + 1) + d as u32
}

/// Checks one run against everything computable from the network.
fn check_run(net: &ColoredNetwork, k: u32, alpha: Color, task: Task) -> Result<(), TestCaseError> {
    let arena = shared_arena();
    let n = net.node_count();
    let d = net.network.diameter();
    let options = RunOptions::new(default_max_rounds(k, n, d));
    let run = run_protocol_with(net, Params::new(k, alpha, task), &arena, options).unwrap();
    let expected = oracle::oracle_solve(net, k, alpha, task).unwrap();
    prop_assert_eq!(&run.outcomes, &expected.outcomes);

    let mut arena = arena.lock().unwrap();
    let xi = run.stats[0].xi;
    prop_assert!(run.stats.iter().all(|s| s.xi == xi));
    let q = &expected.quotient;
    let report = compute_xi(&mut fresh_arena(), &q.graph, k, alpha).unwrap();
    prop_assert_eq!(report.xi, xi);
    for (u, stats) in run.stats.iter().enumerate() {
        let (exit, index) = report.phases[q.class_of[u]];
        prop_assert_eq!(stats.exit_depth, exit);
        prop_assert_eq!(stats.refinement_index, index);
        prop_assert_eq!(stats.tau, exit + index);
        prop_assert!(stats.exit_depth <= exit_depth_bound(k, d));
        prop_assert!(stats.refinement_index as usize <= n);
        let covered = represented_nodes(&arena, net, stats.exit_view, u, stats.exit_depth);
        prop_assert!(covered.iter().all(|&c| c), "exit view of {} misses a node", u);
    }
    // both phases can take their maximum: l + i twice, with i <= n
    let last = run.stats.iter().map(|s| s.tau + s.xi).max().unwrap();
    prop_assert_eq!(run.rounds, last);
    prop_assert!(
        run.rounds <= 2 * (exit_depth_bound(k, d) + n as u32),
        "{}k={k} alpha={alpha} rounds={} stats={:?}",
        net.serialize(),
        run.rounds,
        run.stats
    );

    let at_bound = arena.build_view(net, 0, exit_depth_bound(k, d));
    prop_assert!(!arena.uncovered_leaf_exists(at_bound, k, alpha));
    Ok(())
}

fn fresh_arena() -> ViewArena {
    ViewArena::new()
}

#[test]
fn runs_satisfy_bounds_on_small_corpus() {
    for net in common::small_corpus(4, 12) {
        for alpha in 1..=net.coloring.color_count() {
            for k in k_choices(net.coloring.size_of(alpha)) {
                check_run(&net, k, alpha, Task::LeaderElection).unwrap();
            }
        }
    }
}

#[test]
fn leaders_are_one_node() {
    for seed in 0..30 {
        let net = common::random_network(seed, 8, 4, 3);
        for alpha in 1..=net.coloring.color_count() {
            let k = net.coloring.size_of(alpha) as u32;
            let run = run_protocol(&net, Params::new(k, alpha, Task::LeaderElection)).unwrap();
            let ends: HashSet<Option<NodeId>> = run
                .outcomes
                .iter()
                .enumerate()
                .filter_map(|(u, o)| match o {
                    NodeOutcome::LeaderPath(path) => Some(net.network.walk(u, path)),
                    _ => None,
                })
                .collect();
            if run.outcomes[0] == NodeOutcome::Unsolvable {
                assert!(run.outcomes.iter().all(|o| *o == NodeOutcome::Unsolvable));
            } else {
                assert_eq!(ends.len(), 1);
                assert!(ends.iter().all(Option::is_some));
            }
        }
    }
}

#[test]
fn topology_answers_agree() {
    for seed in 0..30 {
        let net = common::random_network(seed, 7, 3, 2);
        let run = run_protocol(&net, Params::new(7, 1, Task::Topology)).unwrap();
        let graphs: HashSet<_> = run
            .outcomes
            .iter()
            .map(|o| match o {
                NodeOutcome::Topology { graph, .. } => Some(graph.clone()),
                _ => None,
            })
            .collect();
        assert_eq!(graphs.len(), 1);
    }
}

/// Walks from `root` of length at most `l`, one per distinct
/// `(end node, length, running max distance)`, with their view paths.
fn distinct_walks(net: &ColoredNetwork, root: NodeId, l: usize, alpha: Color) -> Vec<(Vec<Port>, Vec<PathStep>)> {
    let n = net.node_count();
    let mut to_alpha = vec![usize::MAX; n];
    for a in (0..n).filter(|&a| net.color(a) == alpha) {
        for (v, d) in net.network.distances_from(a).into_iter().enumerate() {
            to_alpha[v] = to_alpha[v].min(d);
        }
    }
    let capped = |v: NodeId, depth: usize| (to_alpha[v] <= l - depth).then_some(to_alpha[v]);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut stack = vec![(root, Vec::new(), Vec::new(), capped(root, 0))];
    while let Some((v, ports, steps, worst)) = stack.pop() {
        if !seen.insert((v, ports.len(), worst)) {
            continue;
        }
        out.push((ports.clone(), steps.clone()));
        if ports.len() == l {
            continue;
        }
        for p in 0..net.degree(v) {
            let (u, q) = net.neighbor(v, p);
            let depth = ports.len() + 1;
            let worst = match (worst, capped(u, depth)) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            let mut ports = ports.clone();
            ports.push(p);
            let mut steps = steps.clone();
            steps.push((p, q));
            stack.push((u, ports, steps, worst));
        }
    }
    out
}

#[test]
fn repetition_test_implies_a_high_copy() {
    let mut confirmed = 0;
    for seed in 0..12 {
        let n = 3 + seed as usize % 3;
        let net = common::random_network(seed, n, 2, 2);
        let mut arena = ViewArena::new();
        for l in [6usize, 9, 12] {
            for root in 0..n {
                let view = arena.build_view(&net, root, l as u32);
                for k in net.coloring.size_of(1) as u32..=2 {
                    for (ports, steps) in distinct_walks(&net, root, l, 1) {
                        if test_repetition(&mut arena, view, &steps, k, 1).unwrap() {
                            assert!(high_copy_brute(&net, root, &ports, l).unwrap());
                            confirmed += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(confirmed > 0);
}

#[test]
fn renaming_nodes_permutes_outcomes() {
    for seed in 0..20 {
        let net = common::random_network(seed, 7, 3, 2);
        let perm: Vec<usize> = (0..7).map(|v| (v * 3 + seed as usize) % 7).collect();
        let renamed = common::permute(&net, &perm);
        for task in [Task::LeaderElection, Task::Topology] {
            let params = Params::new(7, 1, task);
            let a = run_protocol(&net, params).unwrap();
            let b = run_protocol(&renamed, params).unwrap();
            assert_eq!(a.rounds, b.rounds);
            for v in 0..7 {
                assert_eq!(a.outcomes[v], b.outcomes[perm[v]]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn random_runs_satisfy_bounds(net in common::arb_network(8, 3), slack in 0u32..3, top in any::<bool>()) {
        let task = if top { Task::Topology } else { Task::LeaderElection };
        let k = net.coloring.size_of(1) as u32 + slack;
        check_run(&net, k, 1, task)?;
    }
}
