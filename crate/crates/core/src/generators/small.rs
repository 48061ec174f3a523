//! Enumeration of small connected port-labeled colored networks.
//!
//! Graphs are enumerated up to isomorphism. Port labelings and colorings are
//! enumerated exhaustively on top of each graph, except that a graph with
//! more labelings than a given cap gets a seeded random sample of that size.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::netmodel::{Color, ColoredNetwork, Coloring, Edge, PortNetwork};

/// Connected simple graphs on `n` nodes, one per isomorphism class, as
/// sorted edge lists.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let perms = permutations(n);
    let mut seen = std::collections::HashSet::new();
    let mut graphs = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if !is_connected(n, &edges) {
            continue;
        }
        let canonical = perms
            .iter()
            .map(|perm| {
                let mut relabeled: Vec<(usize, usize)> = edges
                    .iter()
                    .map(|&(a, b)| {
                        let (x, y) = (perm[a], perm[b]);
                        (x.min(y), x.max(y))
                    })
                    .collect();
                relabeled.sort_unstable();
                relabeled
            })
            .min()
            .expect("at least one permutation");
        if seen.insert(canonical) {
            graphs.push(edges);
        }
    }
    graphs
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !reached[y] {
                    reached[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    reached.into_iter().all(|r| r)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for perm in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

/// Port labelings of a graph: every assignment of ports `0..deg(v)` to the
/// edges at each node. Returns all of them if there are at most `cap`,
/// otherwise `cap` distinct ones drawn with the given seed.
pub fn port_labelings(n: usize, edges: &[(usize, usize)], cap: usize, seed: u64) -> Vec<PortNetwork> {
    // incident[v] lists (edge index, side) in edge order
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        incident[a].push((i, 0));
        incident[b].push((i, 1));
    }
    let per_node: Vec<Vec<Vec<usize>>> = incident.iter().map(|inc| permutations(inc.len())).collect();
    let total = per_node
        .iter()
        .try_fold(1usize, |acc, p| acc.checked_mul(p.len()));
    let build = |choice: &[usize]| -> PortNetwork {
        let mut ports = vec![[0usize; 2]; edges.len()];
        for v in 0..n {
            let perm = &per_node[v][choice[v]];
            for (slot, &(edge, side)) in incident[v].iter().enumerate() {
                ports[edge][side] = perm[slot];
            }
        }
        let list: Vec<Edge> = edges
            .iter()
            .zip(&ports)
            .map(|(&(u, v), &[pu, pv])| Edge { u, pu, v, pv })
            .collect();
        PortNetwork::from_edges(n, &list).expect("labeling of a connected simple graph is valid")
    };
    match total {
        Some(total) if total <= cap => {
            let mut out = Vec::with_capacity(total);
            let mut choice = vec![0usize; n];
            loop {
                out.push(build(&choice));
                let mut v = 0;
                loop {
                    if v == n {
                        return out;
                    }
                    choice[v] += 1;
                    if choice[v] < per_node[v].len() {
                        break;
                    }
                    choice[v] = 0;
                    v += 1;
                }
            }
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = std::collections::BTreeSet::new();
            while picked.len() < cap {
                let choice: Vec<usize> = per_node
                    .iter()
                    .map(|options| {
                        let indices: Vec<usize> = (0..options.len()).collect();
                        *indices.choose(&mut rng).expect("non-empty")
                    })
                    .collect();
                picked.insert(choice);
            }
            picked.iter().map(|choice| build(choice)).collect()
        }
    }
}

/// Colorings of `n` nodes surjective onto `1..=c` for some `c <= max_colors`.
pub fn colorings(n: usize, max_colors: Color) -> Vec<Coloring> {
    let mut out = Vec::new();
    let mut colors = vec![1 as Color; n];
    loop {
        if let Ok(coloring) = Coloring::new(colors.clone()) {
            out.push(coloring);
        }
        let mut v = 0;
        loop {
            if v == n {
                return out;
            }
            colors[v] += 1;
            if colors[v] <= max_colors {
                break;
            }
            colors[v] = 1;
            v += 1;
        }
    }
}

/// Every connected colored network with `2 <= n <= max_n` nodes over at most
/// `max_colors` colors, with labelings capped per graph as in
/// [`port_labelings`].
pub fn corpus(max_n: usize, max_colors: Color, labeling_cap: usize, seed: u64) -> Vec<ColoredNetwork> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        for (g, edges) in connected_graphs(n).iter().enumerate() {
            let graph_seed = seed ^ ((n as u64) << 32 | g as u64);
            for network in port_labelings(n, edges, labeling_cap, graph_seed) {
                for coloring in colorings(n, max_colors) {
                    out.push(
                        ColoredNetwork::new(network.clone(), coloring).expect("sizes match"),
                    );
                }
            }
        }
    }
    out
}

/// The values of `k` tried for a color of size `a`: tight, one above, double.
pub fn k_choices(a: usize) -> Vec<u32> {
    let a = a as u32;
    let mut ks = vec![a, a + 1, 2 * a];
    ks.dedup();
    ks
}
