#![allow(dead_code)]

use colornet::generators::small;
use colornet::netmodel::{Color, ColoredNetwork, Coloring, Edge, PortNetwork};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small-network corpus: exhaustive labelings up to this many per graph.
pub fn small_corpus(max_n: usize, labeling_cap: usize) -> Vec<ColoredNetwork> {
    small::corpus(max_n, 2, labeling_cap, 0x5eed)
}

/// A random connected network: a random spanning tree plus extra edges,
/// random port permutations, colors from `1..=colors` (made surjective).
pub fn random_network(seed: u64, n: usize, extra: usize, colors: Color) -> ColoredNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.gen_range(0..v), v));
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let e = (a.min(b), a.max(b));
        if a != b && !pairs.contains(&e) && !pairs.contains(&(e.1, e.0)) {
            pairs.push(e);
        }
    }
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, &(a, b)) in pairs.iter().enumerate() {
        incident[a].push((i, 0));
        incident[b].push((i, 1));
    }
    let mut ports = vec![[0usize; 2]; pairs.len()];
    for inc in &mut incident {
        inc.shuffle(&mut rng);
        for (p, &(e, side)) in inc.iter().enumerate() {
            ports[e][side] = p;
        }
    }
    let edges: Vec<Edge> = pairs
        .iter()
        .zip(&ports)
        .map(|(&(u, v), &[pu, pv])| Edge { u, pu, v, pv })
        .collect();
    let network = PortNetwork::from_edges(n, &edges).unwrap();
    let colors = colors.min(n as Color);
    let mut assigned: Vec<Color> = (0..n).map(|_| rng.gen_range(1..=colors)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for (c, &v) in (1..=colors).zip(&order) {
        assigned[v] = c;
    }
    ColoredNetwork::new(network, Coloring::new(assigned).unwrap()).unwrap()
}

pub fn arb_network(max_n: usize, max_colors: Color) -> impl Strategy<Value = ColoredNetwork> {
    (2..=max_n, 0..=max_n, 1..=max_colors, any::<u64>())
        .prop_map(|(n, extra, colors, seed)| random_network(seed, n, extra, colors))
}

/// Whether two class maps induce the same equivalence on nodes.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|u| (0..a.len()).all(|v| (a[u] == a[v]) == (b[u] == b[v])))
}

/// Class map induced by equality of the given keys.
pub fn classes_of<T: PartialEq>(keys: &[T]) -> Vec<usize> {
    (0..keys.len())
        .map(|u| (0..=u).find(|&v| keys[v] == keys[u]).unwrap())
        .collect()
}

/// The same network with node `v` renamed to `perm[v]`.
pub fn permute(net: &ColoredNetwork, perm: &[usize]) -> ColoredNetwork {
    let edges: Vec<Edge> = net
        .network
        .edges()
        .into_iter()
        .map(|e| Edge {
            u: perm[e.u],
            pu: e.pu,
            v: perm[e.v],
            pv: e.pv,
        })
        .collect();
    let n = net.node_count();
    let mut colors = vec![0; n];
    for v in 0..n {
        colors[perm[v]] = net.coloring.color(v);
    }
    ColoredNetwork::new(
        PortNetwork::from_edges(n, &edges).unwrap(),
        Coloring::new(colors).unwrap(),
    )
    .unwrap()
}
