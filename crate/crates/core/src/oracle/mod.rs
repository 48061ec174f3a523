//! Centralized reference answers computed from the whole network.
//!
//! Partition refinement gives the classes of nodes with equal views, the
//! quotient graph follows from one representative per class, and the
//! feasibility verdict, leader and port paths are read off directly.

pub mod brute;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet, VecDeque};

use thiserror::Error;

use crate::netmodel::{Color, ColoredNetwork, Coloring, NodeId, Port, PortGraph, QuotientGraph};
use crate::protocol::{NodeOutcome, Task};
use crate::views::{compare_encodings, EncodingSource, ViewArena, ViewRef};

/// Class id per node.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    pub class_of: Vec<usize>,
    pub class_count: usize,
    /// Refinement index this partition belongs to.
    pub index: usize,
}

impl Partition {
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count];
        for &c in &self.class_of {
            sizes[c] += 1;
        }
        sizes
    }

    /// The common class size, if all classes have the same size.
    pub fn common_size(&self) -> Option<usize> {
        let sizes = self.class_sizes();
        sizes.iter().all(|&s| s == sizes[0]).then_some(sizes[0])
    }
}

/// Partition by color, with class ids in increasing color order.
pub fn color_partition<G: PortGraph>(graph: &G) -> Partition {
    let keys: Vec<Color> = (0..graph.node_count()).map(|v| graph.color(v)).collect();
    number_by_keys(&keys, 0)
}

/// One refinement step: nodes stay together iff they were together and, on
/// every port, reach the same neighbor class through the same incoming port.
pub fn refine<G: PortGraph>(graph: &G, partition: &Partition) -> Partition {
    let keys: Vec<(usize, Vec<(Port, usize)>)> = (0..graph.node_count())
        .map(|v| {
            let ports = (0..graph.degree(v))
                .map(|p| {
                    let (u, q) = graph.neighbor(v, p);
                    (q, partition.class_of[u])
                })
                .collect();
            (partition.class_of[v], ports)
        })
        .collect();
    number_by_keys(&keys, partition.index + 1)
}

fn number_by_keys<K: Ord + Clone>(keys: &[K], index: usize) -> Partition {
    let ids: BTreeMap<&K, usize> = keys.iter().map(|k| (k, 0)).collect();
    let ids: BTreeMap<&K, usize> = ids.into_keys().enumerate().map(|(i, k)| (k, i)).collect();
    Partition {
        class_of: keys.iter().map(|k| ids[k]).collect(),
        class_count: ids.len(),
        index,
    }
}

/// The refinement sequence up to its fixpoint.
#[derive(Clone, Debug)]
pub struct StablePartition {
    /// `history[t]` is the partition by depth-`t` views, for `t <= t_star`.
    pub history: Vec<Partition>,
    /// First index with `Pi_t = Pi_(t+1)`.
    pub t_star: usize,
}

impl StablePartition {
    pub fn partition(&self) -> &Partition {
        &self.history[self.t_star]
    }
}

pub fn stable_partition<G: PortGraph>(graph: &G) -> StablePartition {
    let mut history = vec![color_partition(graph)];
    loop {
        let last = history.last().expect("non-empty history");
        let next = refine(graph, last);
        if next.class_count == last.class_count {
            let t_star = history.len() - 1;
            return StablePartition { history, t_star };
        }
        history.push(next);
    }
}

/// Encoding source for depth-limited views of network nodes. Two nodes at
/// equal residual depth have equal encodings iff they share a class of the
/// partition at that depth.
struct NetworkViews<'a, G> {
    graph: &'a G,
    history: &'a [Partition],
}

impl<G: PortGraph> EncodingSource for NetworkViews<'_, G> {
    type Node = (NodeId, usize);

    fn color(&self, (v, _): (NodeId, usize)) -> Color {
        self.graph.color(v)
    }

    fn children(&self, (v, depth): (NodeId, usize)) -> Vec<(Port, (NodeId, usize))> {
        if depth == 0 {
            return Vec::new();
        }
        (0..self.graph.degree(v))
            .map(|p| {
                let (u, q) = self.graph.neighbor(v, p);
                (q, (u, depth - 1))
            })
            .collect()
    }

    fn same(&self, (a, da): (NodeId, usize), (b, db): (NodeId, usize)) -> bool {
        da == db && self.history[da].class_of[a] == self.history[da].class_of[b]
    }
}

/// Byte order of the canonical encodings of the depth-`depth` views of `a`
/// and `b`; `depth` must not exceed the last index of `history`.
pub fn compare_node_views<G: PortGraph>(
    graph: &G,
    history: &[Partition],
    a: NodeId,
    b: NodeId,
    depth: usize,
) -> Ordering {
    compare_encodings(&NetworkViews { graph, history }, (a, depth), (b, depth))
}

#[derive(Clone, Debug)]
pub struct Quotient {
    /// Classes numbered in increasing order of their depth-`t_star` view
    /// encodings.
    pub graph: QuotientGraph,
    pub class_of: Vec<usize>,
    pub t_star: usize,
    /// Common class size.
    pub sigma: usize,
}

pub fn quotient<G: PortGraph>(graph: &G) -> Quotient {
    let stable = stable_partition(graph);
    let partition = stable.partition();
    let mut representative = vec![usize::MAX; partition.class_count];
    for v in (0..graph.node_count()).rev() {
        representative[partition.class_of[v]] = v;
    }
    let mut order: Vec<usize> = (0..partition.class_count).collect();
    order.sort_by(|&a, &b| {
        compare_node_views(
            graph,
            &stable.history,
            representative[a],
            representative[b],
            stable.t_star,
        )
    });
    let mut canonical = vec![0; partition.class_count];
    for (id, &class) in order.iter().enumerate() {
        canonical[class] = id;
    }
    let class_of: Vec<usize> = partition.class_of.iter().map(|&c| canonical[c]).collect();
    let mut ports: Vec<Option<Vec<(usize, Port)>>> = vec![None; partition.class_count];
    for v in 0..graph.node_count() {
        let row: Vec<(usize, Port)> = (0..graph.degree(v))
            .map(|p| {
                let (u, q) = graph.neighbor(v, p);
                (class_of[u], q)
            })
            .collect();
        match &ports[class_of[v]] {
            None => ports[class_of[v]] = Some(row),
            Some(existing) => assert_eq!(
                existing, &row,
                "nodes of one stable class disagree on their edges"
            ),
        }
    }
    let colors = order
        .iter()
        .map(|&class| graph.color(representative[class]))
        .collect();
    let ports = ports.into_iter().map(|row| row.expect("class has a node")).collect();
    let graph_q = QuotientGraph::new(colors, ports).expect("quotient of a valid network is valid");
    let sigma = partition
        .common_size()
        .expect("stable classes have equal sizes");
    Quotient {
        graph: graph_q,
        class_of,
        t_star: stable.t_star,
        sigma,
    }
}

/// False iff color `alpha` has at most `floor(k/2)` classes and the quotient
/// is not a tree.
pub fn feasible(q: &QuotientGraph, k: u32, alpha: Color) -> bool {
    !(q.classes_with_color(alpha) as u64 <= u64::from(k / 2) && !q.is_tree())
}

pub fn validate_k(coloring: &Coloring, alpha: Color, k: u32) -> bool {
    coloring.size_of(alpha) as u64 <= u64::from(k)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("k = {k} is below the number of nodes of color {alpha} ({actual})")]
    KTooSmall { k: u32, alpha: Color, actual: usize },
    #[error("color {0} does not occur in the network")]
    AlphaAbsent(Color),
    #[error("brute-force check limited to n <= {max_n} and l <= {max_l}")]
    TooLarge { max_n: usize, max_l: usize },
    #[error("walk leaves the network at step {0}")]
    InvalidWalk(usize),
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub quotient: Quotient,
    pub feasible: bool,
    pub leader: Option<NodeId>,
    pub outcomes: Vec<NodeOutcome>,
}

pub fn oracle_solve(
    net: &ColoredNetwork,
    k: u32,
    alpha: Color,
    task: Task,
) -> Result<Solution, OracleError> {
    let actual = net.coloring.size_of(alpha);
    if actual == 0 {
        return Err(OracleError::AlphaAbsent(alpha));
    }
    if !validate_k(&net.coloring, alpha, k) {
        return Err(OracleError::KTooSmall { k, alpha, actual });
    }
    let quotient = quotient(net);
    let feasible = feasible(&quotient.graph, k, alpha);
    let n = net.node_count();
    if !feasible {
        return Ok(Solution {
            quotient,
            feasible,
            leader: None,
            outcomes: vec![NodeOutcome::Unsolvable; n],
        });
    }
    assert_eq!(quotient.sigma, 1, "feasible instance with non-trivial classes");
    let leader = quotient
        .class_of
        .iter()
        .position(|&c| c == 0)
        .expect("class 0 exists");
    let outcomes = match task {
        Task::Topology => quotient
            .class_of
            .iter()
            .map(|&own| NodeOutcome::Topology {
                graph: quotient.graph.clone(),
                own,
            })
            .collect(),
        Task::LeaderElection => leader_paths(net, leader)
            .into_iter()
            .map(NodeOutcome::LeaderPath)
            .collect(),
    };
    Ok(Solution {
        quotient,
        feasible,
        leader: Some(leader),
        outcomes,
    })
}

/// For every node, the lexicographically smallest among the shortest port
/// sequences leading to `target`.
pub fn leader_paths<G: PortGraph>(graph: &G, target: NodeId) -> Vec<Vec<Port>> {
    let n = graph.node_count();
    let mut dist = vec![usize::MAX; n];
    dist[target] = 0;
    let mut queue = VecDeque::from([target]);
    while let Some(v) = queue.pop_front() {
        for p in 0..graph.degree(v) {
            let (u, _) = graph.neighbor(v, p);
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    (0..n)
        .map(|start| {
            let mut path = Vec::with_capacity(dist[start]);
            let mut v = start;
            while v != target {
                let p = (0..graph.degree(v))
                    .find(|&p| dist[graph.neighbor(v, p).0] + 1 == dist[v])
                    .expect("a neighbor is closer to the target");
                path.push(p);
                v = graph.neighbor(v, p).0;
            }
            path
        })
        .collect()
}

/// Whether the tree node reached by `walk` from `root` in the depth-`l` view
/// has a copy at a strictly smaller depth: some shorter walk from `root`
/// ends at the same network node.
pub fn high_copy_brute(
    net: &ColoredNetwork,
    root: NodeId,
    walk: &[Port],
    l: usize,
) -> Result<bool, OracleError> {
    const MAX_N: usize = 6;
    const MAX_L: usize = 12;
    if net.node_count() > MAX_N || l > MAX_L || walk.len() > l {
        return Err(OracleError::TooLarge {
            max_n: MAX_N,
            max_l: MAX_L,
        });
    }
    let mut target = root;
    for (i, &p) in walk.iter().enumerate() {
        if p >= net.degree(target) {
            return Err(OracleError::InvalidWalk(i));
        }
        target = net.neighbor(target, p).0;
    }
    let mut found = false;
    let mut stack = if walk.is_empty() { Vec::new() } else { vec![(root, 0)] };
    while let Some((v, len)) = stack.pop() {
        if v == target {
            found = true;
            break;
        }
        if len + 1 < walk.len() {
            for p in 0..net.degree(v) {
                stack.push((net.neighbor(v, p).0, len + 1));
            }
        }
    }
    Ok(found)
}

/// Network nodes represented by the records of `view` within depth `within`,
/// given that `view` is a view of `root`.
pub fn represented_nodes<G: PortGraph>(
    arena: &ViewArena,
    graph: &G,
    view: ViewRef,
    root: NodeId,
    within: u32,
) -> Vec<bool> {
    let mut seen = HashSet::new();
    let mut covered = vec![false; graph.node_count()];
    let floor = arena.height(view).saturating_sub(within);
    let mut stack = vec![(view, root)];
    while let Some((record, v)) = stack.pop() {
        if !seen.insert((record, v)) {
            continue;
        }
        covered[v] = true;
        for (p, &(_, child)) in arena.children(record).iter().enumerate() {
            if arena.height(child) >= floor {
                stack.push((child, graph.neighbor(v, p).0));
            }
        }
    }
    covered
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(colors: &[Color], ports: (Port, Port)) -> ColoredNetwork {
        let n = colors.len();
        let mut text = format!("n {n}\ncolors");
        for c in colors {
            text.push_str(&format!(" {c}"));
        }
        text.push('\n');
        for i in 0..n {
            text.push_str(&format!("edge {i} {} {} {}\n", ports.0, (i + 1) % n, ports.1));
        }
        ColoredNetwork::parse(&text).unwrap()
    }

    fn path2() -> ColoredNetwork {
        ColoredNetwork::parse("n 2\ncolors 1 2\nedge 0 0 1 0\n").unwrap()
    }

    #[test]
    fn distinct_colors_are_discrete_at_once() {
        let stable = stable_partition(&ring(&[1, 2, 3, 4], (0, 1)));
        assert_eq!(stable.t_star, 0);
        assert_eq!(stable.partition().class_count, 4);
    }

    #[test]
    fn uniform_oriented_ring_is_one_class() {
        let net = ring(&[1; 6], (0, 1));
        let q = quotient(&net);
        assert_eq!(q.t_star, 0);
        assert_eq!(q.sigma, 6);
        assert_eq!(q.graph.ports(0), &[(0, 1), (0, 0)]);
    }

    #[test]
    fn alternating_colors_give_two_classes_of_three() {
        let q = quotient(&ring(&[1, 2, 1, 2, 1, 2], (0, 1)));
        assert_eq!(q.graph.class_count(), 2);
        assert_eq!(q.sigma, 3);
        assert_eq!(q.class_of, vec![0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn path_quotient_is_the_path() {
        let q = quotient(&path2());
        assert_eq!(q.graph.class_count(), 2);
        assert!(q.graph.is_tree());
        assert_eq!(q.sigma, 1);
    }

    #[test]
    fn feasibility_examples() {
        let looped = QuotientGraph::new(vec![1], vec![vec![(0, 1), (0, 0)]]).unwrap();
        assert!(!feasible(&looped, 2, 1));
        assert!(feasible(&looped, 1, 1));
        let path = quotient(&path2()).graph;
        for k in 1..5 {
            assert!(feasible(&path, k, 1));
        }
    }

    #[test]
    fn k_guard() {
        let all = Coloring::uniform(4);
        assert!(validate_k(&all, 1, 4));
        assert!(!validate_k(&all, 1, 3));
        let single = Coloring::new(vec![1, 2, 2]).unwrap();
        assert!(validate_k(&single, 1, 1));
        assert_eq!(
            oracle_solve(&ring(&[1; 4], (0, 1)), 3, 1, Task::Topology).unwrap_err(),
            OracleError::KTooSmall { k: 3, alpha: 1, actual: 4 }
        );
    }

    #[test]
    fn two_node_path_solution() {
        let sol = oracle_solve(&path2(), 1, 1, Task::LeaderElection).unwrap();
        assert_eq!(sol.leader, Some(0));
        assert_eq!(
            sol.outcomes,
            vec![NodeOutcome::LeaderPath(vec![]), NodeOutcome::LeaderPath(vec![0])]
        );
        let sol = oracle_solve(&ring(&[1; 4], (0, 1)), 4, 1, Task::LeaderElection).unwrap();
        assert!(!sol.feasible);
        assert_eq!(sol.outcomes, vec![NodeOutcome::Unsolvable; 4]);
    }

    #[test]
    fn high_copy_examples() {
        let net = path2();
        assert!(!high_copy_brute(&net, 0, &[], 4).unwrap());
        assert!(high_copy_brute(&net, 0, &[0, 0], 4).unwrap());
        assert!(!high_copy_brute(&net, 0, &[0], 4).unwrap());
        assert_eq!(high_copy_brute(&net, 0, &[1], 4), Err(OracleError::InvalidWalk(0)));
        assert!(matches!(high_copy_brute(&net, 0, &[0], 13), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn node_view_order_matches_arena_order() {
        let net = ring(&[1, 2, 2, 3, 3, 3], (0, 1));
        let stable = stable_partition(&net);
        let mut arena = ViewArena::new();
        let t = stable.t_star;
        let views = arena.build_views(&net, t as u32);
        for a in 0..6 {
            for b in 0..6 {
                assert_eq!(
                    compare_node_views(&net, &stable.history, a, b, t),
                    arena.compare_encodings(views[a], views[b])
                );
            }
        }
    }
}
