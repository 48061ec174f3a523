//! Truncated colored views folded into a hash-consed DAG.
//!
//! The depth-`l` view of a node is a tree with up to `deg^l` nodes, but it has
//! at most one distinct subtree per (network node, height) pair. Every record
//! is interned in a [`ViewArena`], so structurally equal subtrees share one
//! [`ViewRef`] and equality of views is handle equality.
//!
//! A record stores its color, its height (remaining depth), and for each local
//! port `p` the pair `(q, child)` where `q` is the port number at which the
//! edge arrives at the child.

mod encoding;

use std::cmp::Ordering;
use std::sync::{Arc, Mutex};

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::netmodel::{Color, NodeId, Port, PortGraph};

pub use encoding::{compare_encodings, EncodingSource};

/// Handle to an interned view record. Only meaningful with its arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ViewRef(u32);

impl ViewRef {
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn from_index(index: u32) -> Self {
        ViewRef(index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Record {
    pub color: Color,
    pub height: u32,
    /// Indexed by local port: (incoming port at the child, child record).
    pub children: Box<[(Port, ViewRef)]>,
}

/// One step of a path in a view: the local port taken and the port at which
/// the edge arrives at the child.
pub type PathStep = (Port, Port);

/// Distance to a color inside a truncated view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Infinite,
}

impl Distance {
    fn from_raw(raw: u32) -> Self {
        if raw == INFINITE {
            Distance::Infinite
        } else {
            Distance::Finite(raw)
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

const INFINITE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ViewError {
    #[error("neighbor views have mismatched depths ({expected} and {found})")]
    MismatchedDepth { expected: u32, found: u32 },
    #[error("cannot assemble a view from an empty neighbor list")]
    NoNeighbors,
    #[error("path step {step}: port {port} does not exist at a record of degree {degree}")]
    InvalidPort {
        step: usize,
        port: Port,
        degree: usize,
    },
    #[error("path step {step}: edge arrives at port {actual}, path says {expected}")]
    IncomingPortMismatch {
        step: usize,
        expected: Port,
        actual: Port,
    },
    #[error("malformed view encoding at byte {offset}: {message}")]
    Decode { offset: usize, message: String },
}

/// Interning table for view records plus per-record memo tables.
#[derive(Default)]
pub struct ViewArena {
    records: Vec<Record>,
    index: FxHashMap<Record, ViewRef>,
    distances: FxHashMap<(ViewRef, Color), u32>,
    truncations: FxHashMap<(ViewRef, u32), ViewRef>,
    coverage: Option<CoverageCache>,
    uncovered: FxHashMap<(ViewRef, u32, Color), bool>,
    classes: FxHashMap<(ViewRef, u32, u32), Arc<[ViewRef]>>,
}

/// Thresholds of the uncovered-leaf search for one `(l, k, alpha)` context,
/// indexed by record.
#[derive(Default)]
struct CoverageCache {
    key: Option<(u32, u32, Color)>,
    thresholds: Vec<u32>,
    touched: Vec<ViewRef>,
}

const UNSET: u32 = u32::MAX;
const PENDING: u32 = u32::MAX - 1;

/// An arena shared between the nodes of one simulation.
pub type SharedArena = Arc<Mutex<ViewArena>>;

pub fn shared_arena() -> SharedArena {
    Arc::new(Mutex::new(ViewArena::new()))
}

impl ViewArena {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct records interned so far.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn record(&self, v: ViewRef) -> &Record {
        &self.records[v.0 as usize]
    }

    pub fn color(&self, v: ViewRef) -> Color {
        self.record(v).color
    }

    pub fn height(&self, v: ViewRef) -> u32 {
        self.record(v).height
    }

    pub fn children(&self, v: ViewRef) -> &[(Port, ViewRef)] {
        &self.record(v).children
    }

    fn intern(&mut self, record: Record) -> ViewRef {
        if let Some(&v) = self.index.get(&record) {
            return v;
        }
        let v = ViewRef(u32::try_from(self.records.len()).expect("view arena overflow"));
        self.records.push(record.clone());
        self.index.insert(record, v);
        v
    }

    /// The depth-0 view: a single record of the given color.
    pub fn leaf(&mut self, color: Color) -> ViewRef {
        self.intern(Record {
            color,
            height: 0,
            children: Box::new([]),
        })
    }

    /// One communication step: from the depth-`t` views of the neighbors
    /// (listed by local port, each with the port at which the edge arrives
    /// there) builds the own depth-`t+1` view.
    pub fn assemble(
        &mut self,
        color: Color,
        neighbors: &[(Port, ViewRef)],
    ) -> Result<ViewRef, ViewError> {
        let first = neighbors.first().ok_or(ViewError::NoNeighbors)?;
        let expected = self.height(first.1);
        for &(_, child) in neighbors {
            let found = self.height(child);
            if found != expected {
                return Err(ViewError::MismatchedDepth { expected, found });
            }
        }
        Ok(self.intern(Record {
            color,
            height: expected + 1,
            children: neighbors.into(),
        }))
    }

    /// Depth-`depth` views of every node of `graph`, built layer by layer.
    pub fn build_views<G: PortGraph>(&mut self, graph: &G, depth: u32) -> Vec<ViewRef> {
        let mut layer = self.leaves(graph);
        for _ in 0..depth {
            layer = self.extend_views(graph, &layer);
        }
        layer
    }

    /// Depth-0 views of every node of `graph`.
    pub fn leaves<G: PortGraph>(&mut self, graph: &G) -> Vec<ViewRef> {
        (0..graph.node_count())
            .map(|v| self.leaf(graph.color(v)))
            .collect()
    }

    /// From the depth-`t` views of all nodes, their depth-`t+1` views.
    pub fn extend_views<G: PortGraph>(&mut self, graph: &G, layer: &[ViewRef]) -> Vec<ViewRef> {
        (0..graph.node_count())
            .map(|v| {
                let children: Box<[(Port, ViewRef)]> = (0..graph.degree(v))
                    .map(|p| {
                        let (u, q) = graph.neighbor(v, p);
                        (q, layer[u])
                    })
                    .collect();
                let height = children.first().map_or(0, |&(_, c)| self.height(c) + 1);
                self.intern(Record {
                    color: graph.color(v),
                    height,
                    children,
                })
            })
            .collect()
    }

    pub fn build_view<G: PortGraph>(&mut self, graph: &G, v: NodeId, depth: u32) -> ViewRef {
        self.build_views(graph, depth)[v]
    }

    /// The view truncated to `depth` (which must not exceed its height).
    pub fn truncate(&mut self, root: ViewRef, depth: u32) -> ViewRef {
        assert!(
            depth <= self.height(root),
            "cannot truncate a view of height {} to depth {depth}",
            self.height(root)
        );
        if depth == self.height(root) {
            return root;
        }
        if let Some(&t) = self.truncations.get(&(root, depth)) {
            return t;
        }
        let mut stack = vec![(root, depth)];
        while let Some(&(v, d)) = stack.last() {
            if self.truncations.contains_key(&(v, d)) {
                stack.pop();
                continue;
            }
            let record = &self.records[v.0 as usize];
            if d == record.height {
                self.truncations.insert((v, d), v);
                stack.pop();
                continue;
            }
            if d == 0 {
                let color = record.color;
                let leaf = self.leaf(color);
                self.truncations.insert((v, d), leaf);
                stack.pop();
                continue;
            }
            let before = stack.len();
            for &(_, c) in record.children.iter() {
                if !self.truncations.contains_key(&(c, d - 1)) {
                    stack.push((c, d - 1));
                }
            }
            if stack.len() > before {
                continue;
            }
            let record = &self.records[v.0 as usize];
            let color = record.color;
            let children: Box<[(Port, ViewRef)]> = record
                .children
                .iter()
                .map(|&(q, c)| (q, self.truncations[&(c, d - 1)]))
                .collect();
            let t = self.intern(Record {
                color,
                height: d,
                children,
            });
            self.truncations.insert((v, d), t);
            stack.pop();
        }
        self.truncations[&(root, depth)]
    }

    /// Length of the shortest path from the root to a record of color
    /// `alpha`, inside this (truncated) view.
    pub fn dist_to_color(&mut self, root: ViewRef, alpha: Color) -> Distance {
        Distance::from_raw(self.raw_distance(root, alpha))
    }

    fn raw_distance(&mut self, root: ViewRef, alpha: Color) -> u32 {
        let mut stack = vec![root];
        while let Some(&v) = stack.last() {
            if self.distances.contains_key(&(v, alpha)) {
                stack.pop();
                continue;
            }
            let record = self.record(v);
            if record.color == alpha || record.children.is_empty() {
                let d = if record.color == alpha { 0 } else { INFINITE };
                self.distances.insert((v, alpha), d);
                stack.pop();
                continue;
            }
            let mut best = INFINITE;
            let mut pending = Vec::new();
            for &(_, c) in record.children.iter() {
                match self.distances.get(&(c, alpha)) {
                    Some(&d) => best = best.min(d),
                    None => pending.push(c),
                }
            }
            if pending.is_empty() {
                let d = if best == INFINITE { INFINITE } else { best + 1 };
                self.distances.insert((v, alpha), d);
                stack.pop();
            } else {
                stack.extend(pending);
            }
        }
        self.distances[&(root, alpha)]
    }

    /// The record at the end of `path` and its remaining depth.
    pub fn resolve(&self, root: ViewRef, path: &[PathStep]) -> Result<(ViewRef, u32), ViewError> {
        let mut v = root;
        for (step, &(p, q)) in path.iter().enumerate() {
            let children = self.children(v);
            let &(actual, child) = children.get(p).ok_or(ViewError::InvalidPort {
                step,
                port: p,
                degree: children.len(),
            })?;
            if actual != q {
                return Err(ViewError::IncomingPortMismatch {
                    step,
                    expected: q,
                    actual,
                });
            }
            v = child;
        }
        Ok((v, self.height(v)))
    }

    /// True iff some root-to-leaf path of the conceptual tree has no prefix
    /// node `v` with `|P(v)| >= 2(k+1)(d'+1)`, where `d'` is the running
    /// maximum of distances to `alpha` over the prefix (each distance taken
    /// inside the subtree below that prefix node).
    ///
    /// Walking the DAG with state `(record, running max)` would revisit each
    /// record once per running-max value. Instead each record gets a
    /// threshold `theta`: an uncovered leaf is reachable below it iff the
    /// running max on entry is at least `theta`. With `c = floor(depth /
    /// 2(k+1))` (a prefix node is covered iff the running max is below `c`)
    /// and `r = max(c, min theta(children))`, `theta = 0` if the record's own
    /// distance is at least `r`, else `r`.
    pub fn uncovered_leaf_exists(&mut self, root: ViewRef, k: u32, alpha: Color) -> bool {
        if let Some(&exists) = self.uncovered.get(&(root, k, alpha)) {
            return exists;
        }
        let l = self.height(root);
        let key = (l, k, alpha);
        let mut cache = self.coverage.take().unwrap_or_default();
        if cache.key != Some(key) {
            for v in cache.touched.drain(..) {
                cache.thresholds[v.0 as usize] = UNSET;
            }
            cache.key = Some(key);
        }
        cache.thresholds.resize(self.records.len(), UNSET);
        if cache.thresholds[root.0 as usize] == UNSET {
            // Breadth-first order lists records by decreasing height, so the
            // reverse order sees children before parents.
            cache.thresholds[root.0 as usize] = PENDING;
            let mut order = vec![root];
            let mut next = 0;
            while next < order.len() {
                for &(_, c) in self.records[order[next].0 as usize].children.iter() {
                    let slot = &mut cache.thresholds[c.0 as usize];
                    if *slot == UNSET {
                        *slot = PENDING;
                        order.push(c);
                    }
                }
                next += 1;
            }
            let span = 2 * (u64::from(k) + 1);
            for &v in order.iter().rev() {
                let below = self.records[v.0 as usize]
                    .children
                    .iter()
                    .map(|&(_, c)| cache.thresholds[c.0 as usize])
                    .min()
                    .unwrap_or(0);
                let depth = u64::from(l - self.height(v));
                let cutoff = u32::try_from(depth / span).expect("depth fits in u32");
                let r = cutoff.max(below);
                let own = self.raw_distance(v, alpha);
                cache.thresholds[v.0 as usize] = if own >= r { 0 } else { r };
                cache.touched.push(v);
            }
        }
        let exists = cache.thresholds[root.0 as usize] == 0;
        self.coverage = Some(cache);
        self.uncovered.insert((root, k, alpha), exists);
        exists
    }

    /// Distinct depth-`depth` truncations of the records within `within` of
    /// the root, in breadth-first discovery order.
    pub fn distinct_truncations(&mut self, root: ViewRef, within: u32, depth: u32) -> Arc<[ViewRef]> {
        if let Some(found) = self.classes.get(&(root, within, depth)) {
            return found.clone();
        }
        let mut seen = FxHashSet::default();
        let mut classes = Vec::new();
        for x in self.records_within_depth(root, within) {
            let t = self.truncate(x, depth);
            if seen.insert(t) {
                classes.push(t);
            }
        }
        let classes: Arc<[ViewRef]> = classes.into();
        self.classes.insert((root, within, depth), classes.clone());
        classes
    }

    /// Distinct records at depth at most `max_depth` below `root`.
    pub fn records_within_depth(&self, root: ViewRef, max_depth: u32) -> Vec<ViewRef> {
        let floor = self.height(root).saturating_sub(max_depth);
        let mut seen = FxHashSet::default();
        seen.insert(root);
        let mut order = vec![root];
        let mut next = 0;
        while next < order.len() {
            let v = order[next];
            next += 1;
            for &(_, c) in self.children(v) {
                if self.height(c) >= floor && seen.insert(c) {
                    order.push(c);
                }
            }
        }
        order
    }

    /// Byte-wise order of the canonical encodings, computed without
    /// materializing them.
    pub fn compare_encodings(&self, a: ViewRef, b: ViewRef) -> Ordering {
        compare_encodings(self, a, b)
    }
}

impl EncodingSource for ViewArena {
    type Node = ViewRef;

    fn color(&self, node: ViewRef) -> Color {
        self.record(node).color
    }

    fn children(&self, node: ViewRef) -> Vec<(Port, ViewRef)> {
        self.record(node).children.to_vec()
    }

    fn same(&self, a: ViewRef, b: ViewRef) -> bool {
        a == b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::ColoredNetwork;

    fn path2() -> ColoredNetwork {
        ColoredNetwork::parse("n 2\ncolors 1 2\nedge 0 0 1 0\n").unwrap()
    }

    fn oriented_ring(n: usize) -> ColoredNetwork {
        let mut text = format!("n {n}\ncolors{}\n", " 1".repeat(n));
        for i in 0..n {
            text.push_str(&format!("edge {i} 0 {} 1\n", (i + 1) % n));
        }
        ColoredNetwork::parse(&text).unwrap()
    }

    #[test]
    fn depth_zero_is_a_single_record() {
        let net = path2();
        let mut arena = ViewArena::new();
        let v = arena.build_view(&net, 1, 0);
        assert_eq!(arena.record(v).color, 2);
        assert!(arena.children(v).is_empty());
        assert_eq!(arena.encode(v), "(2)");
    }

    #[test]
    fn one_unrolling_of_the_path() {
        let net = path2();
        let mut arena = ViewArena::new();
        let v = arena.build_view(&net, 0, 1);
        let leaf = arena.leaf(2);
        assert_eq!(arena.children(v), &[(0, leaf)]);
        assert_eq!(arena.encode(v), "(1 0:0(2))");
    }

    #[test]
    fn symmetric_ring_views_coincide() {
        let net = oriented_ring(6);
        let mut arena = ViewArena::new();
        for l in 0..8 {
            let views = arena.build_views(&net, l);
            assert!(views.iter().all(|&v| v == views[0]));
        }
    }

    #[test]
    fn assemble_matches_build() {
        let net = path2();
        let mut arena = ViewArena::new();
        let leaf = arena.leaf(2);
        let v = arena.assemble(1, &[(0, leaf)]).unwrap();
        assert_eq!(v, arena.build_view(&net, 0, 1));
        assert_eq!(arena.assemble(1, &[]), Err(ViewError::NoNeighbors));
        let deeper = arena.build_view(&net, 1, 1);
        assert_eq!(
            arena.assemble(1, &[(0, leaf), (0, deeper)]),
            Err(ViewError::MismatchedDepth {
                expected: 0,
                found: 1
            })
        );
    }

    #[test]
    fn distances_to_color() {
        let net = path2();
        let mut arena = ViewArena::new();
        let v = arena.build_view(&net, 0, 1);
        assert_eq!(arena.dist_to_color(v, 1), Distance::Finite(0));
        assert_eq!(arena.dist_to_color(v, 2), Distance::Finite(1));
        assert_eq!(arena.dist_to_color(v, 3), Distance::Infinite);
        let leaf = arena.build_view(&net, 1, 0);
        assert_eq!(arena.dist_to_color(leaf, 1), Distance::Infinite);
    }

    #[test]
    fn resolve_paths() {
        let net = path2();
        let mut arena = ViewArena::new();
        let v = arena.build_view(&net, 0, 1);
        assert_eq!(arena.resolve(v, &[]).unwrap(), (v, 1));
        let leaf = arena.leaf(2);
        assert_eq!(arena.resolve(v, &[(0, 0)]).unwrap(), (leaf, 0));
        assert_eq!(
            arena.resolve(v, &[(1, 0)]),
            Err(ViewError::InvalidPort {
                step: 0,
                port: 1,
                degree: 1
            })
        );
        assert_eq!(
            arena.resolve(v, &[(0, 1)]),
            Err(ViewError::IncomingPortMismatch {
                step: 0,
                expected: 1,
                actual: 0
            })
        );
    }

    #[test]
    fn truncation_is_consistent() {
        let net = oriented_ring(5);
        let mut arena = ViewArena::new();
        for l in 1..6 {
            for v in 0..5 {
                let full = arena.build_view(&net, v, l);
                let shorter = arena.build_view(&net, v, l - 1);
                assert_eq!(arena.truncate(full, l - 1), shorter);
                assert_eq!(arena.truncate(full, l), full);
            }
        }
    }

    #[test]
    fn uncovered_leaf_on_two_node_path() {
        // Colors (alpha, beta) with alpha = 1 and k = 1: every prefix has
        // running max 1, so leaves are covered from depth 2*2*2 = 8 on.
        let net = path2();
        let mut arena = ViewArena::new();
        for l in 1..=7 {
            let v = arena.build_view(&net, 0, l);
            assert!(arena.uncovered_leaf_exists(v, 1, 1), "l = {l}");
        }
        let v = arena.build_view(&net, 0, 8);
        assert!(!arena.uncovered_leaf_exists(v, 1, 1));
        // The beta end sees a color-2 leaf at even depth with infinite
        // distance, so it needs one more level.
        let v = arena.build_view(&net, 1, 8);
        assert!(arena.uncovered_leaf_exists(v, 1, 1));
        let v = arena.build_view(&net, 1, 9);
        assert!(!arena.uncovered_leaf_exists(v, 1, 1));
    }

    #[test]
    fn depth_one_never_covers() {
        let net = oriented_ring(3);
        let mut arena = ViewArena::new();
        let v = arena.build_view(&net, 0, 1);
        for k in 1..5 {
            assert!(arena.uncovered_leaf_exists(v, k, 1));
        }
    }

    #[test]
    fn records_within_depth_collects_distinct_records() {
        let net = oriented_ring(4);
        let mut arena = ViewArena::new();
        let v = arena.build_view(&net, 0, 6);
        // one distinct record per height on a symmetric ring
        assert_eq!(arena.records_within_depth(v, 3).len(), 4);
        assert_eq!(arena.records_within_depth(v, 6).len(), 7);
    }
}
