//! Colored port-labeled networks and colored quotient multigraphs.
//!
//! A [`PortNetwork`] is a simple connected undirected graph in which every
//! node numbers its incident edges `0..deg`. The two endpoints of an edge may
//! carry unrelated numbers. A [`Coloring`] maps nodes onto `1..=c`. A
//! [`QuotientGraph`] has the same port structure but may contain self-loops
//! and multi-edges, so it is kept as a separate type.
//!
//! Both implement [`PortGraph`], which is all the view machinery needs.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Color = u32;
pub type NodeId = usize;
pub type Port = usize;

/// Read-only access to a colored port-labeled (multi)graph.
pub trait PortGraph {
    fn node_count(&self) -> usize;
    fn degree(&self, v: NodeId) -> usize;
    /// The node reached through port `port` of `v`, and the port number at
    /// which the edge arrives there.
    fn neighbor(&self, v: NodeId, port: Port) -> (NodeId, Port);
    fn color(&self, v: NodeId) -> Color;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("network has no nodes")]
    Empty,
    #[error("node {node} is out of range (n = {n})")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {node}")]
    SelfLoop { node: NodeId },
    #[error("parallel edges between nodes {u} and {v}")]
    ParallelEdge { u: NodeId, v: NodeId },
    #[error("node {node}: port {port} is used twice")]
    DuplicatePort { node: NodeId, port: Port },
    #[error("node {node}: ports must be exactly 0..{degree}, port {port} is missing")]
    MissingPort {
        node: NodeId,
        port: Port,
        degree: usize,
    },
    #[error("node {node} port {port} points to ({target}, {target_port}), which does not point back")]
    Asymmetric {
        node: NodeId,
        port: Port,
        target: NodeId,
        target_port: Port,
    },
    #[error("graph is disconnected: node {node} is unreachable from node 0")]
    Disconnected { node: NodeId },
    #[error("coloring has {got} entries for {n} nodes")]
    ColorCountMismatch { got: usize, n: usize },
    #[error("node {node} has color 0; colors start at 1")]
    ZeroColor { node: NodeId },
    #[error("node {node} has color {color}, above the color count {count}")]
    ColorAboveCount {
        node: NodeId,
        color: Color,
        count: Color,
    },
    #[error("color {color} is unused; a coloring must be onto 1..={count}")]
    UnusedColor { color: Color, count: Color },
    #[error("invalid quotient graph JSON: {0}")]
    Json(String),
}

/// A simple connected undirected graph with local port numbers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PortNetwork {
    adjacency: Vec<Vec<(NodeId, Port)>>,
}

/// An undirected edge `{(u, pu), (v, pv)}`, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: NodeId,
    pub pu: Port,
    pub v: NodeId,
    pub pv: Port,
}

impl PortNetwork {
    /// Validates a per-node port table.
    pub fn new(adjacency: Vec<Vec<(NodeId, Port)>>) -> Result<Self, NetworkError> {
        let n = adjacency.len();
        if n == 0 {
            return Err(NetworkError::Empty);
        }
        for (v, ports) in adjacency.iter().enumerate() {
            let mut seen = vec![false; n];
            for (p, &(u, q)) in ports.iter().enumerate() {
                if u >= n {
                    return Err(NetworkError::NodeOutOfRange { node: u, n });
                }
                if u == v {
                    return Err(NetworkError::SelfLoop { node: v });
                }
                if seen[u] {
                    return Err(NetworkError::ParallelEdge {
                        u: v.min(u),
                        v: v.max(u),
                    });
                }
                seen[u] = true;
                if adjacency[u].get(q) != Some(&(v, p)) {
                    return Err(NetworkError::Asymmetric {
                        node: v,
                        port: p,
                        target: u,
                        target_port: q,
                    });
                }
            }
        }
        let net = PortNetwork { adjacency };
        check_connected(&net)?;
        Ok(net)
    }

    /// Builds a network from an edge list, each undirected edge listed once.
    pub fn from_edges(n: usize, edges: &[Edge]) -> Result<Self, NetworkError> {
        if n == 0 {
            return Err(NetworkError::Empty);
        }
        let mut slots: Vec<BTreeMap<Port, (NodeId, Port)>> = vec![BTreeMap::new(); n];
        for e in edges {
            for node in [e.u, e.v] {
                if node >= n {
                    return Err(NetworkError::NodeOutOfRange { node, n });
                }
            }
            if e.u == e.v {
                return Err(NetworkError::SelfLoop { node: e.u });
            }
            for (a, pa, b, pb) in [(e.u, e.pu, e.v, e.pv), (e.v, e.pv, e.u, e.pu)] {
                if slots[a].insert(pa, (b, pb)).is_some() {
                    return Err(NetworkError::DuplicatePort { node: a, port: pa });
                }
            }
        }
        let mut adjacency = Vec::with_capacity(n);
        for (v, ports) in slots.into_iter().enumerate() {
            let degree = ports.len();
            if let Some(port) = (0..degree).find(|p| !ports.contains_key(p)) {
                return Err(NetworkError::MissingPort {
                    node: v,
                    port,
                    degree,
                });
            }
            adjacency.push(ports.into_values().collect());
        }
        PortNetwork::new(adjacency)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbor(&self, v: NodeId, port: Port) -> (NodeId, Port) {
        self.adjacency[v][port]
    }

    pub fn ports(&self, v: NodeId) -> &[(NodeId, Port)] {
        &self.adjacency[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges in canonical order: `u < v`, sorted by `(u, pu)`.
    pub fn edges(&self) -> Vec<Edge> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for (u, ports) in self.adjacency.iter().enumerate() {
            for (pu, &(v, pv)) in ports.iter().enumerate() {
                if u < v {
                    edges.push(Edge { u, pu, v, pv });
                }
            }
        }
        edges.sort();
        edges
    }

    /// Hop distances from `source` to every node.
    pub fn distances_from(&self, source: NodeId) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &(u, _) in &self.adjacency[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn eccentricity(&self, v: NodeId) -> usize {
        self.distances_from(v).into_iter().max().unwrap_or(0)
    }

    /// Exact diameter by all-pairs BFS.
    pub fn diameter(&self) -> usize {
        (0..self.node_count())
            .map(|v| self.eccentricity(v))
            .max()
            .unwrap_or(0)
    }

    /// Follows a port sequence from `start`; `None` if some port is invalid.
    pub fn walk(&self, start: NodeId, ports: &[Port]) -> Option<NodeId> {
        ports.iter().try_fold(start, |v, &p| {
            self.adjacency[v].get(p).map(|&(u, _)| u)
        })
    }
}

fn check_connected<G: Adjacent>(g: &G) -> Result<(), NetworkError> {
    let n = g.len();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for u in g.targets(v) {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(node) => Err(NetworkError::Disconnected { node }),
        None => Ok(()),
    }
}

trait Adjacent {
    fn len(&self) -> usize;
    fn targets(&self, v: usize) -> Vec<usize>;
}

impl Adjacent for PortNetwork {
    fn len(&self) -> usize {
        self.adjacency.len()
    }
    fn targets(&self, v: usize) -> Vec<usize> {
        self.adjacency[v].iter().map(|&(u, _)| u).collect()
    }
}

/// A node coloring onto `1..=color_count`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    colors: Vec<Color>,
    color_count: Color,
}

impl Coloring {
    /// Colors with the count taken as the largest color used.
    pub fn new(colors: Vec<Color>) -> Result<Self, NetworkError> {
        let count = colors.iter().copied().max().unwrap_or(0);
        Self::with_count(colors, count)
    }

    pub fn with_count(colors: Vec<Color>, color_count: Color) -> Result<Self, NetworkError> {
        if colors.is_empty() {
            return Err(NetworkError::Empty);
        }
        let mut used = vec![false; color_count as usize + 1];
        for (node, &color) in colors.iter().enumerate() {
            if color == 0 {
                return Err(NetworkError::ZeroColor { node });
            }
            if color > color_count {
                return Err(NetworkError::ColorAboveCount {
                    node,
                    color,
                    count: color_count,
                });
            }
            used[color as usize] = true;
        }
        if let Some(color) = (1..=color_count).find(|&c| !used[c as usize]) {
            return Err(NetworkError::UnusedColor {
                color,
                count: color_count,
            });
        }
        Ok(Coloring {
            colors,
            color_count,
        })
    }

    /// A single color everywhere.
    pub fn uniform(n: usize) -> Self {
        Coloring {
            colors: vec![1; n],
            color_count: 1,
        }
    }

    pub fn color(&self, v: NodeId) -> Color {
        self.colors[v]
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn color_count(&self) -> Color {
        self.color_count
    }

    /// Number of nodes carrying `color`.
    pub fn size_of(&self, color: Color) -> usize {
        self.colors.iter().filter(|&&c| c == color).count()
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

/// A network together with its coloring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColoredNetwork {
    pub network: PortNetwork,
    pub coloring: Coloring,
}

impl ColoredNetwork {
    pub fn new(network: PortNetwork, coloring: Coloring) -> Result<Self, NetworkError> {
        if network.node_count() != coloring.len() {
            return Err(NetworkError::ColorCountMismatch {
                got: coloring.len(),
                n: network.node_count(),
            });
        }
        Ok(ColoredNetwork { network, coloring })
    }

    /// Parses the line-based network format.
    ///
    /// ```text
    /// # comment
    /// n 2
    /// colors 1 2
    /// edge 0 0 1 0
    /// ```
    pub fn parse(text: &str) -> Result<Self, NetworkError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, line)| (i + 1, line))
            .filter(|(_, line)| {
                let t = line.trim_start();
                !t.is_empty() && !t.starts_with('#')
            });

        let eof = |what: &str| NetworkError::Syntax {
            line: text.lines().count().max(1),
            column: 1,
            message: format!("unexpected end of input, expected `{what}` line"),
        };

        let (line_no, line) = lines.next().ok_or_else(|| eof("n"))?;
        let tokens = tokenize(line);
        expect_keyword(&tokens, "n", line_no)?;
        if tokens.len() != 2 {
            return Err(arity_error(&tokens, line_no, "n <count>"));
        }
        let n = parse_number(&tokens[1], line_no)?;
        if n == 0 {
            return Err(NetworkError::Empty);
        }

        let (line_no, line) = lines.next().ok_or_else(|| eof("colors"))?;
        let tokens = tokenize(line);
        expect_keyword(&tokens, "colors", line_no)?;
        if tokens.len() != n + 1 {
            return Err(arity_error(
                &tokens,
                line_no,
                &format!("colors followed by {n} values"),
            ));
        }
        let colors = tokens[1..]
            .iter()
            .map(|t| parse_number(t, line_no).map(|c| c as Color))
            .collect::<Result<Vec<_>, _>>()?;

        let mut edges = Vec::new();
        for (line_no, line) in lines {
            let tokens = tokenize(line);
            expect_keyword(&tokens, "edge", line_no)?;
            if tokens.len() != 5 {
                return Err(arity_error(&tokens, line_no, "edge <u> <pu> <v> <pv>"));
            }
            let nums = tokens[1..]
                .iter()
                .map(|t| parse_number(t, line_no))
                .collect::<Result<Vec<_>, _>>()?;
            for (i, &node) in [nums[0], nums[2]].iter().enumerate() {
                if node >= n {
                    return Err(NetworkError::Syntax {
                        line: line_no,
                        column: tokens[1 + 2 * i].column,
                        message: format!("node {node} out of range (n = {n})"),
                    });
                }
            }
            edges.push(Edge {
                u: nums[0],
                pu: nums[1],
                v: nums[2],
                pv: nums[3],
            });
        }

        let network = PortNetwork::from_edges(n, &edges)?;
        let coloring = Coloring::new(colors)?;
        ColoredNetwork::new(network, coloring)
    }

    /// Canonical text form; `parse(serialize(x)) == x`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n {}", self.network.node_count());
        out.push_str("colors");
        for c in self.coloring.colors() {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
        for e in self.network.edges() {
            let _ = writeln!(out, "edge {} {} {} {}", e.u, e.pu, e.v, e.pv);
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.network.node_count()
    }
}

impl PortGraph for ColoredNetwork {
    fn node_count(&self) -> usize {
        self.network.node_count()
    }
    fn degree(&self, v: NodeId) -> usize {
        self.network.degree(v)
    }
    fn neighbor(&self, v: NodeId, port: Port) -> (NodeId, Port) {
        self.network.neighbor(v, port)
    }
    fn color(&self, v: NodeId) -> Color {
        self.coloring.color(v)
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                tokens.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    tokens
}

fn expect_keyword(tokens: &[Token<'_>], keyword: &str, line: usize) -> Result<(), NetworkError> {
    match tokens.first() {
        Some(t) if t.text == keyword => Ok(()),
        Some(t) => Err(NetworkError::Syntax {
            line,
            column: t.column,
            message: format!("expected `{keyword}`, found `{}`", t.text),
        }),
        None => Err(NetworkError::Syntax {
            line,
            column: 1,
            message: format!("expected `{keyword}`"),
        }),
    }
}

fn arity_error(tokens: &[Token<'_>], line: usize, shape: &str) -> NetworkError {
    let column = tokens.last().map(|t| t.column + t.text.len()).unwrap_or(1);
    NetworkError::Syntax {
        line,
        column,
        message: format!("expected `{shape}`, found {} fields", tokens.len()),
    }
}

fn parse_number(token: &Token<'_>, line: usize) -> Result<usize, NetworkError> {
    token.text.parse().map_err(|_| NetworkError::Syntax {
        line,
        column: token.column,
        message: format!("`{}` is not a non-negative integer", token.text),
    })
}

/// The colored quotient multigraph: one node per view-equivalence class.
///
/// `ports[a][p] = (b, q)` means that port `p` of class `a` leads to class `b`,
/// arriving at port `q`. The map `(a, p) -> (b, q)` is an involution; a fixed
/// point `(a, p) -> (a, p)` is a self-loop seen from one side.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuotientGraph {
    colors: Vec<Color>,
    ports: Vec<Vec<(usize, Port)>>,
}

#[derive(Serialize, Deserialize)]
struct QuotientJson {
    classes: Vec<ClassJson>,
    edges: Vec<[usize; 4]>,
}

#[derive(Serialize, Deserialize)]
struct ClassJson {
    id: usize,
    color: Color,
}

impl QuotientGraph {
    pub fn new(colors: Vec<Color>, ports: Vec<Vec<(usize, Port)>>) -> Result<Self, NetworkError> {
        let n = colors.len();
        if n == 0 || ports.len() != n {
            return Err(NetworkError::ColorCountMismatch {
                got: colors.len(),
                n: ports.len(),
            });
        }
        if let Some(node) = colors.iter().position(|&c| c == 0) {
            return Err(NetworkError::ZeroColor { node });
        }
        for (a, list) in ports.iter().enumerate() {
            for (p, &(b, q)) in list.iter().enumerate() {
                if b >= n {
                    return Err(NetworkError::NodeOutOfRange { node: b, n });
                }
                if ports[b].get(q) != Some(&(a, p)) {
                    return Err(NetworkError::Asymmetric {
                        node: a,
                        port: p,
                        target: b,
                        target_port: q,
                    });
                }
            }
        }
        let q = QuotientGraph { colors, ports };
        check_connected(&q)?;
        Ok(q)
    }

    /// Builds from an edge list `[a, p, b, q]`; a self-loop with `p == q`
    /// occupies a single port.
    pub fn from_edges(colors: Vec<Color>, edges: &[[usize; 4]]) -> Result<Self, NetworkError> {
        let n = colors.len();
        let mut slots: Vec<BTreeMap<Port, (usize, Port)>> = vec![BTreeMap::new(); n];
        for &[a, p, b, q] in edges {
            for node in [a, b] {
                if node >= n {
                    return Err(NetworkError::NodeOutOfRange { node, n });
                }
            }
            if slots[a].insert(p, (b, q)).is_some() {
                return Err(NetworkError::DuplicatePort { node: a, port: p });
            }
            if (a, p) != (b, q) && slots[b].insert(q, (a, p)).is_some() {
                return Err(NetworkError::DuplicatePort { node: b, port: q });
            }
        }
        let mut ports = Vec::with_capacity(n);
        for (a, map) in slots.into_iter().enumerate() {
            let degree = map.len();
            if let Some(port) = (0..degree).find(|p| !map.contains_key(p)) {
                return Err(NetworkError::MissingPort {
                    node: a,
                    port,
                    degree,
                });
            }
            ports.push(map.into_values().collect());
        }
        QuotientGraph::new(colors, ports)
    }

    pub fn class_count(&self) -> usize {
        self.colors.len()
    }

    pub fn class_color(&self, a: usize) -> Color {
        self.colors[a]
    }

    pub fn class_colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn ports(&self, a: usize) -> &[(usize, Port)] {
        &self.ports[a]
    }

    /// Each edge once as `[a, p, b, q]` with `(a, p) <= (b, q)`, sorted.
    pub fn edges(&self) -> Vec<[usize; 4]> {
        let mut edges = Vec::new();
        for (a, list) in self.ports.iter().enumerate() {
            for (p, &(b, q)) in list.iter().enumerate() {
                if (a, p) <= (b, q) {
                    edges.push([a, p, b, q]);
                }
            }
        }
        edges.sort();
        edges
    }

    /// Number of classes carrying `color`.
    pub fn classes_with_color(&self, color: Color) -> usize {
        self.colors.iter().filter(|&&c| c == color).count()
    }

    /// True iff the multigraph is a tree: no self-loops, no multi-edges and
    /// exactly `class_count - 1` edges (connectivity holds by construction).
    pub fn is_tree(&self) -> bool {
        let edges = self.edges();
        if edges.len() + 1 != self.class_count() {
            return false;
        }
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for [a, _, b, _] in edges {
            if a == b {
                return false;
            }
            pairs.push((a.min(b), a.max(b)));
        }
        pairs.sort_unstable();
        pairs.windows(2).all(|w| w[0] != w[1])
    }

    /// Relabels classes: class `a` becomes `order[a]`.
    pub fn relabeled(&self, order: &[usize]) -> QuotientGraph {
        let n = self.class_count();
        let mut colors = vec![0; n];
        let mut ports = vec![Vec::new(); n];
        for a in 0..n {
            colors[order[a]] = self.colors[a];
            ports[order[a]] = self.ports[a].iter().map(|&(b, q)| (order[b], q)).collect();
        }
        QuotientGraph { colors, ports }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = QuotientJson {
            classes: self
                .colors
                .iter()
                .enumerate()
                .map(|(id, &color)| ClassJson { id, color })
                .collect(),
            edges: self.edges(),
        };
        serde_json::to_value(doc).expect("quotient JSON is always representable")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let doc: QuotientJson =
            serde_json::from_str(text).map_err(|e| NetworkError::Json(e.to_string()))?;
        let mut colors = vec![0; doc.classes.len()];
        for class in &doc.classes {
            if class.id >= colors.len() {
                return Err(NetworkError::NodeOutOfRange {
                    node: class.id,
                    n: colors.len(),
                });
            }
            colors[class.id] = class.color;
        }
        QuotientGraph::from_edges(colors, &doc.edges)
    }
}

impl Adjacent for QuotientGraph {
    fn len(&self) -> usize {
        self.colors.len()
    }
    fn targets(&self, v: usize) -> Vec<usize> {
        self.ports[v].iter().map(|&(u, _)| u).collect()
    }
}

impl PortGraph for QuotientGraph {
    fn node_count(&self) -> usize {
        self.class_count()
    }
    fn degree(&self, v: NodeId) -> usize {
        self.ports[v].len()
    }
    fn neighbor(&self, v: NodeId, port: Port) -> (NodeId, Port) {
        self.ports[v][port]
    }
    fn color(&self, v: NodeId) -> Color {
        self.colors[v]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PATH2: &str = "n 2\ncolors 1 2\nedge 0 0 1 0\n";
    const RING3: &str = "n 3\ncolors 1 1 1\nedge 0 0 1 1\nedge 1 0 2 1\nedge 2 0 0 1\n";

    #[test]
    fn parses_two_node_path() {
        let net = ColoredNetwork::parse(PATH2).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.network.neighbor(0, 0), (1, 0));
        assert_eq!(net.coloring.colors(), &[1, 2]);
        assert_eq!(net.serialize(), PATH2);
    }

    #[test]
    fn parses_oriented_ring() {
        let net = ColoredNetwork::parse(RING3).unwrap();
        for v in 0..3 {
            assert_eq!(net.network.neighbor(v, 0), ((v + 1) % 3, 1));
        }
        assert_eq!(
            net.serialize(),
            "n 3\ncolors 1 1 1\nedge 0 0 1 1\nedge 0 1 2 0\nedge 1 0 2 1\n"
        );
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a path\n\nn 2\n  # colors next\ncolors 1 2\nedge 0 0 1 0\n";
        assert_eq!(
            ColoredNetwork::parse(text).unwrap(),
            ColoredNetwork::parse(PATH2).unwrap()
        );
    }

    #[test]
    fn rejects_unused_declared_color() {
        assert_eq!(
            Coloring::with_count(vec![1, 1], 2),
            Err(NetworkError::UnusedColor { color: 2, count: 2 })
        );
        let err = ColoredNetwork::parse("n 2\ncolors 1 3\nedge 0 0 1 0\n").unwrap_err();
        assert_eq!(err, NetworkError::UnusedColor { color: 2, count: 3 });
    }

    #[test]
    fn reports_syntax_positions() {
        let err = ColoredNetwork::parse("n 2\ncolors 1 x\nedge 0 0 1 0\n").unwrap_err();
        assert_eq!(
            err,
            NetworkError::Syntax {
                line: 2,
                column: 10,
                message: "`x` is not a non-negative integer".into()
            }
        );
        let err = ColoredNetwork::parse("n 2\ncolors 1 2\nedg 0 0 1 0\n").unwrap_err();
        assert!(matches!(err, NetworkError::Syntax { line: 3, column: 1, .. }));
        let err = ColoredNetwork::parse("n 2\n").unwrap_err();
        assert!(matches!(err, NetworkError::Syntax { .. }));
    }

    #[test]
    fn rejects_port_and_shape_violations() {
        // port 1 used without port 0 at node 0
        let err = ColoredNetwork::parse("n 2\ncolors 1 1\nedge 0 1 1 0\n").unwrap_err();
        assert_eq!(
            err,
            NetworkError::MissingPort {
                node: 0,
                port: 0,
                degree: 1
            }
        );
        let err = ColoredNetwork::parse("n 3\ncolors 1 1 1\nedge 0 0 1 0\nedge 0 0 2 0\n")
            .unwrap_err();
        assert_eq!(err, NetworkError::DuplicatePort { node: 0, port: 0 });
        let err = ColoredNetwork::parse("n 3\ncolors 1 1 1\nedge 0 0 1 0\n").unwrap_err();
        assert_eq!(err, NetworkError::Disconnected { node: 2 });
        let err = ColoredNetwork::parse("n 2\ncolors 1 1\nedge 0 0 0 1\n").unwrap_err();
        assert_eq!(err, NetworkError::SelfLoop { node: 0 });
        let err =
            ColoredNetwork::parse("n 2\ncolors 1 1\nedge 0 0 1 0\nedge 0 1 1 1\n").unwrap_err();
        assert_eq!(err, NetworkError::ParallelEdge { u: 0, v: 1 });
    }

    #[test]
    fn rejects_asymmetric_adjacency() {
        let err = PortNetwork::new(vec![vec![(1, 0)], vec![(0, 1)]]).unwrap_err();
        assert!(matches!(err, NetworkError::Asymmetric { node: 0, .. }));
    }

    #[test]
    fn single_swap_mutation_is_rejected() {
        let net = ColoredNetwork::parse(RING3).unwrap();
        let mut adjacency: Vec<Vec<_>> = (0..3).map(|v| net.network.ports(v).to_vec()).collect();
        adjacency[1].swap(0, 1);
        assert!(PortNetwork::new(adjacency).is_err());
    }

    #[test]
    fn diameters() {
        let path = ColoredNetwork::parse(PATH2).unwrap();
        assert_eq!(path.network.diameter(), 1);
        let edges: Vec<Edge> = (0..6)
            .map(|i| Edge {
                u: i.min((i + 1) % 6),
                pu: if i < 5 { 0 } else { 1 },
                v: i.max((i + 1) % 6),
                pv: if i < 5 { 1 } else { 0 },
            })
            .collect();
        let ring = PortNetwork::from_edges(6, &edges).unwrap();
        assert_eq!(ring.diameter(), 3);
        assert_eq!(ring.edge_count(), 6);
    }

    #[test]
    fn walk_follows_ports() {
        let net = ColoredNetwork::parse(RING3).unwrap();
        assert_eq!(net.network.walk(0, &[0, 0]), Some(2));
        assert_eq!(net.network.walk(0, &[1]), Some(2));
        assert_eq!(net.network.walk(0, &[2]), None);
    }

    #[test]
    fn quotient_tree_detection() {
        let looped = QuotientGraph::from_edges(vec![1], &[[0, 0, 0, 0]]).unwrap();
        assert!(!looped.is_tree());
        let edge = QuotientGraph::from_edges(vec![1, 2], &[[0, 0, 1, 0]]).unwrap();
        assert!(edge.is_tree());
        let double = QuotientGraph::from_edges(vec![1, 2], &[[0, 0, 1, 0], [0, 1, 1, 1]]).unwrap();
        assert!(!double.is_tree());
        let ring = QuotientGraph::from_edges(vec![1], &[[0, 0, 0, 1]]).unwrap();
        assert!(!ring.is_tree());
        assert_eq!(ring.ports(0), &[(0, 1), (0, 0)]);
    }

    #[test]
    fn quotient_json_round_trip() {
        let q = QuotientGraph::from_edges(vec![2, 1], &[[0, 0, 1, 0], [1, 1, 1, 1]]).unwrap();
        let json = q.to_json();
        assert_eq!(
            json,
            r#"{"classes":[{"id":0,"color":2},{"id":1,"color":1}],"edges":[[0,0,1,0],[1,1,1,1]]}"#
        );
        assert_eq!(QuotientGraph::from_json(&json).unwrap(), q);
    }

    #[test]
    fn quotient_rejects_broken_involution() {
        assert!(QuotientGraph::new(vec![1, 1], vec![vec![(1, 0)], vec![(1, 0)]]).is_err());
        assert!(QuotientGraph::new(vec![1, 1], vec![vec![(0, 0)], vec![(1, 0)]]).is_err());
    }
}
