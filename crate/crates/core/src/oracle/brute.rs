//! Deliberately naive references over explicit view trees.
//!
//! Everything here walks or materializes the tree of walks itself, with no
//! sharing, and gives up (returns `None`) past a size budget.

use crate::netmodel::{Color, ColoredNetwork, NodeId, Port};

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub color: Color,
    /// Network node this tree node represents.
    pub represents: NodeId,
    pub depth: usize,
    /// `(incoming port at the child, child index)` per local port.
    pub children: Vec<(Port, usize)>,
}

/// A truncated view stored node by node; index 0 is the root.
#[derive(Clone, Debug)]
pub struct ExplicitTree {
    pub nodes: Vec<TreeNode>,
}

impl ExplicitTree {
    /// The depth-`l` view of `root`, or `None` if it has more than
    /// `max_nodes` nodes.
    pub fn build(net: &ColoredNetwork, root: NodeId, l: usize, max_nodes: usize) -> Option<Self> {
        let mut nodes = vec![TreeNode {
            color: net.coloring.color(root),
            represents: root,
            depth: 0,
            children: Vec::new(),
        }];
        let mut next = 0;
        while next < nodes.len() {
            let (v, depth) = (nodes[next].represents, nodes[next].depth);
            if depth < l {
                for p in 0..net.network.degree(v) {
                    let (u, q) = net.network.neighbor(v, p);
                    if nodes.len() == max_nodes {
                        return None;
                    }
                    let child = nodes.len();
                    nodes.push(TreeNode {
                        color: net.coloring.color(u),
                        represents: u,
                        depth: depth + 1,
                        children: Vec::new(),
                    });
                    nodes[next].children.push((q, child));
                }
            }
            next += 1;
        }
        Some(ExplicitTree { nodes })
    }

    pub fn encode(&self) -> String {
        let mut out = String::new();
        self.encode_into(0, &mut out);
        out
    }

    fn encode_into(&self, node: usize, out: &mut String) {
        out.push('(');
        out.push_str(&self.nodes[node].color.to_string());
        for (p, &(q, child)) in self.nodes[node].children.iter().enumerate() {
            out.push_str(&format!(" {p}:{q}"));
            self.encode_into(child, out);
        }
        out.push(')');
    }

    /// Length of the shortest downward path from `node` to a node of color
    /// `alpha`, by breadth-first search over the subtree.
    pub fn dist_to_color(&self, node: usize, alpha: Color) -> Option<usize> {
        let mut frontier = vec![node];
        let mut distance = 0;
        while !frontier.is_empty() {
            if frontier.iter().any(|&x| self.nodes[x].color == alpha) {
                return Some(distance);
            }
            frontier = frontier
                .iter()
                .flat_map(|&x| self.nodes[x].children.iter().map(|&(_, c)| c))
                .collect();
            distance += 1;
        }
        None
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&x| self.nodes[x].children.is_empty())
    }

    /// Parent of every node (the root is its own parent).
    pub fn parents(&self) -> Vec<usize> {
        let mut parent = vec![0; self.nodes.len()];
        for (x, node) in self.nodes.iter().enumerate() {
            for &(_, c) in &node.children {
                parent[c] = x;
            }
        }
        parent
    }

    /// The set of tree nodes passing the repetition test: with `d'` the
    /// maximum over the root path of each node's distance to `alpha`,
    /// `depth >= 2(k+1)(d'+1)`.
    pub fn repetition_set(&self, k: u32, alpha: Color) -> Vec<bool> {
        let mut worst: Vec<Option<usize>> = vec![None; self.nodes.len()];
        let mut in_set = vec![false; self.nodes.len()];
        let span = 2 * (k as usize + 1);
        let parent = self.parents();
        // children always come after their parent
        for x in 0..self.nodes.len() {
            let own = self.dist_to_color(x, alpha);
            let above = if x == 0 { Some(0) } else { worst[parent[x]] };
            worst[x] = match (above, own) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
            in_set[x] = worst[x].is_some_and(|d| self.nodes[x].depth >= span * (d + 1));
        }
        in_set
    }

    /// True iff some leaf has no node of the repetition set on its root path.
    pub fn uncovered_leaf_exists(&self, k: u32, alpha: Color) -> bool {
        let in_set = self.repetition_set(k, alpha);
        let parent = self.parents();
        self.leaves().any(|leaf| {
            let mut x = leaf;
            loop {
                if in_set[x] {
                    return false;
                }
                if x == 0 {
                    return true;
                }
                x = parent[x];
            }
        })
    }
}

/// The uncovered-leaf predicate by depth-first enumeration of root-to-leaf
/// walks, without materializing the tree. Distances of tree nodes are taken
/// as network distances capped by the remaining depth. Returns `None` once
/// more than `budget` tree nodes have been visited.
pub fn uncovered_leaf_by_walks(
    net: &ColoredNetwork,
    root: NodeId,
    l: usize,
    k: u32,
    alpha: Color,
    budget: usize,
) -> Option<bool> {
    let n = net.node_count();
    let to_alpha: Vec<Option<usize>> = {
        let mut best = vec![None; n];
        for a in (0..n).filter(|&a| net.coloring.color(a) == alpha) {
            for (v, d) in net.network.distances_from(a).into_iter().enumerate() {
                if best[v].is_none_or(|b| d < b) {
                    best[v] = Some(d);
                }
            }
        }
        best
    };
    let span = 2 * (k as usize + 1);
    // (network node, depth, running max distance)
    let mut stack = vec![(root, 0usize, 0usize)];
    let mut visited = 0;
    while let Some((v, depth, running)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return None;
        }
        let own = to_alpha[v].filter(|&d| d <= l - depth);
        let Some(own) = own else {
            // infinite distance: no node below passes the test either
            return Some(true);
        };
        let worst = running.max(own);
        if depth >= span * (worst + 1) {
            continue;
        }
        if depth == l {
            return Some(true);
        }
        for p in 0..net.network.degree(v) {
            stack.push((net.network.neighbor(v, p).0, depth + 1, worst));
        }
    }
    Some(false)
}
