//! The view and quotient phases as a function of the growing own view.
//!
//! A node feeds its view after every communication round. The same logic
//! runs centrally on quotient graphs to compute the padding budget.

use std::sync::Arc;

use crate::netmodel::{Color, PortGraph};
use crate::views::{ViewArena, ViewRef};

#[derive(Clone, Debug)]
enum Stage {
    Viewing,
    Refining {
        exit_depth: u32,
        index: u32,
        /// Distinct truncations at depth `index` of the records within
        /// `exit_depth` of the root.
        previous: Arc<[ViewRef]>,
    },
}

#[derive(Clone, Debug)]
pub(crate) struct Tracker {
    k: u32,
    alpha: Color,
    stage: Stage,
}

/// Reported once the partition stops growing.
#[derive(Clone, Debug)]
pub(crate) struct Stable {
    /// Depth at which the view first covered the network.
    pub exit_depth: u32,
    /// First index `i` with `|Pi_i| = |Pi_(i-1)|`.
    pub index: u32,
    /// One view of depth `index - 1` per class, in discovery order.
    pub classes: Vec<ViewRef>,
}

impl Tracker {
    pub fn new(k: u32, alpha: Color) -> Self {
        Tracker {
            k,
            alpha,
            stage: Stage::Viewing,
        }
    }

    pub fn is_viewing(&self) -> bool {
        matches!(self.stage, Stage::Viewing)
    }

    /// Feeds the own view after round `t`, which must have depth `t`.
    pub fn observe(&mut self, arena: &mut ViewArena, view: ViewRef) -> Option<Stable> {
        let depth = arena.height(view);
        match &mut self.stage {
            Stage::Viewing => {
                if !arena.uncovered_leaf_exists(view, self.k, self.alpha) {
                    let previous = arena.distinct_truncations(view, depth, 0);
                    self.stage = Stage::Refining {
                        exit_depth: depth,
                        index: 0,
                        previous,
                    };
                }
                None
            }
            Stage::Refining {
                exit_depth,
                index,
                previous,
            } => {
                *index += 1;
                debug_assert_eq!(depth, *exit_depth + *index);
                let current = arena.distinct_truncations(view, *exit_depth, *index);
                if current.len() == previous.len() {
                    Some(Stable {
                        exit_depth: *exit_depth,
                        index: *index,
                        classes: previous.to_vec(),
                    })
                } else {
                    *previous = current;
                    None
                }
            }
        }
    }
}

/// Exit depth and refinement index of each node of `graph`, computed by
/// running the phases centrally on all nodes at once.
pub(crate) fn simulate_phases<G: PortGraph>(
    arena: &mut ViewArena,
    graph: &G,
    k: u32,
    alpha: Color,
    max_depth: u32,
) -> Option<Vec<(u32, u32)>> {
    let n = graph.node_count();
    let mut trackers = vec![Tracker::new(k, alpha); n];
    let mut results: Vec<Option<(u32, u32)>> = vec![None; n];
    let mut layer = arena.leaves(graph);
    for _ in 0..max_depth {
        layer = arena.extend_views(graph, &layer);
        for v in 0..n {
            if results[v].is_none() {
                if let Some(stable) = trackers[v].observe(arena, layer[v]) {
                    results[v] = Some((stable.exit_depth, stable.index));
                }
            }
        }
        if results.iter().all(Option::is_some) {
            return Some(results.into_iter().flatten().collect());
        }
    }
    None
}
