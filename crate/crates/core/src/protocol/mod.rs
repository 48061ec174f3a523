//! The distributed algorithm solving leader election and topology
//! recognition, as a [`NodeProgram`].
//!
//! Each node grows its view by one level per round. Once no leaf of the view
//! is left uncovered by the repetition test, the view represents every node
//! of the network, and the node keeps extending it until the partition of the
//! represented records by truncated views stops growing. It then builds the
//! quotient graph, computes the padding budget `xi` by simulating the same
//! phases on the quotient, keeps communicating until it has performed
//! `tau + xi` rounds, and outputs.
//!
//! Messages carry views by handle into the arena shared by all nodes of a
//! run: `V<depth> <sender port> #<handle>`.

mod tracker;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::engine::{self, EngineError, Mailbox, Message, NodeProgram, RunOptions, Step, Transcript};
use crate::netmodel::{Color, ColoredNetwork, Port, PortGraph, QuotientGraph};
use crate::views::{shared_arena, PathStep, SharedArena, ViewArena, ViewError, ViewRef};

use tracker::Tracker;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    LeaderElection,
    Topology,
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "le" => Ok(Task::LeaderElection),
            "top" => Ok(Task::Topology),
            other => Err(format!("unknown task `{other}` (expected le or top)")),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::LeaderElection => "le",
            Task::Topology => "top",
        })
    }
}

/// The global input shared by all nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    /// Upper bound on the number of nodes of color `alpha`.
    pub k: u32,
    pub alpha: Color,
    pub task: Task,
}

impl Params {
    pub fn new(k: u32, alpha: Color, task: Task) -> Self {
        Params { k, alpha, task }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        format!("k={} alpha={} task={}", self.k, self.alpha, self.task).into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, String> {
        let text = std::str::from_utf8(bytes).map_err(|e| e.to_string())?;
        let mut k = None;
        let mut alpha = None;
        let mut task = None;
        for field in text.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| format!("malformed input field `{field}`"))?;
            match key {
                "k" => k = Some(value.parse().map_err(|_| format!("bad k `{value}`"))?),
                "alpha" => alpha = Some(value.parse().map_err(|_| format!("bad alpha `{value}`"))?),
                "task" => task = Some(value.parse()?),
                other => return Err(format!("unknown input field `{other}`")),
            }
        }
        match (k, alpha, task) {
            (Some(k), Some(alpha), Some(task)) => Ok(Params { k, alpha, task }),
            _ => Err(format!("incomplete input `{text}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeOutcome {
    Unsolvable,
    /// Ports to follow from the node to the leader; empty at the leader.
    LeaderPath(Vec<Port>),
    /// The quotient graph with canonical class ids and the node's own class.
    Topology { graph: QuotientGraph, own: usize },
}

/// Per-node measurements of one protocol run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeStats {
    /// Depth at which the view phase ended.
    pub exit_depth: u32,
    /// Refinement index at which the partition stabilized.
    pub refinement_index: u32,
    /// Rounds spent in the view and quotient phases.
    pub tau: u32,
    pub xi: u32,
    /// The view of depth `exit_depth`.
    pub exit_view: ViewRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeReport {
    pub outcome: NodeOutcome,
    pub stats: NodeStats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Viewing,
    Refining,
    Padding { finish: u32 },
}

pub struct ProtocolState {
    params: Params,
    color: Color,
    degree: usize,
    phase: Phase,
    view: ViewRef,
    depth: u32,
    /// Set once a neighbor stopped sending; the view is no longer extended.
    frozen: bool,
    tracker: Tracker,
    solution: Option<Solution>,
}

struct Solution {
    quotient: QuotientGraph,
    own: usize,
    /// Depth-`index - 1` view of the leader class.
    leader: ViewRef,
    stats: NodeStats,
}

impl ProtocolState {
    pub fn view(&self) -> ViewRef {
        self.view
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn padding_budget(&self) -> Option<u32> {
        self.solution.as_ref().map(|s| s.stats.xi)
    }
}

/// The node program. All nodes of a run share one arena, so that messages
/// can refer to views by handle.
pub struct ProtocolProgram {
    arena: SharedArena,
    xi_cache: Mutex<HashMap<(QuotientGraph, u32, Color), u32>>,
}

impl ProtocolProgram {
    pub fn new(arena: SharedArena) -> Self {
        ProtocolProgram {
            arena,
            xi_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn arena(&self) -> &SharedArena {
        &self.arena
    }

    fn message(state: &ProtocolState, port: Port) -> Message {
        let mut out = Vec::with_capacity(24);
        out.push(b'V');
        push_decimal(&mut out, state.depth as u64);
        out.push(b' ');
        push_decimal(&mut out, port as u64);
        out.extend_from_slice(b" #");
        push_decimal(&mut out, state.view.index() as u64);
        out
    }

    fn outbox(state: &ProtocolState) -> Mailbox {
        (0..state.degree)
            .map(|p| Some(Self::message(state, p)))
            .collect()
    }

    fn xi(&self, arena: &mut ViewArena, quotient: &QuotientGraph, params: &Params) -> Result<u32, String> {
        let key = (quotient.clone(), params.k, params.alpha);
        if let Some(&xi) = self.xi_cache.lock().expect("xi cache poisoned").get(&key) {
            return Ok(xi);
        }
        let xi = compute_xi(arena, quotient, params.k, params.alpha)
            .map_err(|e| e.to_string())?
            .xi;
        self.xi_cache.lock().expect("xi cache poisoned").insert(key, xi);
        Ok(xi)
    }

    fn solve(
        &self,
        arena: &mut ViewArena,
        state: &ProtocolState,
        stable: tracker::Stable,
        round: u32,
    ) -> Result<Solution, String> {
        let depth = stable.index - 1;
        let (quotient, order) = build_quotient(arena, state.view, stable.exit_depth, depth, stable.classes)?;
        let own_view = arena.truncate(state.view, depth);
        let own = order
            .iter()
            .position(|&c| c == own_view)
            .ok_or("own view is not among the classes")?;
        let xi = self.xi(arena, &quotient, &state.params)?;
        let exit_view = arena.truncate(state.view, stable.exit_depth);
        Ok(Solution {
            quotient,
            own,
            leader: order[0],
            stats: NodeStats {
                exit_depth: stable.exit_depth,
                refinement_index: stable.index,
                tau: round,
                xi,
                exit_view,
            },
        })
    }
}

impl NodeProgram for ProtocolProgram {
    type State = ProtocolState;
    type Output = NodeReport;

    fn init(&self, degree: usize, color: Color, input: &[u8]) -> Result<(ProtocolState, Mailbox), String> {
        let params = Params::from_bytes(input)?;
        if degree == 0 {
            return Err("isolated node".into());
        }
        let view = self.arena.lock().expect("arena poisoned").leaf(color);
        let state = ProtocolState {
            params,
            color,
            degree,
            phase: Phase::Viewing,
            view,
            depth: 0,
            frozen: false,
            tracker: Tracker::new(params.k, params.alpha),
            solution: None,
        };
        let outbox = Self::outbox(&state);
        Ok((state, outbox))
    }

    fn step(
        &self,
        state: &mut ProtocolState,
        round: u32,
        inbox: &[Option<Message>],
    ) -> Result<Step<NodeReport>, String> {
        let mut guard = self.arena.lock().expect("arena poisoned");
        let arena = &mut *guard;
        match collect_neighbor_views(arena, inbox, state.depth) {
            Ok(neighbors) if !state.frozen => {
                state.view = arena.assemble(state.color, &neighbors).map_err(|e| e.to_string())?;
                state.depth += 1;
            }
            Ok(_) => {}
            Err(reason) => {
                if !matches!(state.phase, Phase::Padding { .. }) {
                    return Err(reason);
                }
                state.frozen = true;
            }
        }
        match state.phase {
            Phase::Viewing | Phase::Refining => {
                if state.depth != round {
                    return Err(format!("view depth {} in round {round}", state.depth));
                }
                if let Some(stable) = state.tracker.observe(arena, state.view) {
                    let solution = self.solve(arena, state, stable, round)?;
                    state.phase = Phase::Padding {
                        finish: round + solution.stats.xi,
                    };
                    state.solution = Some(solution);
                } else if !state.tracker.is_viewing() {
                    state.phase = Phase::Refining;
                }
            }
            Phase::Padding { .. } => {}
        }
        if let Phase::Padding { finish } = state.phase {
            if round >= finish {
                let report = finalize(arena, state)?;
                return Ok(Step {
                    outbox: vec![None; state.degree],
                    output: Some(report),
                });
            }
        }
        Ok(Step {
            outbox: Self::outbox(state),
            output: None,
        })
    }
}

fn push_decimal(out: &mut Vec<u8>, mut value: u64) {
    let start = out.len();
    loop {
        out.push(b'0' + (value % 10) as u8);
        value /= 10;
        if value == 0 {
            break;
        }
    }
    out[start..].reverse();
}

/// Parses a decimal field without sign or leading zeros.
fn parse_decimal(field: &[u8]) -> Option<u64> {
    if field.is_empty() || field.len() > 19 || (field.len() > 1 && field[0] == b'0') {
        return None;
    }
    field.iter().try_fold(0u64, |acc, &b| {
        b.is_ascii_digit().then(|| acc * 10 + (b - b'0') as u64)
    })
}

fn parse_message(arena: &ViewArena, bytes: &[u8]) -> Result<(u32, Port, ViewRef), String> {
    let malformed = || format!("malformed message `{}`", String::from_utf8_lossy(bytes));
    let mut fields = bytes.split(|&b| b == b' ');
    let depth = fields
        .next()
        .and_then(|f| f.strip_prefix(b"V"))
        .and_then(parse_decimal)
        .and_then(|d| u32::try_from(d).ok())
        .ok_or_else(malformed)?;
    let port = fields
        .next()
        .and_then(parse_decimal)
        .and_then(|p| Port::try_from(p).ok())
        .ok_or_else(malformed)?;
    let handle = fields
        .next()
        .and_then(|f| f.strip_prefix(b"#"))
        .and_then(parse_decimal)
        .and_then(|h| u32::try_from(h).ok())
        .ok_or_else(malformed)?;
    if fields.next().is_some() || handle as usize >= arena.len() {
        return Err(malformed());
    }
    let view = ViewRef::from_index(handle);
    if arena.height(view) != depth {
        return Err(format!(
            "message `{}` names a view of depth {}",
            String::from_utf8_lossy(bytes),
            arena.height(view)
        ));
    }
    Ok((depth, port, view))
}

/// Neighbor views indexed by local port, or why they cannot be used to
/// extend a view of depth `depth`.
fn collect_neighbor_views(
    arena: &ViewArena,
    inbox: &[Option<Message>],
    depth: u32,
) -> Result<Vec<(Port, ViewRef)>, String> {
    inbox
        .iter()
        .enumerate()
        .map(|(p, message)| {
            let bytes = message.as_ref().ok_or_else(|| format!("no message on port {p}"))?;
            let (d, q, view) = parse_message(arena, bytes)?;
            if d != depth {
                return Err(format!("port {p} carries a view of depth {d}, expected {depth}"));
            }
            Ok((q, view))
        })
        .collect()
}

/// Builds the quotient graph from the records within `exit_depth` of the
/// root of `view`, classified by their depth-`depth` truncations. Returns the
/// graph with canonical ids and the class views in canonical order.
fn build_quotient(
    arena: &mut ViewArena,
    view: ViewRef,
    exit_depth: u32,
    depth: u32,
    mut classes: Vec<ViewRef>,
) -> Result<(QuotientGraph, Vec<ViewRef>), String> {
    classes.sort_by(|&a, &b| arena.compare_encodings(a, b));
    let id: FxHashMap<ViewRef, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut ports: Vec<Option<Vec<(usize, Port)>>> = vec![None; classes.len()];
    for x in arena.records_within_depth(view, exit_depth) {
        let a = id[&arena.truncate(x, depth)];
        let mut row = Vec::with_capacity(arena.children(x).len());
        for (q, c) in arena.children(x).to_vec() {
            let b = *id
                .get(&arena.truncate(c, depth))
                .ok_or("a neighbor record matches no class")?;
            row.push((b, q));
        }
        match &ports[a] {
            None => ports[a] = Some(row),
            Some(existing) if *existing == row => {}
            Some(_) => return Err(format!("records of class {a} disagree on their edges")),
        }
    }
    let colors = classes.iter().map(|&c| arena.color(c)).collect();
    let ports = ports
        .into_iter()
        .map(|row| row.ok_or("a class has no record"))
        .collect::<Result<Vec<_>, _>>()?;
    let quotient = QuotientGraph::new(colors, ports).map_err(|e| e.to_string())?;
    Ok((quotient, classes))
}

fn finalize(arena: &mut ViewArena, state: &ProtocolState) -> Result<NodeReport, String> {
    let solution = state.solution.as_ref().ok_or("finalize before the quotient phase")?;
    let params = &state.params;
    let stats = solution.stats.clone();
    let quotient = &solution.quotient;
    if !crate::oracle::feasible(quotient, params.k, params.alpha) {
        return Ok(NodeReport {
            outcome: NodeOutcome::Unsolvable,
            stats,
        });
    }
    let outcome = match params.task {
        Task::Topology => NodeOutcome::Topology {
            graph: quotient.clone(),
            own: solution.own,
        },
        Task::LeaderElection => {
            let depth = stats.refinement_index - 1;
            let path = find_occurrence(arena, state.view, stats.exit_depth, depth, solution.leader)
                .ok_or("no occurrence of the leader class within the exit depth")?;
            NodeOutcome::LeaderPath(path)
        }
    };
    Ok(NodeReport { outcome, stats })
}

/// Shortest port sequence, smallest in lexicographic order among the
/// shortest, leading from the root to a record at depth at most `within`
/// whose depth-`depth` truncation is `target`.
fn find_occurrence(
    arena: &mut ViewArena,
    view: ViewRef,
    within: u32,
    depth: u32,
    target: ViewRef,
) -> Option<Vec<Port>> {
    // (record, parent entry, port from parent)
    let mut entries: Vec<(ViewRef, usize, Port)> = vec![(view, usize::MAX, 0)];
    let mut layer = 0..1;
    for level in 0..=within {
        for e in layer.clone() {
            if arena.truncate(entries[e].0, depth) == target {
                let mut path = Vec::new();
                let mut at = e;
                while entries[at].1 != usize::MAX {
                    path.push(entries[at].2);
                    at = entries[at].1;
                }
                path.reverse();
                return Some(path);
            }
        }
        if level == within {
            break;
        }
        let start = entries.len();
        let mut seen = FxHashSet::default();
        for e in layer {
            let record = entries[e].0;
            for (p, &(_, child)) in arena.children(record).iter().enumerate() {
                if seen.insert(child) {
                    entries.push((child, e, p));
                }
            }
        }
        layer = start..entries.len();
    }
    None
}

/// Algorithm-level check on one path of a view: with `d'` the maximum over
/// the path's records (root included) of the distance to `alpha` inside the
/// record's subtree, true iff `|path| >= 2(k+1)(d'+1)`.
pub fn test_repetition(
    arena: &mut ViewArena,
    view: ViewRef,
    path: &[PathStep],
    k: u32,
    alpha: Color,
) -> Result<bool, ViewError> {
    let mut worst = 0u64;
    for len in 0..=path.len() {
        let (record, _) = arena.resolve(view, &path[..len])?;
        match arena.dist_to_color(record, alpha).finite() {
            Some(d) => worst = worst.max(u64::from(d)),
            None => return Ok(false),
        }
    }
    Ok(path.len() as u64 >= 2 * (u64::from(k) + 1) * (worst + 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XiReport {
    pub xi: u32,
    /// `(exit depth, refinement index)` of each class.
    pub phases: Vec<(u32, u32)>,
}

/// The padding budget: the largest number of rounds any node of `quotient`
/// spends in the view and quotient phases, found by running those phases on
/// the quotient itself.
pub fn compute_xi(
    arena: &mut ViewArena,
    quotient: &QuotientGraph,
    k: u32,
    alpha: Color,
) -> Result<XiReport, ProtocolError> {
    let n = quotient.class_count() as u32;
    let limit = 4 * (k + 1) * (n + 1) + 4 * n + 16;
    let phases = tracker::simulate_phases(arena, quotient, k, alpha, limit)
        .ok_or(ProtocolError::XiDiverged { limit })?;
    let xi = phases.iter().map(|&(l, i)| l + i).max().unwrap_or(0);
    Ok(XiReport { xi, phases })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("k must be at least 1")]
    InvalidK,
    #[error("color {0} does not occur in the network")]
    AlphaAbsent(Color),
    #[error("the network must have at least two nodes")]
    TooSmall,
    #[error("phase simulation on the quotient did not settle within depth {limit}")]
    XiDiverged { limit: u32 },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Round limit used when none is given: comfortably above the proven bound.
pub fn default_max_rounds(k: u32, n: usize, diameter: usize) -> u32 {
    let (n, d) = (n as u32, diameter as u32);
    4 * (k + 1) * (d + 1) + 4 * d + n + 16
}

#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub outcomes: Vec<NodeOutcome>,
    pub stats: Vec<NodeStats>,
    pub rounds: u32,
    pub transcript: Option<Transcript>,
}

pub fn run_protocol(net: &ColoredNetwork, params: Params) -> Result<ProtocolRun, ProtocolError> {
    let max_rounds = default_max_rounds(params.k, net.node_count(), net.network.diameter());
    run_protocol_with(net, params, &shared_arena(), RunOptions::new(max_rounds))
}

/// Runs the protocol with an explicit arena (so that handles are comparable
/// across runs) and engine options.
pub fn run_protocol_with<G: PortGraph>(
    graph: &G,
    params: Params,
    arena: &SharedArena,
    options: RunOptions,
) -> Result<ProtocolRun, ProtocolError> {
    if params.k < 1 {
        return Err(ProtocolError::InvalidK);
    }
    if graph.node_count() < 2 {
        return Err(ProtocolError::TooSmall);
    }
    if !(0..graph.node_count()).any(|v| graph.color(v) == params.alpha) {
        return Err(ProtocolError::AlphaAbsent(params.alpha));
    }
    let program = ProtocolProgram::new(arena.clone());
    let result = engine::run(graph, &program, &params.to_bytes(), options)?;
    let (outcomes, stats) = result
        .outputs
        .into_iter()
        .map(|r| (r.outcome, r.stats))
        .unzip();
    Ok(ProtocolRun {
        outcomes,
        stats,
        rounds: result.rounds,
        transcript: result.transcript,
    })
}
