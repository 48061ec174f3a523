//! Synchronous round executor for the LOCAL model.
//!
//! All nodes start together. A round collects the outboxes of every node that
//! has not produced an output yet, delivers each message to the neighbor
//! across that port (stamped with the receiver's port), and then steps every
//! active node on its inbox. A node that has produced its output sends
//! nothing afterwards; its neighbors see `None` on that port.

use std::fmt::Debug;
use std::io::{self, Write};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::netmodel::{Color, NodeId, PortGraph};

pub type Message = Vec<u8>;

/// Messages indexed by local port.
pub type Mailbox = Vec<Option<Message>>;

pub struct Step<O> {
    pub outbox: Mailbox,
    pub output: Option<O>,
}

/// A deterministic per-node state machine. The same program value drives
/// every node of a run, so it must not depend on node identities.
pub trait NodeProgram {
    type State;
    type Output: Clone + Debug;

    /// Initial state and the messages sent in round 1.
    fn init(&self, degree: usize, color: Color, input: &[u8])
        -> Result<(Self::State, Mailbox), String>;

    /// Processes the inbox of `round` and returns the messages for the next
    /// round, possibly with the final output.
    fn step(
        &self,
        state: &mut Self::State,
        round: u32,
        inbox: &[Option<Message>],
    ) -> Result<Step<Self::Output>, String>;
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("round limit {max_rounds} exceeded; unfinished nodes: {unfinished:?}")]
    RoundLimitExceeded {
        max_rounds: u32,
        unfinished: Vec<NodeId>,
    },
    #[error("node {node} failed in round {round}: {reason}")]
    NodeFault {
        node: NodeId,
        round: u32,
        reason: String,
    },
    #[error("node {node} produced {got} outbox entries but has degree {degree}")]
    OutboxSize {
        node: NodeId,
        got: usize,
        degree: usize,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub max_rounds: u32,
    pub record_transcript: bool,
}

impl RunOptions {
    pub fn new(max_rounds: u32) -> Self {
        RunOptions {
            max_rounds,
            record_transcript: false,
        }
    }

    pub fn with_transcript(mut self) -> Self {
        self.record_transcript = true;
        self
    }
}

/// What one node saw and did in one round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRound {
    pub inbox: Mailbox,
    /// Messages this node put on the wire in this round.
    pub sent: Mailbox,
    pub done: bool,
    /// Debug rendering of the output, in the round it was produced.
    pub output: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    /// `rounds[t - 1][v]` describes node `v` in round `t`.
    pub rounds: Vec<Vec<NodeRound>>,
}

impl Transcript {
    pub fn round_count(&self) -> u32 {
        self.rounds.len() as u32
    }

    pub fn get(&self, round: u32, v: NodeId) -> Option<&NodeRound> {
        let t = usize::try_from(round).ok()?.checked_sub(1)?;
        self.rounds.get(t)?.get(v)
    }

    /// One JSON object per (round, node).
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (t, nodes) in self.rounds.iter().enumerate() {
            for (v, record) in nodes.iter().enumerate() {
                let mut line = json!({
                    "t": t + 1,
                    "v": v,
                    "in": mailbox_json(&record.inbox),
                    "out": mailbox_json(&record.sent),
                    "done": record.done,
                });
                if let Some(output) = &record.output {
                    line["output"] = Value::String(output.clone());
                }
                writeln!(out, "{line}")?;
            }
        }
        Ok(())
    }
}

fn mailbox_json(mailbox: &[Option<Message>]) -> Value {
    let mut map = Map::new();
    for (p, message) in mailbox.iter().enumerate() {
        if let Some(bytes) = message {
            map.insert(p.to_string(), Value::String(hex::encode(bytes)));
        }
    }
    Value::Object(map)
}

#[derive(Clone, Debug)]
pub struct RunResult<O> {
    pub outputs: Vec<O>,
    /// Round in which each node produced its output.
    pub finish_rounds: Vec<u32>,
    /// Last round in which some node was still active.
    pub rounds: u32,
    pub transcript: Option<Transcript>,
}

pub fn run<G, P>(
    graph: &G,
    program: &P,
    input: &[u8],
    options: RunOptions,
) -> Result<RunResult<P::Output>, EngineError>
where
    G: PortGraph,
    P: NodeProgram,
{
    let partial = execute(graph, program, input, options, None)?;
    Ok(RunResult {
        outputs: partial.outputs.into_iter().map(|o| o.expect("all nodes finished")).collect(),
        finish_rounds: partial.finish_rounds,
        rounds: partial.rounds,
        transcript: partial.transcript,
    })
}

/// The transcript of the first `rounds` rounds (fewer if every node
/// finishes earlier), without requiring the run to complete.
pub fn run_prefix<G, P>(graph: &G, program: &P, input: &[u8], rounds: u32) -> Result<Transcript, EngineError>
where
    G: PortGraph,
    P: NodeProgram,
{
    let options = RunOptions::new(rounds).with_transcript();
    let partial = execute(graph, program, input, options, Some(rounds))?;
    Ok(partial.transcript.expect("transcript requested"))
}

struct Partial<O> {
    outputs: Vec<Option<O>>,
    finish_rounds: Vec<u32>,
    rounds: u32,
    transcript: Option<Transcript>,
}

fn execute<G, P>(
    graph: &G,
    program: &P,
    input: &[u8],
    options: RunOptions,
    halt_after: Option<u32>,
) -> Result<Partial<P::Output>, EngineError>
where
    G: PortGraph,
    P: NodeProgram,
{
    let n = graph.node_count();
    let mut states = Vec::with_capacity(n);
    let mut outboxes: Vec<Mailbox> = Vec::with_capacity(n);
    for v in 0..n {
        let (state, outbox) = program
            .init(graph.degree(v), graph.color(v), input)
            .map_err(|reason| EngineError::NodeFault {
                node: v,
                round: 0,
                reason,
            })?;
        check_outbox(graph, v, &outbox)?;
        states.push(state);
        outboxes.push(outbox);
    }
    let mut outputs: Vec<Option<P::Output>> = vec![None; n];
    let mut finish_rounds = vec![0; n];
    let mut transcript = options.record_transcript.then(Transcript::default);
    let mut round = 0;
    while outputs.iter().any(Option::is_none) {
        if Some(round) == halt_after {
            break;
        }
        if round == options.max_rounds {
            return Err(EngineError::RoundLimitExceeded {
                max_rounds: options.max_rounds,
                unfinished: (0..n).filter(|&v| outputs[v].is_none()).collect(),
            });
        }
        round += 1;
        let mut inboxes: Vec<Mailbox> = (0..n).map(|v| vec![None; graph.degree(v)]).collect();
        let keep = transcript.is_some();
        for v in 0..n {
            for (p, message) in outboxes[v].iter_mut().enumerate() {
                let message = if keep { message.clone() } else { message.take() };
                if let Some(message) = message {
                    let (u, q) = graph.neighbor(v, p);
                    inboxes[u][q] = Some(message);
                }
            }
        }
        let sent = std::mem::replace(&mut outboxes, vec![Vec::new(); n]);
        let mut records = Vec::new();
        for v in 0..n {
            let mut produced = None;
            if outputs[v].is_none() {
                let step = program
                    .step(&mut states[v], round, &inboxes[v])
                    .map_err(|reason| EngineError::NodeFault {
                        node: v,
                        round,
                        reason,
                    })?;
                check_outbox(graph, v, &step.outbox)?;
                if let Some(output) = step.output {
                    produced = Some(format!("{output:?}"));
                    outputs[v] = Some(output);
                    finish_rounds[v] = round;
                } else {
                    outboxes[v] = step.outbox;
                }
            }
            if transcript.is_some() {
                records.push(NodeRound {
                    inbox: inboxes[v].clone(),
                    sent: sent[v].clone(),
                    done: outputs[v].is_some(),
                    output: produced,
                });
            }
        }
        if let Some(t) = transcript.as_mut() {
            t.rounds.push(records);
        }
    }
    Ok(Partial {
        outputs,
        finish_rounds,
        rounds: round,
        transcript,
    })
}

fn check_outbox<G: PortGraph>(graph: &G, v: NodeId, outbox: &Mailbox) -> Result<(), EngineError> {
    let degree = graph.degree(v);
    if outbox.len() == degree {
        Ok(())
    } else {
        Err(EngineError::OutboxSize {
            node: v,
            got: outbox.len(),
            degree,
        })
    }
}

/// True iff `u` in the first run and `u2` in the second received the same
/// messages on every port, and finished identically, in rounds `1..=rounds`.
/// Rounds past the end of a transcript count as silent with the node done.
pub fn twin_check(
    first: &Transcript,
    u: NodeId,
    second: &Transcript,
    u2: NodeId,
    rounds: u32,
) -> bool {
    (1..=rounds).all(|t| match (first.get(t, u), second.get(t, u2)) {
        (None, None) => true,
        (Some(a), Some(b)) => a.inbox == b.inbox && a.done == b.done && a.output == b.output,
        (Some(a), None) | (None, Some(a)) => a.done && a.output.is_none() && a.inbox.iter().all(Option::is_none),
    })
}
