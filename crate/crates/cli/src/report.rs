//! JSON and CSV renderings of oracle answers and protocol runs.

use colornet::netmodel::{Color, ColoredNetwork};
use colornet::oracle;
use colornet::protocol::{NodeOutcome, NodeStats, Params, ProtocolRun};
use serde_json::{json, Value};

pub fn outcome_json(outcome: &NodeOutcome) -> Value {
    match outcome {
        NodeOutcome::Unsolvable => json!({ "outcome": "unsolvable" }),
        NodeOutcome::LeaderPath(path) => json!({ "outcome": "leader_path", "path": path }),
        NodeOutcome::Topology { graph, own } => json!({
            "outcome": "topology",
            "own": own,
            "quotient": graph.to_json_value(),
        }),
    }
}

fn stats_json(stats: &NodeStats) -> Value {
    json!({
        "exit_depth": stats.exit_depth,
        "refinement_index": stats.refinement_index,
        "tau": stats.tau,
        "xi": stats.xi,
    })
}

pub fn run_json(params: &Params, run: &ProtocolRun) -> String {
    let nodes: Vec<Value> = run
        .outcomes
        .iter()
        .zip(&run.stats)
        .enumerate()
        .map(|(v, (outcome, stats))| {
            let mut node = json!({ "node": v });
            merge(&mut node, outcome_json(outcome));
            merge(&mut node, stats_json(stats));
            node
        })
        .collect();
    let doc = json!({
        "task": params.task.to_string(),
        "k": params.k,
        "alpha": params.alpha,
        "rounds": run.rounds,
        "nodes": nodes,
    });
    pretty(&doc)
}

pub fn run_csv(run: &ProtocolRun) -> String {
    let mut out = String::from("node,outcome,path,own,exit_depth,refinement_index,tau,xi,rounds\n");
    for (v, (outcome, stats)) in run.outcomes.iter().zip(&run.stats).enumerate() {
        let (kind, path, own) = match outcome {
            NodeOutcome::Unsolvable => ("unsolvable", String::new(), String::new()),
            NodeOutcome::LeaderPath(path) => {
                let ports: Vec<String> = path.iter().map(|p| p.to_string()).collect();
                ("leader_path", ports.join(" "), String::new())
            }
            NodeOutcome::Topology { own, .. } => ("topology", String::new(), own.to_string()),
        };
        out.push_str(&format!(
            "{v},{kind},{path},{own},{},{},{},{},{}\n",
            stats.exit_depth, stats.refinement_index, stats.tau, stats.xi, run.rounds
        ));
    }
    out
}

pub fn oracle_json(net: &ColoredNetwork, k: u32, alpha: Color) -> String {
    let q = oracle::quotient(net);
    let feasible = oracle::feasible(&q.graph, k, alpha);
    let leader = if feasible {
        q.class_of.iter().position(|&c| c == 0)
    } else {
        None
    };
    let doc = json!({
        "n": net.node_count(),
        "k": k,
        "alpha": alpha,
        "k_valid": oracle::validate_k(&net.coloring, alpha, k),
        "quotient": q.graph.to_json_value(),
        "class_of": q.class_of,
        "t_star": q.t_star,
        "sigma": q.sigma,
        "feasible": feasible,
        "leader": leader,
    });
    pretty(&doc)
}

fn merge(target: &mut Value, extra: Value) {
    if let (Value::Object(t), Value::Object(e)) = (target, extra) {
        t.extend(e);
    }
}

fn pretty(doc: &Value) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    text.push('\n');
    text
}
