//! Differential comparison of protocol runs against the oracle.

use std::fs;
use std::path::{Path, PathBuf};

use colornet::generators::small::k_choices;
use colornet::netmodel::{Color, ColoredNetwork};
use colornet::oracle::{self, Solution};
use colornet::protocol::{run_protocol, NodeOutcome, Params, ProtocolError, ProtocolRun, Task};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::outcome_json;
use crate::{read_network, resolve_bound, Bound, CliError};

/// One disagreement between the protocol and the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub task: Task,
    pub k: u32,
    pub alpha: Color,
    pub node: usize,
    /// `verdict`, `endpoint` or `topology`.
    pub field: &'static str,
    pub protocol: Value,
    pub oracle: Value,
}

impl Mismatch {
    pub fn to_json(&self) -> Value {
        json!({
            "task": self.task.to_string(),
            "k": self.k,
            "alpha": self.alpha,
            "node": self.node,
            "field": self.field,
            "protocol": self.protocol,
            "oracle": self.oracle,
        })
    }
}

/// Result of comparing one network over a set of `(k, alpha)` pairs.
#[derive(Clone, Debug, Default)]
pub struct Comparison {
    pub runs: usize,
    pub mismatches: Vec<Mismatch>,
}

/// The `(k, alpha)` pairs to try: the given pair, or every color with
/// a tight, a loose and a doubled bound.
pub fn bound_pairs(net: &ColoredNetwork, bound: Bound) -> Result<Vec<(u32, Color)>, CliError> {
    if bound.k.is_some() || bound.alpha.is_some() {
        return Ok(vec![resolve_bound(net, bound)?]);
    }
    Ok((1..=net.coloring.color_count())
        .flat_map(|alpha| {
            k_choices(net.coloring.size_of(alpha))
                .into_iter()
                .map(move |k| (k, alpha))
        })
        .collect())
}

pub fn compare_network(net: &ColoredNetwork, pairs: &[(u32, Color)]) -> Result<Comparison, CliError> {
    compare_network_with(net, pairs, run_protocol)
}

/// Like [`compare_network`] with a substitute protocol runner.
pub fn compare_network_with<F>(
    net: &ColoredNetwork,
    pairs: &[(u32, Color)],
    runner: F,
) -> Result<Comparison, CliError>
where
    F: Fn(&ColoredNetwork, Params) -> Result<ProtocolRun, ProtocolError>,
{
    let mut result = Comparison::default();
    for &(k, alpha) in pairs {
        for task in [Task::LeaderElection, Task::Topology] {
            let expected = oracle::oracle_solve(net, k, alpha, task)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let run = runner(net, Params::new(k, alpha, task))?;
            diff(net, k, alpha, task, &run.outcomes, &expected, &mut result.mismatches);
            result.runs += 1;
        }
    }
    Ok(result)
}

fn diff(
    net: &ColoredNetwork,
    k: u32,
    alpha: Color,
    task: Task,
    outcomes: &[NodeOutcome],
    expected: &Solution,
    out: &mut Vec<Mismatch>,
) {
    let mismatch = |node, field, protocol: Value, oracle: Value| Mismatch {
        task,
        k,
        alpha,
        node,
        field,
        protocol,
        oracle,
    };
    for (v, (got, want)) in outcomes.iter().zip(&expected.outcomes).enumerate() {
        let solvable = |o: &NodeOutcome| *o != NodeOutcome::Unsolvable;
        if solvable(got) != solvable(want) {
            out.push(mismatch(v, "verdict", outcome_json(got), outcome_json(want)));
            continue;
        }
        match got {
            NodeOutcome::Unsolvable => {}
            NodeOutcome::LeaderPath(path) => {
                let end = net.network.walk(v, path);
                if end.is_none() || end != expected.leader {
                    out.push(mismatch(v, "endpoint", json!(end), json!(expected.leader)));
                }
            }
            NodeOutcome::Topology { .. } => {
                if got != want {
                    out.push(mismatch(v, "topology", outcome_json(got), outcome_json(want)));
                }
            }
        }
    }
}

/// Compares a file (JSON report) or every `.net` file of a directory (CSV,
/// one row per file in name order). The flag is false on any mismatch or error.
pub fn compare_path(path: &Path, bound: Bound) -> Result<(String, bool), CliError> {
    if path.is_dir() {
        compare_dir(path, bound)
    } else {
        let net = read_network(path)?;
        let comparison = compare_network(&net, &bound_pairs(&net, bound)?)?;
        let ok = comparison.mismatches.is_empty();
        let doc = json!({
            "file": path.display().to_string(),
            "runs": comparison.runs,
            "ok": ok,
            "mismatches": comparison.mismatches.iter().map(Mismatch::to_json).collect::<Vec<_>>(),
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
        text.push('\n');
        Ok((text, ok))
    }
}

fn compare_dir(dir: &Path, bound: Bound) -> Result<(String, bool), CliError> {
    let io_error = |source| CliError::Io {
        path: dir.to_owned(),
        source,
    };
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_error)? {
        let path = entry.map_err(io_error)?.path();
        let hidden = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.starts_with('.'));
        let network_file = path.extension().is_some_and(|e| e == "net");
        if path.is_file() && network_file && !hidden {
            files.push(path);
        }
    }
    files.sort();
    let rows: Vec<(String, bool)> = files
        .par_iter()
        .map(|file| {
            let name = csv_field(&file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
            let outcome = read_network(file).and_then(|net| compare_network(&net, &bound_pairs(&net, bound)?));
            match outcome {
                Ok(c) if c.mismatches.is_empty() => (format!("{name},{},0,ok\n", c.runs), true),
                Ok(c) => (format!("{name},{},{},mismatch\n", c.runs, c.mismatches.len()), false),
                Err(e) => (format!("{name},0,0,error: {}\n", csv_field(&e.to_string())), false),
            }
        })
        .collect();
    let mut text = String::from("file,runs,mismatches,status\n");
    let mut ok = true;
    for (row, row_ok) in rows {
        text.push_str(&row);
        ok &= row_ok;
    }
    Ok((text, ok))
}

fn csv_field(text: &str) -> String {
    text.replace([',', '\n'], " ")
}
