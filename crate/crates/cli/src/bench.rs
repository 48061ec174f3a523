//! The `bench` subcommand: measured rounds against the view-depth bound.

use clap::{Args, ValueEnum};
use colornet::generators::{self, RingSpec};
use colornet::netmodel::{Color, ColoredNetwork};
use colornet::oracle;
use colornet::protocol::{run_protocol, Params, Task};
use rayon::prelude::*;

use crate::gen::{ring_spec, PortPattern};
use crate::{CliError, Output, TaskArg};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BenchFamily {
    /// Chordal rings G(n, d) with one node of color 1.
    Chordal,
    /// Oriented rings with one node of color 1.
    Ring,
    /// Stretched copies of a base ring with minimal color counts.
    Stretch,
}

#[derive(Clone, Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub family: BenchFamily,
    /// Network sizes, e.g. `12..48:4` or `10,20,40` (chordal and ring).
    #[arg(long, value_parser = parse_range)]
    pub n: Option<Values>,
    /// Values of k, e.g. `1..6`.
    #[arg(long, value_parser = parse_range)]
    pub k: Values,
    /// Chord length for chordal rings.
    #[arg(long)]
    pub d: Option<usize>,
    /// Diameter parameter for chordal rings: chord length `floor(n / D)`.
    #[arg(long)]
    pub diameter: Option<usize>,
    /// View depths to stretch for (stretch).
    #[arg(long, value_parser = parse_range)]
    pub t: Option<Values>,
    /// Base ring colors (stretch).
    #[arg(long, value_delimiter = ',', default_value = "1,2,2,3,3,3")]
    pub colors: Vec<Color>,
    #[arg(long, value_enum, default_value_t = TaskArg::Le)]
    pub task: TaskArg,
    #[command(flatten)]
    pub output: Output,
}

/// A list of values given as a range expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Values(pub Vec<usize>);

/// Parses comma-separated values and inclusive ranges `a..b` with an
/// optional step `a..b:s`.
pub fn parse_range(text: &str) -> Result<Values, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let number = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad number `{s}` in `{text}`"));
        match part.split_once("..") {
            None => out.push(number(part)?),
            Some((start, rest)) => {
                let (end, step) = match rest.split_once(':') {
                    Some((end, step)) => (end, number(step)?),
                    None => (rest, 1),
                };
                let (start, end) = (number(start)?, number(end)?);
                if step == 0 || start > end {
                    return Err(format!("empty range `{part}`"));
                }
                out.extend((start..=end).step_by(step));
            }
        }
    }
    Ok(Values(out))
}

pub const HEADER: &str = "n,D,k,rounds,bound,i";

/// `2(k+1)(D+1)+D`, the bound on the depth at which the view phase ends.
pub fn view_bound(k: u32, diameter: usize) -> u64 {
    let (k, d) = (u64::from(k), diameter as u64);
    2 * (k + 1) * (d + 1) + d
}

fn networks(args: &BenchArgs) -> Result<Vec<ColoredNetwork>, CliError> {
    let usage = |m: &str| CliError::Usage(m.to_string());
    let sizes = || args.n.clone().map(|v| v.0).ok_or_else(|| usage("--n is required for this family"));
    let mut out = Vec::new();
    match args.family {
        BenchFamily::Chordal => {
            for n in sizes()? {
                let d = match (args.d, args.diameter) {
                    (Some(d), _) => d,
                    (None, Some(diameter)) if diameter > 0 => n / diameter,
                    _ => return Err(usage("chordal bench needs --d or --diameter")),
                };
                let network = generators::gen_chordal(n, d).map_err(|e| CliError::Usage(e.to_string()))?;
                out.push(generators::single_alpha(network, 0).map_err(|e| CliError::Usage(e.to_string()))?);
            }
        }
        BenchFamily::Ring => {
            for n in sizes()? {
                let colors = (0..n).map(|v| if v == 0 { 1 } else { 2 }).collect();
                out.push(generators::gen_ring(&RingSpec::oriented(colors)).map_err(|e| CliError::Usage(e.to_string()))?);
            }
        }
        BenchFamily::Stretch => {
            let depths = args.t.clone().map(|v| v.0).ok_or_else(|| usage("stretch bench needs --t"))?;
            let base = ring_spec(&args.colors, PortPattern::Oriented)?;
            let r = args.colors.iter().copied().max().unwrap_or(0) as usize;
            for t in depths {
                let m = t.div_ceil(base.len());
                let targets: Vec<usize> = (1..=r)
                    .map(|c| (2 * m + 1) * args.colors.iter().filter(|&&x| x as usize == c).count())
                    .collect();
                let spec = generators::gen_stretch(&base, t, &targets).map_err(|e| CliError::Usage(e.to_string()))?;
                out.push(generators::gen_ring(&spec).map_err(|e| CliError::Usage(e.to_string()))?);
            }
        }
    }
    Ok(out)
}

/// One CSV row per network and value of k, in argument order.
pub fn run_bench(args: &BenchArgs) -> Result<String, CliError> {
    if args.k.0.is_empty() {
        return Err(CliError::Usage("--k needs at least one value".into()));
    }
    let task: Task = args.task.into();
    let mut cases = Vec::new();
    for net in networks(args)? {
        for &k in &args.k.0 {
            let k = k as u32;
            let actual = net.coloring.size_of(1);
            if !oracle::validate_k(&net.coloring, 1, k) {
                return Err(CliError::KTooSmall { k, alpha: 1, actual });
            }
            cases.push((net.clone(), k));
        }
    }
    let rows: Vec<Result<String, CliError>> = cases
        .par_iter()
        .map(|(net, k)| {
            let run = run_protocol(net, Params::new(*k, 1, task))?;
            let diameter = net.network.diameter();
            let i = run.stats.iter().map(|s| s.refinement_index).max().unwrap_or(0);
            Ok(format!(
                "{},{},{},{},{},{}\n",
                net.node_count(),
                diameter,
                k,
                run.rounds,
                view_bound(*k, diameter),
                i
            ))
        })
        .collect();
    let mut text = format!("{HEADER}\n");
    for row in rows {
        text.push_str(&row?);
    }
    Ok(text)
}
