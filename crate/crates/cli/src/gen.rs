//! The `gen` subcommand: network families in the network file format.

use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use colornet::generators::{self, GenError, RingSpec};
use colornet::netmodel::{Color, ColoredNetwork, Coloring};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum PortPattern {
    /// Port 0 towards the next node, port 1 towards the previous one.
    #[default]
    Oriented,
    /// Edges alternate between ports 0-0 and 1-1.
    Alternating,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ChordalColoring {
    /// Node 0 has color 1, all others color 2.
    #[default]
    Single,
    Uniform,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Member {
    Small,
    #[default]
    Big,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Family {
    /// A ring with the given node colors.
    Ring {
        #[arg(long, value_delimiter = ',', required = true)]
        colors: Vec<Color>,
        #[arg(long, value_enum, default_value_t = PortPattern::Oriented)]
        ports: PortPattern,
    },
    /// Chordal ring G(n, d).
    Chordal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = ChordalColoring::Single)]
        coloring: ChordalColoring,
    },
    /// G(n, d) with one node of color 1, or G(kn, d) with k nodes of color
    /// 1 and a pendant node.
    Pendant {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Member::Big)]
        member: Member,
    },
    /// A ring stretched to the given color counts while keeping depth-T
    /// views.
    Stretch {
        #[arg(long, value_delimiter = ',', required = true)]
        colors: Vec<Color>,
        #[arg(long, value_enum, default_value_t = PortPattern::Oriented)]
        ports: PortPattern,
        #[arg(long)]
        t: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<usize>,
    },
}

fn gen_error(e: GenError) -> CliError {
    CliError::Invalid {
        path: PathBuf::from("<gen>"),
        message: e.to_string(),
    }
}

pub fn ring_spec(colors: &[Color], ports: PortPattern) -> Result<RingSpec, CliError> {
    match ports {
        PortPattern::Oriented => Ok(RingSpec::oriented(colors.to_vec())),
        PortPattern::Alternating => RingSpec::alternating(colors.to_vec()).map_err(gen_error),
    }
}

pub fn generate(family: &Family) -> Result<ColoredNetwork, CliError> {
    match family {
        Family::Ring { colors, ports } => generators::gen_ring(&ring_spec(colors, *ports)?).map_err(gen_error),
        Family::Chordal { n, d, coloring } => {
            let network = generators::gen_chordal(*n, *d).map_err(gen_error)?;
            match coloring {
                ChordalColoring::Single => generators::single_alpha(network, 0).map_err(gen_error),
                ChordalColoring::Uniform => ColoredNetwork::new(network, Coloring::uniform(*n))
                    .map_err(|e| gen_error(e.into())),
            }
        }
        Family::Pendant { n, d, k, member } => {
            let (small, big) = generators::gen_pendant_family(*n, *d, *k).map_err(gen_error)?;
            Ok(match member {
                Member::Small => small,
                Member::Big => big,
            })
        }
        Family::Stretch {
            colors,
            ports,
            t,
            targets,
        } => {
            let base = ring_spec(colors, *ports)?;
            let spec = generators::gen_stretch(&base, *t, targets).map_err(gen_error)?;
            generators::gen_ring(&spec).map_err(gen_error)
        }
    }
}
