//! Network families: colored rings and their stretched copies, chordal rings,
//! chordal rings with a pendant edge, and exhaustive small networks.

pub mod small;

use thiserror::Error;

use crate::netmodel::{Color, ColoredNetwork, Coloring, Edge, NetworkError, Port, PortNetwork};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("a ring needs at least 3 nodes, got {0}")]
    RingTooSmall(usize),
    #[error("ring has {nodes} nodes but {edges} edge port pairs")]
    RingShape { nodes: usize, edges: usize },
    #[error("alternating port pattern needs an even ring, got {0} nodes")]
    OddAlternatingRing(usize),
    #[error("chordal ring G({n}, {d}) needs 1 <= d < n/2")]
    ChordalShape { n: usize, d: usize },
    #[error("stretch needs a target for each of the {expected} colors, got {got}")]
    TargetCount { expected: usize, got: usize },
    #[error("target {target} for color {color} is below the required {required}")]
    TargetTooSmall {
        color: Color,
        target: usize,
        required: usize,
    },
    #[error("stretch needs T >= 1")]
    ZeroRounds,
    #[error("pendant family needs n >= 3 and k >= 1")]
    PendantShape,
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// A ring `v_0 .. v_(n-1)` where edge `i` joins `v_i` and `v_(i+1 mod n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    /// Per edge `i`: (port at `v_i`, port at `v_(i+1 mod n)`).
    pub ports: Vec<(Port, Port)>,
    pub colors: Vec<Color>,
}

impl RingSpec {
    /// Every edge leaves through port 0 and arrives at port 1.
    pub fn oriented(colors: Vec<Color>) -> Self {
        RingSpec {
            ports: vec![(0, 1); colors.len()],
            colors,
        }
    }

    /// Edges alternate between port 0 at both ends and port 1 at both ends.
    pub fn alternating(colors: Vec<Color>) -> Result<Self, GenError> {
        if colors.len() % 2 == 1 {
            return Err(GenError::OddAlternatingRing(colors.len()));
        }
        Ok(RingSpec {
            ports: (0..colors.len()).map(|i| (i % 2, i % 2)).collect(),
            colors,
        })
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

pub fn gen_ring(spec: &RingSpec) -> Result<ColoredNetwork, GenError> {
    let n = spec.len();
    if n < 3 {
        return Err(GenError::RingTooSmall(n));
    }
    if spec.ports.len() != n {
        return Err(GenError::RingShape {
            nodes: n,
            edges: spec.ports.len(),
        });
    }
    let edges: Vec<Edge> = spec
        .ports
        .iter()
        .enumerate()
        .map(|(i, &(p, q))| Edge {
            u: i,
            pu: p,
            v: (i + 1) % n,
            pv: q,
        })
        .collect();
    let network = PortNetwork::from_edges(n, &edges)?;
    let coloring = Coloring::new(spec.colors.clone())?;
    Ok(ColoredNetwork::new(network, coloring)?)
}

/// Stretches `base` into a ring with `targets[j - 1]` nodes of color `j`
/// whose nodes `v'_(n m)` and `v'_(n m + n)`, `m = ceil(T/n)`, look like
/// `v_0` up to depth `T`.
///
/// Positions `0 .. 2nm + n - 1` copy the base cyclically, with ports of the
/// edges leaving them. The remaining edges continue the base port pattern
/// except the closing edge, which takes the free port at both ends. The
/// remaining colors are filled in increasing color order.
pub fn gen_stretch(base: &RingSpec, t: usize, targets: &[usize]) -> Result<RingSpec, GenError> {
    let n = base.len();
    if n < 3 || base.ports.len() != n {
        return Err(GenError::RingShape {
            nodes: n,
            edges: base.ports.len(),
        });
    }
    if t == 0 {
        return Err(GenError::ZeroRounds);
    }
    let r = base.colors.iter().copied().max().unwrap_or(0) as usize;
    if targets.len() != r {
        return Err(GenError::TargetCount {
            expected: r,
            got: targets.len(),
        });
    }
    let m = t.div_ceil(n);
    let copied = 2 * n * m + n;
    let mut counts = vec![0usize; r + 1];
    for &c in &base.colors {
        counts[c as usize] += 1;
    }
    for color in 1..=r {
        let required = (2 * m + 1) * counts[color];
        if targets[color - 1] < required {
            return Err(GenError::TargetTooSmall {
                color: color as Color,
                target: targets[color - 1],
                required,
            });
        }
    }
    let total: usize = targets.iter().sum();
    let mut colors: Vec<Color> = (0..copied).map(|i| base.colors[i % n]).collect();
    let mut placed = vec![0usize; r + 1];
    for &c in &colors {
        placed[c as usize] += 1;
    }
    for color in 1..=r {
        colors.extend(std::iter::repeat_n(color as Color, targets[color - 1] - placed[color]));
    }
    let mut ports: Vec<(Port, Port)> = (0..total).map(|i| base.ports[i % n]).collect();
    if !total.is_multiple_of(n) {
        let before_last = ports[total - 2].1;
        ports[total - 1] = (1 - before_last, 1 - ports[0].0);
    }
    Ok(RingSpec { ports, colors })
}

/// Chordal ring `G(n, d)`: `v_i` is joined to `v_(i+j)` for `j = 1..=d`, with
/// port `j - 1` at `v_i` and port `d + j - 1` at `v_(i+j)`.
pub fn gen_chordal(n: usize, d: usize) -> Result<PortNetwork, GenError> {
    if d == 0 || 2 * d >= n {
        return Err(GenError::ChordalShape { n, d });
    }
    let edges: Vec<Edge> = (0..n)
        .flat_map(|i| {
            (1..=d).map(move |j| Edge {
                u: i,
                pu: j - 1,
                v: (i + j) % n,
                pv: d + j - 1,
            })
        })
        .collect();
    Ok(PortNetwork::from_edges(n, &edges)?)
}

/// The pair of networks behind the lower bound for chordal rings, with
/// `alpha = 1` and every other node of color 2:
/// `G(n, d)` with `v_0` of color 1, and `G(kn, d)` with nodes `v'_(nj)` of
/// color 1 plus a pendant node `kn` attached to `v'_0` at its port `2d`
/// (port 0 at the pendant).
pub fn gen_pendant_family(
    n: usize,
    d: usize,
    k: usize,
) -> Result<(ColoredNetwork, ColoredNetwork), GenError> {
    if n < 3 || k == 0 {
        return Err(GenError::PendantShape);
    }
    let small = gen_chordal(n, d)?;
    let small_colors = (0..n).map(|i| if i == 0 { 1 } else { 2 }).collect();
    let small = ColoredNetwork::new(small, Coloring::new(small_colors)?)?;

    let big_n = k * n;
    let big = gen_chordal(big_n, d)?;
    let mut edges = big.edges();
    edges.push(Edge {
        u: 0,
        pu: 2 * d,
        v: big_n,
        pv: 0,
    });
    let big = PortNetwork::from_edges(big_n + 1, &edges)?;
    let big_colors = (0..=big_n)
        .map(|i| if i < big_n && i % n == 0 { 1 } else { 2 })
        .collect();
    let big = ColoredNetwork::new(big, Coloring::new(big_colors)?)?;
    Ok((small, big))
}

/// Colors node `at` with color 1 and every other node with color 2.
pub fn single_alpha(network: PortNetwork, at: usize) -> Result<ColoredNetwork, GenError> {
    let colors = (0..network.node_count())
        .map(|v| if v == at { 1 } else { 2 })
        .collect();
    Ok(ColoredNetwork::new(network, Coloring::new(colors)?)?)
}
