//! Single-vertex flip walk with optional Metropolis annealing on boundary length.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::partition::Partition;
use crate::{Error, Result};

/// Piecewise-linear inverse temperature over chain steps, constant outside
/// the first and last breakpoints. An empty schedule means `beta = 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BetaSchedule {
    points: Vec<(u64, f64)>,
}

impl BetaSchedule {
    pub fn new(points: Vec<(u64, f64)>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0 < w[0].0) {
            return Err(Error::InvalidArgument(
                "beta breakpoints must be nondecreasing in step".into(),
            ));
        }
        if points.iter().any(|p| !p.1.is_finite()) {
            return Err(Error::InvalidArgument("beta values must be finite".into()));
        }
        Ok(BetaSchedule { points })
    }

    pub fn constant(beta: f64) -> Self {
        BetaSchedule {
            points: vec![(0, beta)],
        }
    }

    /// Parse `step:beta,step:beta,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::default());
        }
        let points = s
            .split(',')
            .map(|item| {
                let (step, beta) = item
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected step:beta, got {item:?}")))?;
                let step = step
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad step in {item:?}")))?;
                let beta = beta
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad beta in {item:?}")))?;
                Ok((step, beta))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn beta_at(&self, step: u64) -> f64 {
        let Some(&(first_step, first_beta)) = self.points.first() else {
            return 0.0;
        };
        if step <= first_step {
            return first_beta;
        }
        for w in self.points.windows(2) {
            let ((s0, b0), (s1, b1)) = (w[0], w[1]);
            if step <= s1 {
                if s1 == s0 {
                    return b1;
                }
                let t = (step - s0) as f64 / (s1 - s0) as f64;
                return b0 + t * (b1 - b0);
            }
        }
        self.points.last().map_or(0.0, |p| p.1)
    }
}

/// Direction of the Metropolis weighting on boundary length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnnealSign {
    /// Accept with `min(1, exp(-beta * delta))`: shorter boundaries are favored.
    #[default]
    Compact,
    /// Accept with `min(1, exp(+beta * delta))`: target weight `exp(beta |boundary|)`.
    Literal,
}

#[derive(Debug, Clone)]
pub struct ChainSpec {
    pub steps: u64,
    /// Emit a sample every `stride` steps (the start is always emitted).
    pub stride: u64,
    pub seed: u64,
    pub beta: BetaSchedule,
    pub sign: AnnealSign,
    /// Component populations must stay within `(1 +- tolerance) * total / k`.
    /// `f64::INFINITY` disables the constraint.
    pub tolerance: f64,
    /// Vertex populations; unit weights when absent.
    pub population: Option<Vec<f64>>,
}

impl Default for ChainSpec {
    fn default() -> Self {
        ChainSpec {
            steps: 0,
            stride: 1,
            seed: 0,
            beta: BetaSchedule::default(),
            sign: AnnealSign::Compact,
            tolerance: 0.05,
            population: None,
        }
    }
}

struct State<'a> {
    g: &'a Graph,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    pops: Vec<f64>,
    weight: Vec<f64>,
    lo: f64,
    hi: f64,
    seen: Vec<u64>,
    stamp: u64,
    stack: Vec<usize>,
    candidates: Vec<(usize, usize)>,
}

impl State<'_> {
    const SLACK: f64 = 1e-9;

    fn collect_candidates(&mut self) {
        self.candidates.clear();
        for e in self.g.edges() {
            let (a, b) = (self.labels[e.tail], self.labels[e.head]);
            if a != b {
                self.candidates.push((e.tail, b));
                self.candidates.push((e.head, a));
            }
        }
        self.candidates.sort_unstable();
        self.candidates.dedup();
    }

    /// Whether the component `label` stays connected once `v` leaves it.
    fn connected_without(&mut self, v: usize, label: usize) -> bool {
        let Some(start) = self.g.neighbors(v).find(|&w| self.labels[w] == label) else {
            return false;
        };
        self.stamp += 1;
        let stamp = self.stamp;
        self.seen[v] = stamp;
        self.seen[start] = stamp;
        self.stack.clear();
        self.stack.push(start);
        let mut reached = 1;
        while let Some(u) = self.stack.pop() {
            for w in self.g.neighbors(u) {
                if self.labels[w] == label && self.seen[w] != stamp {
                    self.seen[w] = stamp;
                    reached += 1;
                    self.stack.push(w);
                }
            }
        }
        reached == self.sizes[label] - 1
    }

    fn within_bounds(&self, pop: f64) -> bool {
        let scale = self.hi.abs().max(1.0);
        pop >= self.lo - Self::SLACK * scale && pop <= self.hi + Self::SLACK * scale
    }

    fn boundary_delta(&self, v: usize, to: usize) -> i64 {
        let from = self.labels[v];
        self.g
            .neighbors(v)
            .map(|w| {
                let l = self.labels[w];
                (l != to) as i64 - (l != from) as i64
            })
            .sum()
    }
}

/// Run a flip walk from `start`, returning the start followed by a sample
/// every `spec.stride` steps.
///
/// Each step picks a uniformly random `(boundary vertex, neighboring label)`
/// pair and proposes relabeling the vertex. Proposals that empty or
/// disconnect a component, or leave a component outside the population
/// band, are rejected; otherwise the move is accepted with the Metropolis
/// probability for the current `beta`. Rejected steps still count.
pub fn flip_chain(g: &Graph, start: &Partition, spec: &ChainSpec) -> Result<Vec<Partition>> {
    let n = g.vertex_count();
    if start.vertex_count() != n {
        return Err(Error::InvalidArgument(
            "start partition does not match the graph".into(),
        ));
    }
    if !start.is_connected() {
        return Err(Error::InvalidPartition(
            "start partition has a disconnected component".into(),
        ));
    }
    if spec.stride == 0 {
        return Err(Error::InvalidArgument("stride must be positive".into()));
    }
    if spec.tolerance.is_nan() || spec.tolerance < 0.0 {
        return Err(Error::InvalidArgument(
            "tolerance must be nonnegative".into(),
        ));
    }
    let weight = match &spec.population {
        Some(p) if p.len() != n => {
            return Err(Error::InvalidArgument("population length mismatch".into()))
        }
        Some(p) => p.clone(),
        None => vec![1.0; n],
    };
    let k = start.k();
    let labels = start.labels().to_vec();
    let mut pops = vec![0.0; k];
    let mut sizes = vec![0; k];
    for (v, &l) in labels.iter().enumerate() {
        pops[l] += weight[v];
        sizes[l] += 1;
    }
    let ideal = weight.iter().sum::<f64>() / k as f64;
    let (lo, hi) = if spec.tolerance.is_infinite() {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        (
            (1.0 - spec.tolerance) * ideal,
            (1.0 + spec.tolerance) * ideal,
        )
    };
    let mut state = State {
        g,
        labels,
        sizes,
        pops,
        weight,
        lo,
        hi,
        seen: vec![0; n],
        stamp: 0,
        stack: Vec::new(),
        candidates: Vec::new(),
    };
    if let Some(c) = (0..k).find(|&c| !state.within_bounds(state.pops[c])) {
        return Err(Error::InvalidPartition(format!(
            "start component {c} has population {} outside [{lo}, {hi}]",
            state.pops[c]
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut samples = vec![start.clone()];
    for step in 1..=spec.steps {
        state.collect_candidates();
        if !state.candidates.is_empty() {
            let (v, to) = state.candidates[rng.gen_range(0..state.candidates.len())];
            let from = state.labels[v];
            let w = state.weight[v];
            let legal = state.sizes[from] > 1
                && state.within_bounds(state.pops[from] - w)
                && state.within_bounds(state.pops[to] + w)
                && state.connected_without(v, from);
            if legal {
                let beta = spec.beta.beta_at(step);
                let accept = if beta == 0.0 {
                    true
                } else {
                    let delta = state.boundary_delta(v, to) as f64;
                    let exponent = match spec.sign {
                        AnnealSign::Compact => -beta * delta,
                        AnnealSign::Literal => beta * delta,
                    };
                    exponent >= 0.0 || rng.gen::<f64>() < exponent.exp()
                };
                if accept {
                    state.labels[v] = to;
                    state.sizes[from] -= 1;
                    state.sizes[to] += 1;
                    state.pops[from] -= w;
                    state.pops[to] += w;
                }
            }
        }
        if step % spec.stride == 0 {
            samples.push(Partition::from_labels(g, &state.labels, k)?);
        }
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;

    fn stripes(g: &Graph, rows: usize, cols: usize, k: usize) -> Partition {
        let labels: Vec<usize> = (0..rows * cols).map(|v| (v % cols) * k / cols).collect();
        Partition::from_labels(g, &labels, k).unwrap()
    }

    #[test]
    fn zero_steps_returns_start() {
        let g = grid_graph(4, 4).unwrap();
        let start = stripes(&g, 4, 4, 2);
        let out = flip_chain(&g, &start, &ChainSpec::default()).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].labels(), start.labels());
    }

    #[test]
    fn single_component_never_moves() {
        let g = grid_graph(3, 3).unwrap();
        let start = Partition::from_labels(&g, &[0; 9], 1).unwrap();
        let spec = ChainSpec {
            steps: 50,
            tolerance: f64::INFINITY,
            ..ChainSpec::default()
        };
        let out = flip_chain(&g, &start, &spec).unwrap();
        assert_eq!(out.len(), 51);
        assert!(out.iter().all(|p| p.labels() == start.labels()));
    }

    #[test]
    fn zero_tolerance_keeps_exact_sizes() {
        let g = grid_graph(6, 6).unwrap();
        let start = stripes(&g, 6, 6, 3);
        let spec = ChainSpec {
            steps: 10_000,
            stride: 100,
            seed: 7,
            tolerance: 0.0,
            ..ChainSpec::default()
        };
        let out = flip_chain(&g, &start, &spec).unwrap();
        assert_eq!(out.len(), 101);
        for p in &out {
            assert_eq!(p.size_multiset(), vec![12, 12, 12]);
            assert!(p.is_connected());
        }
    }

    #[test]
    fn samples_stay_valid_and_move() {
        let g = grid_graph(6, 6).unwrap();
        let start = stripes(&g, 6, 6, 3);
        let spec = ChainSpec {
            steps: 5_000,
            stride: 50,
            seed: 11,
            tolerance: 0.25,
            ..ChainSpec::default()
        };
        let out = flip_chain(&g, &start, &spec).unwrap();
        assert!(out.iter().any(|p| p.labels() != start.labels()));
        for p in &out {
            assert!(p.is_connected());
            for s in p.size_multiset() {
                assert!((9..=15).contains(&s));
            }
        }
    }

    #[test]
    fn same_seed_same_chain() {
        let g = grid_graph(5, 5).unwrap();
        let labels: Vec<usize> = (0..25).map(|v| usize::from(v >= 12)).collect();
        let start = Partition::from_labels(&g, &labels, 2).unwrap();
        let spec = ChainSpec {
            steps: 2_000,
            stride: 10,
            seed: 3,
            tolerance: 0.3,
            beta: BetaSchedule::parse("0:0,1000:2").unwrap(),
            ..ChainSpec::default()
        };
        let a = flip_chain(&g, &start, &spec).unwrap();
        let b = flip_chain(&g, &start, &spec).unwrap();
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(x, y)| x.labels() == y.labels()));
        let other = flip_chain(&g, &start, &ChainSpec { seed: 4, ..spec }).unwrap();
        assert!(a.iter().zip(&other).any(|(x, y)| x.labels() != y.labels()));
    }

    #[test]
    fn rejects_invalid_start() {
        let g = grid_graph(2, 2).unwrap();
        let split = Partition::from_labels(&g, &[0, 1, 1, 0], 2).unwrap();
        assert!(flip_chain(&g, &split, &ChainSpec::default()).is_err());
        let uneven = Partition::from_labels(&g, &[0, 0, 0, 1], 2).unwrap();
        assert!(flip_chain(
            &g,
            &uneven,
            &ChainSpec {
                tolerance: 0.0,
                ..ChainSpec::default()
            }
        )
        .is_err());
        let ok = Partition::from_labels(&g, &[0, 0, 1, 1], 2).unwrap();
        assert!(flip_chain(
            &g,
            &ok,
            &ChainSpec {
                stride: 0,
                ..ChainSpec::default()
            }
        )
        .is_err());
    }

    #[test]
    fn schedule_interpolates() {
        let s = BetaSchedule::parse("100:0, 300:3").unwrap();
        assert_eq!(s.beta_at(0), 0.0);
        assert_eq!(s.beta_at(200), 1.5);
        assert_eq!(s.beta_at(300), 3.0);
        assert_eq!(s.beta_at(10_000), 3.0);
        assert_eq!(BetaSchedule::default().beta_at(5), 0.0);
        assert_eq!(BetaSchedule::constant(2.0).beta_at(9), 2.0);
        assert!(BetaSchedule::parse("5:1,3:2").is_err());
        assert!(BetaSchedule::parse("5").is_err());
    }
}
