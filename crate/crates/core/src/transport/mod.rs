//! Component-level transport costs.
//!
//! [`w1_beckmann`] computes the balanced 1-Wasserstein distance as an
//! uncapacitated min-cost flow: minimize `sum_e w(e)|J_e|` subject to
//! `P^T J = y - x`, where `P` is the signed incidence matrix.
//!
//! [`unbalanced_cost`] relaxes the constraint to `P^T J = y - x + z` and
//! charges `lambda * ||z||_1`. It is solved exactly by attaching one extra
//! sink vertex to every vertex with an edge of weight `lambda` and routing
//! the mass imbalance through it.
//!
//! [`kantorovich_oracle`] solves the same problems in coupling form over
//! shortest-path distances; it is slower and exists to cross-check the
//! flow solvers.

mod oracle;

pub use oracle::{
    flow_from_plan, kantorovich_oracle, kantorovich_oracle_with_sink, sink_distances, TransportPlan,
};

use num_traits::{Signed, Zero};
use serde_json::json;

use crate::flow;
use crate::graph::Graph;
use crate::numeric::{self, Rational};
use crate::partition::MassDistribution;
use crate::{Error, Result};

/// Optimal signed edge flow `J`, optional vertex slack `z` and objective.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    pub objective: Rational,
    /// Signed flow per edge, positive in the stored `tail -> head` direction.
    pub edge_flows: Vec<Rational>,
    pub vertex_slack: Option<Vec<Rational>>,
    pub lambda: Option<Rational>,
}

impl FlowSolution {
    pub fn objective_f64(&self) -> f64 {
        numeric::to_f64(&self.objective)
    }

    /// `||z||_1`, zero for balanced solutions.
    pub fn slack_l1(&self) -> Rational {
        self.vertex_slack
            .as_deref()
            .map_or_else(Rational::zero, numeric::l1_norm)
    }

    /// `sum_e w(e)|J_e| + lambda ||z||_1` recomputed from the stored flows.
    pub fn recomputed_objective(&self, g: &Graph) -> Rational {
        let edges: Rational = g
            .edges()
            .iter()
            .zip(&self.edge_flows)
            .map(|(e, j)| e.weight * j.abs())
            .sum();
        edges + self.lambda.unwrap_or_else(Rational::zero) * self.slack_l1()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let floats = |v: &[Rational]| v.iter().map(numeric::to_f64).collect::<Vec<_>>();
        json!({
            "objective": self.objective_f64(),
            "flows": floats(&self.edge_flows),
            "slack": self.vertex_slack.as_deref().map(floats),
        })
    }
}

/// `(P^T J)(v)`: net flow into each vertex.
pub fn divergence(g: &Graph, flows: &[Rational]) -> Vec<Rational> {
    let mut div = vec![Rational::zero(); g.vertex_count()];
    for (e, j) in g.edges().iter().zip(flows) {
        div[e.head] += j;
        div[e.tail] -= j;
    }
    div
}

fn check_lengths(g: &Graph, x: &MassDistribution, y: &MassDistribution) -> Result<()> {
    let n = g.vertex_count();
    if x.len() != n || y.len() != n {
        return Err(Error::InvalidArgument(format!(
            "distributions of length {} and {} on a graph with {n} vertices",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn mass_denominator(x: &MassDistribution, y: &MassDistribution) -> Result<i128> {
    numeric::common_denominator(&[
        Rational::new(1, x.denominator()),
        Rational::new(1, y.denominator()),
    ])
}

/// Integer supplies `(x - y) * denom` per vertex.
fn scaled_supply(x: &MassDistribution, y: &MassDistribution, denom: i128) -> Result<Vec<i64>> {
    let diff: Vec<Rational> = (0..x.len()).map(|v| x.get(v) - y.get(v)).collect();
    numeric::scale(&diff, denom, "masses")
}

/// Balanced 1-Wasserstein distance between equal-mass distributions.
pub fn w1_beckmann(g: &Graph, x: &MassDistribution, y: &MassDistribution) -> Result<FlowSolution> {
    check_lengths(g, x, y)?;
    if x.total() != y.total() {
        return Err(Error::UnbalancedInput {
            left: x.total(),
            right: y.total(),
        });
    }
    let mass_denom = mass_denominator(x, y)?;
    let cost_denom = g.weight_denominator();
    let costs = g.scaled_weights(cost_denom)?;
    let edges: Vec<(usize, usize, i64)> = g
        .edges()
        .iter()
        .zip(&costs)
        .map(|(e, &c)| (e.tail, e.head, c))
        .collect();
    let supply = scaled_supply(x, y, mass_denom)?;
    let (net, cost) = flow::transshipment(g.vertex_count(), &edges, &supply)?;
    Ok(FlowSolution {
        objective: Rational::new(cost, cost_denom * mass_denom),
        edge_flows: net
            .into_iter()
            .map(|f| Rational::new(f as i128, mass_denom))
            .collect(),
        vertex_slack: None,
        lambda: None,
    })
}

/// Unbalanced transport cost with `p = 1`: mass may be created or destroyed
/// at any vertex at price `lambda` per unit.
pub fn unbalanced_cost(
    g: &Graph,
    x: &MassDistribution,
    y: &MassDistribution,
    lambda: Rational,
) -> Result<FlowSolution> {
    check_lengths(g, x, y)?;
    if lambda < Rational::zero() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let n = g.vertex_count();
    let sink = n;
    let mass_denom = mass_denominator(x, y)?;
    let cost_denom =
        numeric::common_denominator(&[Rational::new(1, g.weight_denominator()), lambda])?;
    let costs = g.scaled_weights(cost_denom)?;
    let lambda_cost = numeric::scale_one(&lambda, cost_denom, "lambda")?;

    let mut edges: Vec<(usize, usize, i64)> = g
        .edges()
        .iter()
        .zip(&costs)
        .map(|(e, &c)| (e.tail, e.head, c))
        .collect();
    edges.extend((0..n).map(|v| (v, sink, lambda_cost)));

    let mut supply = scaled_supply(x, y, mass_denom)?;
    supply.push(numeric::scale_one(
        &(y.total() - x.total()),
        mass_denom,
        "masses",
    )?);

    let (net, cost) = flow::transshipment(n + 1, &edges, &supply)?;
    let to_rational = |f: i64| Rational::new(f as i128, mass_denom);
    let m = g.edge_count();
    let solution = FlowSolution {
        objective: Rational::new(cost, cost_denom * mass_denom),
        edge_flows: net[..m].iter().copied().map(to_rational).collect(),
        // net flow on (v, sink) is pi(v, sink) - pi(sink, v) with the overlap cancelled
        vertex_slack: Some(net[m..].iter().copied().map(to_rational).collect()),
        lambda: Some(lambda),
    };
    debug_assert_eq!(solution.recomputed_objective(g), solution.objective);
    Ok(solution)
}
