//! Coupling-form transport over shortest-path distances.
//!
//! The transportation problem between the supports is solved with its own
//! successive-shortest-path routine using Bellman-Ford label correction on
//! a dense bipartite residual network. It shares no code with the edge-flow
//! solver it is meant to check.

use std::collections::VecDeque;

use num_traits::Zero;

use super::FlowSolution;
use crate::graph::Graph;
use crate::numeric::{self, Rational};
use crate::partition::MassDistribution;
use crate::{Error, Result};

/// `(from, to, mass)`.
pub type PlanEntry = (usize, usize, Rational);

/// Sparse coupling `pi(v, w)`. When `sink` is set, index `sink` stands for
/// the auxiliary vertex and marginals are only constrained on the others.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub entries: Vec<PlanEntry>,
    pub sink: Option<usize>,
}

impl TransportPlan {
    /// Mass leaving each of the first `n` vertices.
    pub fn row_marginal(&self, n: usize) -> Vec<Rational> {
        let mut m = vec![Rational::zero(); n];
        for &(v, _, p) in &self.entries {
            if v < n {
                m[v] += p;
            }
        }
        m
    }

    /// Mass arriving at each of the first `n` vertices.
    pub fn column_marginal(&self, n: usize) -> Vec<Rational> {
        let mut m = vec![Rational::zero(); n];
        for &(_, w, p) in &self.entries {
            if w < n {
                m[w] += p;
            }
        }
        m
    }

    pub fn cost(&self, dist: &[Vec<Rational>]) -> Rational {
        self.entries.iter().map(|&(v, w, p)| dist[v][w] * p).sum()
    }
}

/// Exact transportation problem on integer supplies, demands and costs.
fn transportation(supply: &[i64], demand: &[i64], cost: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let m = supply.len();
    let n = demand.len();
    let mut left = supply.to_vec();
    let mut need = demand.to_vec();
    let mut plan = vec![vec![0i64; n]; m];
    // label-correcting shortest paths; sources are 0..m, sinks m..m+n
    let mut dist = vec![i128::MAX; m + n];
    let mut pred = vec![usize::MAX; m + n];
    let mut queued = vec![false; m + n];
    loop {
        dist.fill(i128::MAX);
        pred.fill(usize::MAX);
        let mut queue = VecDeque::new();
        for i in 0..m {
            if left[i] > 0 {
                dist[i] = 0;
                queue.push_back(i);
                queued[i] = true;
            }
        }
        if queue.is_empty() {
            break;
        }
        while let Some(u) = queue.pop_front() {
            queued[u] = false;
            let du = dist[u];
            if u < m {
                for j in 0..n {
                    let nd = du + cost[u][j] as i128;
                    if nd < dist[m + j] {
                        dist[m + j] = nd;
                        pred[m + j] = u;
                        if !queued[m + j] {
                            queued[m + j] = true;
                            queue.push_back(m + j);
                        }
                    }
                }
            } else {
                let j = u - m;
                for i in 0..m {
                    if plan[i][j] > 0 {
                        let nd = du - cost[i][j] as i128;
                        if nd < dist[i] {
                            dist[i] = nd;
                            pred[i] = u;
                            if !queued[i] {
                                queued[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                }
            }
        }
        let Some(target) = (0..n)
            .filter(|&j| need[j] > 0 && dist[m + j] != i128::MAX)
            .min_by_key(|&j| dist[m + j])
        else {
            break;
        };
        // walk back to the originating source collecting the bottleneck
        let mut push = need[target];
        let mut u = m + target;
        loop {
            let p = pred[u];
            if p == usize::MAX {
                push = push.min(left[u]);
                break;
            }
            if u < m {
                push = push.min(plan[u][p - m]);
            }
            u = p;
        }
        let mut u = m + target;
        loop {
            let p = pred[u];
            if p == usize::MAX {
                left[u] -= push;
                break;
            }
            if u >= m {
                plan[p][u - m] += push;
            } else {
                plan[u][p - m] -= push;
            }
            u = p;
        }
        need[target] -= push;
    }
    plan
}

fn scaled_plan(
    rows: &[usize],
    cols: &[usize],
    plan: &[Vec<i64>],
    mass_denom: i128,
) -> Vec<PlanEntry> {
    let mut entries = Vec::new();
    for (a, &v) in rows.iter().enumerate() {
        for (b, &w) in cols.iter().enumerate() {
            if plan[a][b] > 0 {
                entries.push((v, w, Rational::new(plan[a][b] as i128, mass_denom)));
            }
        }
    }
    entries
}

fn solve_coupling(
    dist: &[Vec<Rational>],
    rows: &[usize],
    row_mass: &[Rational],
    cols: &[usize],
    col_mass: &[Rational],
) -> Result<(Rational, Vec<PlanEntry>)> {
    let mass_denom = numeric::common_denominator(row_mass.iter().chain(col_mass))?;
    let cost_denom = numeric::common_denominator(
        rows.iter()
            .flat_map(|&v| cols.iter().map(move |&w| &dist[v][w])),
    )?;
    let supply = numeric::scale(row_mass, mass_denom, "masses")?;
    let demand = numeric::scale(col_mass, mass_denom, "masses")?;
    let cost = rows
        .iter()
        .map(|&v| {
            let row: Vec<Rational> = cols.iter().map(|&w| dist[v][w]).collect();
            numeric::scale(&row, cost_denom, "distances")
        })
        .collect::<Result<Vec<_>>>()?;
    let plan = transportation(&supply, &demand, &cost);
    let entries = scaled_plan(rows, cols, &plan, mass_denom);
    let objective = entries.iter().map(|&(v, w, p)| dist[v][w] * p).sum();
    Ok((objective, entries))
}

/// Balanced transport as an exact coupling over supports with shortest-path
/// costs. Intended for small instances.
pub fn kantorovich_oracle(
    g: &Graph,
    x: &MassDistribution,
    y: &MassDistribution,
) -> Result<(Rational, TransportPlan)> {
    let n = g.vertex_count();
    if x.len() != n || y.len() != n {
        return Err(Error::InvalidArgument(
            "distribution length mismatch".into(),
        ));
    }
    if x.total() != y.total() {
        return Err(Error::UnbalancedInput {
            left: x.total(),
            right: y.total(),
        });
    }
    let dist = g.shortest_path_matrix_exact();
    let rows = x.support();
    let cols = y.support();
    let rm: Vec<Rational> = rows.iter().map(|&v| x.get(v)).collect();
    let cm: Vec<Rational> = cols.iter().map(|&w| y.get(w)).collect();
    let (objective, entries) = solve_coupling(&dist, &rows, &rm, &cols, &cm)?;
    Ok((
        objective,
        TransportPlan {
            entries,
            sink: None,
        },
    ))
}

/// Shortest-path distances on the graph extended by a sink joined to every
/// vertex at weight `lambda`; the sink has index `n`.
pub fn sink_distances(g: &Graph, lambda: Rational) -> Vec<Vec<Rational>> {
    let n = g.vertex_count();
    let base = g.shortest_path_matrix_exact();
    let mut d = vec![vec![Rational::zero(); n + 1]; n + 1];
    for v in 0..n {
        d[v][..n].copy_from_slice(&base[v]);
        d[v][n] = lambda;
        d[n][v] = lambda;
    }
    for k in 0..=n {
        for i in 0..=n {
            for j in 0..=n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Coupling on the sink-augmented vertex set with marginals enforced only on
/// the original vertices. Its optimum equals [`super::unbalanced_cost`].
pub fn kantorovich_oracle_with_sink(
    g: &Graph,
    x: &MassDistribution,
    y: &MassDistribution,
    lambda: Rational,
) -> Result<(Rational, TransportPlan)> {
    let n = g.vertex_count();
    if x.len() != n || y.len() != n {
        return Err(Error::InvalidArgument(
            "distribution length mismatch".into(),
        ));
    }
    if lambda < Rational::zero() {
        return Err(Error::InvalidArgument("lambda must be nonnegative".into()));
    }
    let dist = sink_distances(g, lambda);
    // the sink can emit everything y needs and absorb everything x has; the
    // sink-to-sink cell soaks up whatever it does not use, at zero cost
    let mut rows = x.support();
    let mut rm: Vec<Rational> = rows.iter().map(|&v| x.get(v)).collect();
    rows.push(n);
    rm.push(y.total());
    let mut cols = y.support();
    let mut cm: Vec<Rational> = cols.iter().map(|&w| y.get(w)).collect();
    cols.push(n);
    cm.push(x.total());
    let (objective, entries) = solve_coupling(&dist, &rows, &rm, &cols, &cm)?;
    let entries = entries
        .into_iter()
        .filter(|&(v, w, _)| !(v == n && w == n))
        .collect();
    Ok((
        objective,
        TransportPlan {
            entries,
            sink: Some(n),
        },
    ))
}

/// Turn a plan into an edge flow by spreading each `pi(v, w)` along one
/// shortest path (through the sink when that is shorter), and read the
/// slack off as `z(v) = pi(v, sink) - pi(sink, v)`.
pub fn flow_from_plan(g: &Graph, plan: &TransportPlan, lambda: Option<Rational>) -> FlowSolution {
    let n = g.vertex_count();
    let base = g.shortest_path_matrix_exact();
    let lam = lambda.unwrap_or_else(Rational::zero);
    let mut flows = vec![Rational::zero(); g.edge_count()];
    let mut slack = vec![Rational::zero(); n];
    let route = |v: usize, w: usize, mass: Rational, flows: &mut [Rational]| {
        // walk back from w towards v along tight edges
        let mut u = w;
        while u != v {
            let &(p, e) = g
                .incident(u)
                .iter()
                .find(|&&(p, e)| base[v][p] + g.edges()[e].weight == base[v][u])
                .expect("a tight predecessor exists on a shortest path");
            if g.edges()[e].tail == p {
                flows[e] += mass;
            } else {
                flows[e] -= mass;
            }
            u = p;
        }
    };
    for &(v, w, mass) in &plan.entries {
        match (v < n, w < n) {
            (true, true) => {
                if plan.sink.is_some() && base[v][w] > lam + lam {
                    slack[v] += mass;
                    slack[w] -= mass;
                } else {
                    route(v, w, mass, &mut flows);
                }
            }
            (true, false) => slack[v] += mass,
            (false, true) => slack[w] -= mass,
            (false, false) => {}
        }
    }
    let mut solution = FlowSolution {
        objective: Rational::zero(),
        edge_flows: flows,
        vertex_slack: plan.sink.map(|_| slack),
        lambda: plan.sink.map(|_| lam),
    };
    solution.objective = solution.recomputed_objective(g);
    solution
}
