//! Lifting a component-level cost to a distance between partitions.
//!
//! The lifted distance is a minimum over doubly stochastic matrices; an
//! optimum is always attained at a permutation matrix, so it is computed
//! as a linear assignment problem with the Hungarian method.

use std::ops::{Add, Sub};

use num_traits::Zero;

use crate::baselines;
use crate::graph::Graph;
use crate::numeric::{self, Rational};
use crate::par;
use crate::partition::{MassDistribution, Partition};
use crate::transport;
use crate::{Error, Result};

/// Scalar types the assignment solver works over. Exact types
/// (e.g. [`Rational`]) give exact optima.
pub trait AssignmentCost:
    Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Zero
{
}

impl<T> AssignmentCost for T where T: Copy + PartialOrd + Add<Output = T> + Sub<Output = T> + Zero {}

/// Square `k x k` matrix of nonnegative pairing costs, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<T> {
    k: usize,
    costs: Vec<T>,
}

impl<T: AssignmentCost> CostMatrix<T> {
    pub fn new(k: usize, costs: Vec<T>) -> Result<Self> {
        if k == 0 || costs.len() != k * k {
            return Err(Error::InvalidArgument(format!(
                "cost matrix must be square and nonempty: {} entries for k = {k}",
                costs.len()
            )));
        }
        if costs
            .iter()
            .any(|c| c.partial_cmp(&T::zero()).is_none_or(|o| o.is_lt()))
        {
            return Err(Error::InvalidArgument(
                "cost matrix entries must be nonnegative".into(),
            ));
        }
        Ok(CostMatrix { k, costs })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidArgument("cost matrix is not square".into()));
        }
        Self::new(k, rows.into_iter().flatten().collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.costs[i * self.k + j]
    }
}

/// Component `i` of the first partition is paired with `permutation[i]` of
/// the second.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching<T> {
    pub permutation: Vec<usize>,
    pub value: T,
}

impl Matching<Rational> {
    pub fn value_f64(&self) -> f64 {
        numeric::to_f64(&self.value)
    }
}

/// Hungarian method with row/column potentials over an arbitrary
/// submatrix; returns the column chosen for each row in `rows`.
fn solve_sub<T: AssignmentCost>(c: &CostMatrix<T>, rows: &[usize], cols: &[usize]) -> Vec<usize> {
    let n = rows.len();
    debug_assert_eq!(n, cols.len());
    let cost = |i: usize, j: usize| c.get(rows[i - 1], cols[j - 1]);
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    // p[j]: row matched to column j (1-based, 0 = none)
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv: Vec<Option<T>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<T> = None;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if minv[j].is_none_or(|m| cur < m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let mj = minv[j].expect("set above");
                if delta.is_none_or(|d| mj < d) {
                    delta = Some(mj);
                    j1 = j;
                }
            }
            let delta = delta.expect("an unused column remains");
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else if let Some(m) = minv[j] {
                    minv[j] = Some(m - delta);
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        assign[p[j] - 1] = cols[j - 1];
    }
    assign
}

fn value_of<T: AssignmentCost>(c: &CostMatrix<T>, rows: &[usize], assign: &[usize]) -> T {
    rows.iter()
        .zip(assign)
        .fold(T::zero(), |acc, (&i, &j)| acc + c.get(i, j))
}

/// Minimum assignment value only.
pub fn assignment_value<T: AssignmentCost>(c: &CostMatrix<T>) -> T {
    let all: Vec<usize> = (0..c.k).collect();
    let assign = solve_sub(c, &all, &all);
    value_of(c, &all, &assign)
}

/// Minimum-cost perfect matching. Among optimal matchings the
/// lexicographically smallest permutation is returned whenever ties can be
/// certified exactly (always for exact scalar types).
pub fn hungarian<T: AssignmentCost>(c: &CostMatrix<T>) -> Matching<T> {
    let k = c.k;
    let all: Vec<usize> = (0..k).collect();
    let first = solve_sub(c, &all, &all);
    let best = value_of(c, &all, &first);

    let mut permutation = Vec::with_capacity(k);
    let mut free: Vec<usize> = all.clone();
    let mut fixed = T::zero();
    for i in 0..k {
        let rest_rows: Vec<usize> = (i + 1..k).collect();
        let pick = free.iter().position(|&j| {
            let cols: Vec<usize> = free.iter().copied().filter(|&x| x != j).collect();
            let sub = solve_sub(c, &rest_rows, &cols);
            fixed + c.get(i, j) + value_of(c, &rest_rows, &sub) == best
        });
        match pick {
            Some(pos) => {
                let j = free.remove(pos);
                fixed = fixed + c.get(i, j);
                permutation.push(j);
            }
            // inexact arithmetic could not reproduce the optimum; keep the solver's answer
            None => {
                return Matching {
                    permutation: first,
                    value: best,
                }
            }
        }
    }
    Matching {
        permutation,
        value: best,
    }
}

/// Which component-level cost to lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Balanced 1-Wasserstein distance.
    Transport,
    /// Unbalanced `p = 1` cost with penalty `lambda`.
    Unbalanced { lambda: Rational },
    /// Total variation `1/2 sum |x - y|`.
    L1,
    /// Number of vertices of the first component missing from the second.
    Hamming,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Transport => "transport",
            Metric::Unbalanced { .. } => "unbalanced",
            Metric::L1 => "l1",
            Metric::Hamming => "hamming",
        }
    }
}

/// A component together with its mass distribution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentMass {
    /// Sorted member vertices.
    pub members: Vec<usize>,
    pub mass: MassDistribution,
    pub balanced: bool,
}

pub fn component_masses(p: &Partition) -> Result<Vec<ComponentMass>> {
    (0..p.k())
        .map(|i| {
            Ok(ComponentMass {
                members: p.component(i).to_vec(),
                mass: p.component_distribution(i)?,
                balanced: p.representation().is_balanced(),
            })
        })
        .collect()
}

/// Cost of pairing two components under `metric`.
pub fn pair_cost(
    g: &Graph,
    a: &ComponentMass,
    b: &ComponentMass,
    metric: Metric,
) -> Result<Rational> {
    match metric {
        Metric::Transport => {
            if !a.balanced || !b.balanced {
                return Err(Error::UnbalancedInput {
                    left: a.mass.total(),
                    right: b.mass.total(),
                });
            }
            Ok(transport::w1_beckmann(g, &a.mass, &b.mass)?.objective)
        }
        Metric::Unbalanced { lambda } => {
            Ok(transport::unbalanced_cost(g, &a.mass, &b.mass, lambda)?.objective)
        }
        Metric::L1 => Ok(baselines::total_variation(&a.mass, &b.mass)),
        Metric::Hamming => Ok(Rational::from_integer(baselines::set_difference_size(
            &a.members, &b.members,
        ) as i128)),
    }
}

pub(crate) fn check_compatible(g: Option<&Graph>, x: &Partition, y: &Partition) -> Result<()> {
    if x.k() != y.k() {
        return Err(Error::InvalidArgument(format!(
            "partitions have different numbers of components ({} vs {})",
            x.k(),
            y.k()
        )));
    }
    if x.vertex_count() != y.vertex_count() {
        return Err(Error::InvalidArgument(
            "partitions cover different vertex sets".into(),
        ));
    }
    if let Some(g) = g {
        if g.vertex_count() != x.vertex_count() {
            return Err(Error::InvalidArgument(
                "partitions do not match the graph's vertex count".into(),
            ));
        }
    }
    Ok(())
}

/// The `k x k` matrix of component pairing costs, evaluated in parallel.
pub fn cost_matrix(
    g: &Graph,
    x: &Partition,
    y: &Partition,
    metric: Metric,
) -> Result<CostMatrix<Rational>> {
    check_compatible(Some(g), x, y)?;
    let k = x.k();
    let xs = component_masses(x)?;
    let ys = component_masses(y)?;
    let costs = par::map_indexed(k * k, |idx| {
        pair_cost(g, &xs[idx / k], &ys[idx % k], metric)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    CostMatrix::new(k, costs)
}

/// Lifted distance between two partitions: the best matching of their
/// components under the chosen component cost.
pub fn lifted_distance(
    g: &Graph,
    x: &Partition,
    y: &Partition,
    metric: Metric,
) -> Result<Matching<Rational>> {
    Ok(hungarian(&cost_matrix(g, x, y, metric)?))
}
