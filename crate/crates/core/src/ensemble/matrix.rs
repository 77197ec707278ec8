//! Pairwise lifted distances over an ensemble.

use std::collections::HashMap;

use num_traits::Zero;
use serde_json::json;

use crate::assignment::{
    self, assignment_value, component_masses, pair_cost, ComponentMass, CostMatrix, Metric,
};
use crate::graph::Graph;
use crate::numeric::{self, Rational};
use crate::par;
use crate::partition::Partition;
use crate::{Error, Result};

/// Symmetric `n x n` matrix with zero diagonal. Matrices computed by
/// [`pairwise_matrix`] also carry the exact entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
    exact: Option<Vec<Rational>>,
}

impl DistanceMatrix {
    /// Validate a float matrix given row-major.
    pub fn from_f64(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "expected a nonempty {n}x{n} matrix, got {} entries",
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::InvalidArgument(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let a = entries[i * n + j];
                let b = entries[j * n + i];
                if !a.is_finite() || a < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) = {a} is not a finite nonnegative number"
                    )));
                }
                if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix {
            n,
            entries,
            exact: None,
        })
    }

    fn from_exact(n: usize, exact: Vec<Rational>) -> Self {
        DistanceMatrix {
            n,
            entries: exact.iter().map(numeric::to_f64).collect(),
            exact: Some(exact),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn get_exact(&self, i: usize, j: usize) -> Option<Rational> {
        self.exact.as_ref().map(|e| e[i * self.n + j])
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// All off-diagonal pairs `(i, j)`, `i < j`, attaining the maximum
    /// entry (compared exactly when exact entries are present).
    pub fn argmax_pairs(&self) -> Vec<(usize, usize)> {
        let pairs = (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j)));
        let mut best: Vec<(usize, usize)> = Vec::new();
        match &self.exact {
            Some(exact) => {
                let mut top = Rational::zero();
                for (i, j) in pairs {
                    let d = exact[i * self.n + j];
                    if best.is_empty() || d > top {
                        top = d;
                        best = vec![(i, j)];
                    } else if d == top {
                        best.push((i, j));
                    }
                }
            }
            None => {
                let mut top = f64::NEG_INFINITY;
                for (i, j) in pairs {
                    let d = self.get(i, j);
                    if d > top {
                        top = d;
                        best = vec![(i, j)];
                    } else if d == top {
                        best.push((i, j));
                    }
                }
            }
        }
        best
    }

    /// Headerless CSV, one row per line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|d| d.to_string()).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows: Vec<Vec<f64>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::Parse(format!("bad matrix entry {c:?}")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("matrix CSV is not square".into()));
        }
        Self::from_f64(n, rows.into_iter().flatten().collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "n": self.n, "d": self.entries })
    }
}

/// Interned components of an ensemble: `ids[p][i]` indexes `unique`.
struct ComponentTable {
    unique: Vec<ComponentMass>,
    ids: Vec<Vec<usize>>,
}

fn intern(ensemble: &[Partition]) -> Result<ComponentTable> {
    let mut index: HashMap<ComponentMass, usize> = HashMap::new();
    let mut unique = Vec::new();
    let mut ids = Vec::with_capacity(ensemble.len());
    for p in ensemble {
        let row = component_masses(p)?
            .into_iter()
            .map(|c| {
                *index.entry(c.clone()).or_insert_with(|| {
                    unique.push(c);
                    unique.len() - 1
                })
            })
            .collect();
        ids.push(row);
    }
    Ok(ComponentTable { unique, ids })
}

fn symmetric(metric: Metric) -> bool {
    !matches!(metric, Metric::Hamming)
}

/// Lifted distances between all pairs of an ensemble, using the global
/// thread pool. See [`pairwise_matrix_with_workers`].
pub fn pairwise_matrix(
    g: &Graph,
    ensemble: &[Partition],
    metric: Metric,
) -> Result<DistanceMatrix> {
    pairwise_matrix_with_workers(g, ensemble, metric, None)
}

/// Lifted distances between all pairs of an ensemble.
///
/// Component pairing costs are computed once per distinct pair of
/// components, then one assignment problem is solved per pair of
/// partitions. Both stages are spread over `workers` threads (`None` for
/// the global pool); the result does not depend on the worker count.
pub fn pairwise_matrix_with_workers(
    g: &Graph,
    ensemble: &[Partition],
    metric: Metric,
    workers: Option<usize>,
) -> Result<DistanceMatrix> {
    let first = ensemble
        .first()
        .ok_or_else(|| Error::InvalidArgument("ensemble is empty".into()))?;
    for p in ensemble {
        assignment::check_compatible(Some(g), first, p)?;
    }
    let n = ensemble.len();
    let k = first.k();
    let table = intern(ensemble)?;
    let sym = symmetric(metric);
    let key = |a: usize, b: usize| if sym && b < a { (b, a) } else { (a, b) };

    let mut needed: Vec<(usize, usize)> = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            for &a in &table.ids[p] {
                for &b in &table.ids[q] {
                    if a != b {
                        needed.push(key(a, b));
                    }
                }
            }
        }
    }
    needed.sort_unstable();
    needed.dedup();

    par::with_workers(workers, || {
        let costs = par::map_indexed(needed.len(), |idx| {
            let (a, b) = needed[idx];
            pair_cost(g, &table.unique[a], &table.unique[b], metric)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let cache: HashMap<(usize, usize), Rational> = needed.iter().copied().zip(costs).collect();
        let lookup = |a: usize, b: usize| {
            if a == b {
                Rational::zero()
            } else {
                cache[&key(a, b)]
            }
        };

        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .collect();
        let values = par::map_indexed(pairs.len(), |idx| {
            let (p, q) = pairs[idx];
            let mut c = Vec::with_capacity(k * k);
            for &a in &table.ids[p] {
                for &b in &table.ids[q] {
                    c.push(lookup(a, b));
                }
            }
            CostMatrix::new(k, c).map(|m| assignment_value(&m))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

        let mut exact = vec![Rational::zero(); n * n];
        for (&(p, q), v) in pairs.iter().zip(values) {
            exact[p * n + q] = v;
            exact[q * n + p] = v;
        }
        Ok(DistanceMatrix::from_exact(n, exact))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::lifted_distance;
    use crate::ensemble::enumerate_grid_partitions;
    use crate::graph::grid_graph;
    use crate::numeric::int;
    use crate::partition::Representation;

    #[test]
    fn singleton_ensemble() {
        let g = grid_graph(2, 2).unwrap();
        let p = Partition::from_labels(&g, &[0, 0, 1, 1], 2).unwrap();
        let d = pairwise_matrix(&g, &[p], Metric::Transport).unwrap();
        assert_eq!(d.n(), 1);
        assert_eq!(d.to_csv(), "0\n");
    }

    #[test]
    fn matches_direct_lifted_distances() {
        let g = grid_graph(3, 3).unwrap();
        let ens: Vec<Partition> = enumerate_grid_partitions(3, 3, 3, 1, 5, true)
            .unwrap()
            .into_iter()
            .step_by(17)
            .map(|p| {
                p.with_representation(Representation::Unbalanced, None)
                    .unwrap()
            })
            .collect();
        for metric in [
            Metric::Unbalanced {
                lambda: Rational::new(1, 2),
            },
            Metric::Hamming,
            Metric::L1,
        ] {
            let d = pairwise_matrix(&g, &ens, metric).unwrap();
            for i in 0..ens.len() {
                for j in 0..ens.len() {
                    let direct = lifted_distance(&g, &ens[i], &ens[j], metric).unwrap().value;
                    assert_eq!(d.get_exact(i, j).unwrap(), direct);
                }
            }
        }
    }

    #[test]
    fn duplicates_give_identical_rows() {
        let g = grid_graph(3, 3).unwrap();
        let mut ens = enumerate_grid_partitions(3, 3, 3, 3, 3, true).unwrap();
        ens.push(ens[2].clone());
        let d = pairwise_matrix(&g, &ens, Metric::Transport).unwrap();
        let last = ens.len() - 1;
        assert_eq!(d.get(2, last), 0.0);
        for j in 0..last {
            assert_eq!(d.get(2, j), d.get(last, j));
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let g = grid_graph(3, 3).unwrap();
        let ens = enumerate_grid_partitions(3, 3, 3, 3, 3, true).unwrap();
        let one = pairwise_matrix_with_workers(&g, &ens, Metric::Transport, Some(1)).unwrap();
        let many = pairwise_matrix_with_workers(&g, &ens, Metric::Transport, Some(4)).unwrap();
        assert_eq!(one.to_csv(), many.to_csv());
        assert_eq!(one, many);
    }

    #[test]
    fn csv_round_trip_and_validation() {
        let g = grid_graph(3, 3).unwrap();
        let ens = enumerate_grid_partitions(3, 3, 3, 3, 3, true).unwrap();
        let d = pairwise_matrix(&g, &ens, Metric::L1).unwrap();
        let back = DistanceMatrix::from_csv(&d.to_csv()).unwrap();
        assert_eq!(back.entries(), d.entries());
        assert!(DistanceMatrix::from_csv("0,1\n2,0\n").is_err());
        assert!(DistanceMatrix::from_csv("1\n").is_err());
        assert!(DistanceMatrix::from_csv("0,-1\n-1,0\n").is_err());
        assert!(DistanceMatrix::from_csv("0,1\n").is_err());
        let json = d.to_json();
        assert_eq!(json["n"], 10);
        assert_eq!(json["d"].as_array().unwrap().len(), 100);
    }

    #[test]
    fn argmax_reports_ties() {
        let d =
            DistanceMatrix::from_f64(3, vec![0.0, 2.0, 2.0, 2.0, 0.0, 1.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.argmax_pairs(), vec![(0, 1), (0, 2)]);
        let g = grid_graph(2, 2).unwrap();
        let a = Partition::from_labels(&g, &[0, 1, 0, 1], 2).unwrap();
        let b = Partition::from_labels(&g, &[0, 0, 1, 1], 2).unwrap();
        let m = pairwise_matrix(&g, &[a, b], Metric::Transport).unwrap();
        assert_eq!(m.get_exact(0, 1), Some(int(2)));
        assert_eq!(m.argmax_pairs(), vec![(0, 1)]);
    }
}
