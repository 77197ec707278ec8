//! Immutable weighted undirected graph.
//!
//! Each undirected edge is stored once with a fixed orientation
//! `tail -> head`; signed edge flows are measured relative to it.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use num_traits::{One, Zero};

use crate::numeric::{self, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub weight: Rational,
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    /// `adj[v]` lists `(neighbor, edge index)`.
    adj: Vec<Vec<(usize, usize)>>,
    weight_denom: i128,
}

impl Graph {
    /// Build and validate a graph. Rejects empty graphs, self-loops,
    /// duplicate undirected edges, non-positive weights and disconnected input.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge {idx} ({}, {}) references a vertex outside 0..{n}",
                    e.tail, e.head
                )));
            }
            if e.tail == e.head {
                return Err(Error::InvalidArgument(format!(
                    "self-loop at vertex {}",
                    e.tail
                )));
            }
            if e.weight <= Rational::zero() {
                return Err(Error::InvalidArgument(format!(
                    "edge {idx} has non-positive weight {}",
                    e.weight
                )));
            }
            let key = (e.tail.min(e.head), e.tail.max(e.head));
            if !seen.insert(key) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate edge between {} and {}",
                    key.0, key.1
                )));
            }
            adj[e.tail].push((e.head, idx));
            adj[e.head].push((e.tail, idx));
        }
        let weight_denom = numeric::common_denominator(edges.iter().map(|e| &e.weight))?;
        let g = Graph {
            n,
            edges,
            adj,
            weight_denom,
        };
        if let Some(v) = g.first_unreachable() {
            return Err(Error::UnreachableVertex { vertex: v });
        }
        Ok(g)
    }

    /// Convenience constructor for unit-weight edge lists.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(
            n,
            edges
                .iter()
                .map(|&(tail, head)| Edge {
                    tail,
                    head,
                    weight: Rational::one(),
                })
                .collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(w, _)| w)
    }

    /// Neighbors together with the index of the connecting edge.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Least common denominator of all edge weights.
    pub fn weight_denominator(&self) -> i128 {
        self.weight_denom
    }

    fn first_unreachable(&self) -> Option<usize> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().position(|&s| !s)
    }

    /// Whether the vertex set `members` induces a connected subgraph.
    /// The empty set counts as connected.
    pub fn induces_connected(&self, members: &[usize]) -> bool {
        let Some(&start) = members.first() else {
            return true;
        };
        let mut inside = vec![false; self.n];
        for &v in members {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if inside[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == members.len()
    }

    /// Integer edge weights after multiplying by `denom` (which must be a
    /// multiple of [`Graph::weight_denominator`]).
    pub(crate) fn scaled_weights(&self, denom: i128) -> Result<Vec<i64>> {
        let w: Vec<Rational> = self.edges.iter().map(|e| e.weight).collect();
        numeric::scale(&w, denom, "edge weights")
    }

    /// Exact all-pairs shortest-path distances (Dijkstra from every source
    /// on integer-scaled weights).
    pub fn shortest_path_matrix_exact(&self) -> Vec<Vec<Rational>> {
        let weights = self
            .scaled_weights(self.weight_denom)
            .expect("weights scale by their own common denominator");
        let denom = self.weight_denom;
        (0..self.n)
            .map(|s| {
                dijkstra(self, &weights, s)
                    .into_iter()
                    .map(|d| Rational::new(d as i128, denom))
                    .collect()
            })
            .collect()
    }

    /// All-pairs shortest-path distances as floats.
    pub fn shortest_path_matrix(&self) -> Vec<Vec<f64>> {
        self.shortest_path_matrix_exact()
            .iter()
            .map(|row| row.iter().map(numeric::to_f64).collect())
            .collect()
    }

    pub fn diameter_exact(&self) -> Rational {
        self.shortest_path_matrix_exact()
            .into_iter()
            .flatten()
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn diameter(&self) -> f64 {
        numeric::to_f64(&self.diameter_exact())
    }
}

fn dijkstra(g: &Graph, weights: &[i64], source: usize) -> Vec<i64> {
    let mut dist = vec![i64::MAX; g.n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0;
    heap.push(Reverse((0i64, source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, e) in &g.adj[v] {
            let nd = d + weights[e];
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Reverse((nd, w)));
            }
        }
    }
    dist
}

/// `rows x cols` 4-neighbor lattice with unit weights. Vertex `(r, c)` has id
/// `r * cols + c`.
pub fn grid_graph(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "grid dimensions must be positive, got {rows}x{cols}"
        )));
    }
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::unweighted(rows * cols, &edges)
}
