//! Integer min-cost flow by successive shortest paths with Johnson
//! potentials (Dijkstra on reduced costs).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::{Error, Result};

pub(crate) const INF_CAP: i64 = i64::MAX / 4;

#[derive(Debug, Clone)]
pub(crate) struct MinCostFlow {
    head: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    out: Vec<Vec<usize>>,
}

impl MinCostFlow {
    pub fn new(n: usize) -> Self {
        MinCostFlow {
            head: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            out: vec![Vec::new(); n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    /// Add arc `from -> to`; returns its id. The paired residual arc is `id ^ 1`.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        debug_assert!(cost >= 0, "initial potentials assume nonnegative costs");
        let id = self.head.len();
        self.head.push(to);
        self.cap.push(cap);
        self.cost.push(cost);
        self.out[from].push(id);
        self.head.push(from);
        self.cap.push(0);
        self.cost.push(-cost);
        self.out[to].push(id + 1);
        id
    }

    /// Flow currently carried by arc `id`.
    pub fn flow_on(&self, id: usize) -> i64 {
        self.cap[id ^ 1]
    }

    /// Push up to `limit` units from `s` to `t` at minimum cost.
    /// Returns `(flow, cost)`.
    pub fn run(&mut self, s: usize, t: usize, limit: i64) -> (i64, i128) {
        let n = self.node_count();
        let mut potential = vec![0i128; n];
        let mut flow = 0i64;
        let mut total = 0i128;
        let mut dist = vec![i128::MAX; n];
        let mut prev_arc = vec![usize::MAX; n];
        while flow < limit {
            dist.fill(i128::MAX);
            prev_arc.fill(usize::MAX);
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i128, s)));
            while let Some(Reverse((d, v))) = heap.pop() {
                if d > dist[v] {
                    continue;
                }
                for &a in &self.out[v] {
                    if self.cap[a] == 0 {
                        continue;
                    }
                    let w = self.head[a];
                    let nd = d + self.cost[a] as i128 + potential[v] - potential[w];
                    if nd < dist[w] {
                        dist[w] = nd;
                        prev_arc[w] = a;
                        heap.push(Reverse((nd, w)));
                    }
                }
            }
            if dist[t] == i128::MAX {
                break;
            }
            for v in 0..n {
                if dist[v] != i128::MAX {
                    potential[v] += dist[v];
                }
            }
            let mut push = limit - flow;
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                push = push.min(self.cap[a]);
                v = self.head[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                self.cap[a] -= push;
                self.cap[a ^ 1] += push;
                total += push as i128 * self.cost[a] as i128;
                v = self.head[a ^ 1];
            }
            flow += push;
        }
        (flow, total)
    }
}

/// Optimal uncapacitated transshipment on an undirected graph.
///
/// `edges[e] = (tail, head, cost)`; `supply[v] > 0` is mass leaving `v`,
/// `supply[v] < 0` mass arriving. Supplies must sum to zero and the graph
/// must be connected. Returns the signed net flow on each edge (positive in
/// the `tail -> head` direction) and the total cost.
pub(crate) fn transshipment(
    n: usize,
    edges: &[(usize, usize, i64)],
    supply: &[i64],
) -> Result<(Vec<i64>, i128)> {
    debug_assert_eq!(supply.len(), n);
    if supply.iter().map(|&s| s as i128).sum::<i128>() != 0 {
        return Err(Error::InvalidArgument("supplies do not balance".into()));
    }
    let source = n;
    let sink = n + 1;
    let mut mcf = MinCostFlow::new(n + 2);
    let arcs: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(u, v, c)| (mcf.add_arc(u, v, INF_CAP, c), mcf.add_arc(v, u, INF_CAP, c)))
        .collect();
    let mut required = 0i64;
    for (v, &b) in supply.iter().enumerate() {
        if b > 0 {
            mcf.add_arc(source, v, b, 0);
            required += b;
        } else if b < 0 {
            mcf.add_arc(v, sink, -b, 0);
        }
    }
    let (pushed, cost) = mcf.run(source, sink, required);
    if pushed != required {
        return Err(Error::InvalidArgument(
            "demand cannot be met; is the graph connected?".into(),
        ));
    }
    let net = arcs
        .iter()
        .map(|&(fwd, bwd)| mcf.flow_on(fwd) - mcf.flow_on(bwd))
        .collect();
    Ok((net, cost))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_transport() {
        // 0 - 1 - 2 with costs 2 and 3
        let (flow, cost) = transshipment(3, &[(0, 1, 2), (1, 2, 3)], &[4, 0, -4]).unwrap();
        assert_eq!(flow, vec![4, 4]);
        assert_eq!(cost, 20);
    }

    #[test]
    fn flow_against_orientation_is_negative() {
        let (flow, cost) = transshipment(2, &[(0, 1, 1)], &[-3, 3]).unwrap();
        assert_eq!(flow, vec![-3]);
        assert_eq!(cost, 3);
    }

    #[test]
    fn picks_cheaper_route() {
        // square 0-1-2-3-0, expensive edge 0-1
        let edges = [(0, 1, 10), (1, 2, 1), (2, 3, 1), (3, 0, 1)];
        let (_, cost) = transshipment(4, &edges, &[1, -1, 0, 0]).unwrap();
        assert_eq!(cost, 3);
    }

    #[test]
    fn rejects_unbalanced_and_disconnected() {
        assert!(transshipment(2, &[(0, 1, 1)], &[1, 0]).is_err());
        assert!(transshipment(3, &[(0, 1, 1)], &[1, 0, -1]).is_err());
    }

    #[test]
    fn zero_supply_is_free() {
        let (flow, cost) = transshipment(2, &[(0, 1, 5)], &[0, 0]).unwrap();
        assert_eq!((flow, cost), (vec![0], 0));
    }
}
