//! Exhaustive enumeration of partitions with size bounds.
//!
//! Vertices are assigned in id order. Labels are handed out in order of
//! first use, so every partition is produced exactly once with components
//! ordered by their minimum vertex. In connected mode a vertex "retires"
//! once all of its neighbors are assigned; when the last frontier vertex of
//! a same-label piece retires, that piece can no longer grow and must be
//! the whole component.

use crate::graph::{grid_graph, Graph};
use crate::partition::Partition;
use crate::{Error, Result};

struct Search<'a> {
    g: &'a Graph,
    n: usize,
    k: usize,
    min_size: usize,
    max_size: usize,
    connected: bool,
    /// `retire[step]`: vertices whose last neighbor is assigned at `step`.
    retire: Vec<Vec<usize>>,
    /// step after which a vertex has no unassigned neighbor
    retire_step: Vec<usize>,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    closed: Vec<bool>,
    used: usize,
    out: Vec<Vec<usize>>,
    seen: Vec<usize>,
    stamp: usize,
    stack: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, k: usize, min_size: usize, max_size: usize, connected: bool) -> Self {
        let n = g.vertex_count();
        let retire_step: Vec<usize> = (0..n).map(|v| g.neighbors(v).fold(v, usize::max)).collect();
        let mut retire = vec![Vec::new(); n];
        for (v, &s) in retire_step.iter().enumerate() {
            retire[s].push(v);
        }
        Search {
            g,
            n,
            k,
            min_size,
            max_size,
            connected,
            retire,
            retire_step,
            labels: vec![usize::MAX; n],
            sizes: vec![0; k],
            closed: vec![false; k],
            used: 0,
            out: Vec::new(),
            seen: vec![0; n],
            stamp: 0,
            stack: Vec::new(),
        }
    }

    /// Size bounds can still be met by the `remaining` unassigned vertices.
    fn sizes_feasible(&self, remaining: usize) -> bool {
        let fresh = self.k - self.used;
        let mut deficit = fresh * self.min_size;
        let mut room = fresh * self.max_size;
        for c in 0..self.used {
            if self.closed[c] {
                if self.sizes[c] < self.min_size {
                    return false;
                }
            } else {
                deficit += self.min_size.saturating_sub(self.sizes[c]);
                room += self.max_size - self.sizes[c];
            }
        }
        deficit <= remaining && remaining <= room
    }

    /// Examine the pieces retiring after vertex `step` was assigned. Returns
    /// the labels newly closed, or `None` if a component got split for good.
    fn close_pieces(&mut self, step: usize) -> Option<Vec<usize>> {
        let mut newly = Vec::new();
        for idx in 0..self.retire[step].len() {
            let start = self.retire[step][idx];
            let label = self.labels[start];
            if self.closed[label] {
                // a closed label never gains vertices, so this piece was already checked
                continue;
            }
            self.stamp += 1;
            let stamp = self.stamp;
            self.seen[start] = stamp;
            self.stack.clear();
            self.stack.push(start);
            let mut piece = 1;
            let mut open = false;
            while let Some(v) = self.stack.pop() {
                if self.retire_step[v] > step {
                    open = true;
                    break;
                }
                for w in self.g.neighbors(v) {
                    if w <= step && self.labels[w] == label && self.seen[w] != stamp {
                        self.seen[w] = stamp;
                        piece += 1;
                        self.stack.push(w);
                    }
                }
            }
            if open {
                continue;
            }
            if piece != self.sizes[label] {
                for &c in &newly {
                    self.closed[c] = false;
                }
                return None;
            }
            self.closed[label] = true;
            newly.push(label);
        }
        Some(newly)
    }

    fn assign(&mut self, v: usize, label: usize) {
        self.labels[v] = label;
        self.sizes[label] += 1;
        if label == self.used {
            self.used += 1;
        }
    }

    fn unassign(&mut self, v: usize, label: usize) {
        self.labels[v] = usize::MAX;
        self.sizes[label] -= 1;
        if self.sizes[label] == 0 {
            self.used -= 1;
        }
    }

    fn run(&mut self, v: usize) {
        if v == self.n {
            if self.used == self.k
                && self
                    .sizes
                    .iter()
                    .all(|&s| s >= self.min_size && s <= self.max_size)
            {
                self.out.push(self.labels.clone());
            }
            return;
        }
        let remaining = self.n - v - 1;
        let top = if self.used < self.k {
            self.used
        } else {
            self.k - 1
        };
        for label in 0..=top {
            if label < self.used && (self.closed[label] || self.sizes[label] >= self.max_size) {
                continue;
            }
            // only the lowest unused label may open a new component
            if label > self.used {
                break;
            }
            self.assign(v, label);
            let closed = if self.connected {
                self.close_pieces(v)
            } else {
                Some(Vec::new())
            };
            if let Some(closed) = closed {
                if self.sizes_feasible(remaining) {
                    self.run(v + 1);
                }
                for c in closed {
                    self.closed[c] = false;
                }
            }
            self.unassign(v, label);
        }
    }
}

/// Every partition of `g` into exactly `k` components with sizes in
/// `min_size..=max_size`, as canonical label vectors (labels in order of
/// first appearance). With `connected`, each component must induce a
/// connected subgraph. Infeasible bounds give an empty list.
pub fn enumerate_labelings(
    g: &Graph,
    k: usize,
    min_size: usize,
    max_size: usize,
    connected: bool,
) -> Result<Vec<Vec<usize>>> {
    if k == 0 || min_size == 0 {
        return Err(Error::InvalidArgument(
            "k and the minimum component size must be positive".into(),
        ));
    }
    if min_size > max_size || k > g.vertex_count() {
        return Ok(Vec::new());
    }
    let max_size = max_size.min(g.vertex_count());
    let mut search = Search::new(g, k, min_size, max_size, connected);
    search.run(0);
    Ok(search.out)
}

/// [`enumerate_labelings`] wrapped into balanced-uniform partitions.
pub fn enumerate_partitions(
    g: &Graph,
    k: usize,
    min_size: usize,
    max_size: usize,
    connected: bool,
) -> Result<Vec<Partition>> {
    enumerate_labelings(g, k, min_size, max_size, connected)?
        .iter()
        .map(|labels| Partition::from_labels(g, labels, k))
        .collect()
}

/// Partitions of the `rows x cols` grid; see [`enumerate_partitions`].
pub fn enumerate_grid_partitions(
    rows: usize,
    cols: usize,
    k: usize,
    min_size: usize,
    max_size: usize,
    connected: bool,
) -> Result<Vec<Partition>> {
    let g = grid_graph(rows, cols)?;
    enumerate_partitions(&g, k, min_size, max_size, connected)
}
