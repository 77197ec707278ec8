//! Vertex partitions and their mass representations.

use num_traits::{One, Zero};

use crate::graph::Graph;
use crate::numeric::{self, Rational};
use crate::{Error, Result};

/// Nonnegative vertex-indexed masses, stored as integer numerators over a
/// shared denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MassDistribution {
    numer: Vec<i128>,
    denom: i128,
}

impl MassDistribution {
    pub fn new(masses: &[Rational]) -> Result<Self> {
        if let Some(v) = masses.iter().position(|m| *m < Rational::zero()) {
            return Err(Error::InvalidArgument(format!(
                "negative mass {} at vertex {v}",
                masses[v]
            )));
        }
        let denom = numeric::common_denominator(masses)?;
        let numer = masses
            .iter()
            .map(|m| (m * Rational::from_integer(denom)).to_integer())
            .collect();
        Ok(MassDistribution { numer, denom })
    }

    /// Zero mass on `n` vertices.
    pub fn zeros(n: usize) -> Self {
        MassDistribution {
            numer: vec![0; n],
            denom: 1,
        }
    }

    /// A single unit of mass at `vertex`.
    pub fn dirac(n: usize, vertex: usize) -> Self {
        let mut numer = vec![0; n];
        numer[vertex] = 1;
        MassDistribution { numer, denom: 1 }
    }

    pub fn len(&self) -> usize {
        self.numer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numer.is_empty()
    }

    pub fn get(&self, v: usize) -> Rational {
        Rational::new(self.numer[v], self.denom)
    }

    pub fn masses(&self) -> Vec<Rational> {
        (0..self.len()).map(|v| self.get(v)).collect()
    }

    pub fn numerators(&self) -> &[i128] {
        &self.numer
    }

    pub fn denominator(&self) -> i128 {
        self.denom
    }

    pub fn total(&self) -> Rational {
        Rational::new(self.numer.iter().sum(), self.denom)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.numer
            .iter()
            .map(|&n| n as f64 / self.denom as f64)
            .collect()
    }

    /// Vertices carrying positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.numer[v] > 0).collect()
    }
}

/// How the components of a partition are turned into mass distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// `1/|V_i|` on each member of component `i`.
    BalancedUniform,
    /// `w(v) / sum_{u in V_i} w(u)` on members.
    BalancedWeighted,
    /// Raw vertex weights `w(v)` on members (unit weights by default).
    Unbalanced,
}

impl Representation {
    pub fn is_balanced(self) -> bool {
        !matches!(self, Representation::Unbalanced)
    }
}

/// An ordered list of `k` nonempty, disjoint vertex sets covering the graph.
#[derive(Debug, Clone)]
pub struct Partition {
    labels: Vec<usize>,
    components: Vec<Vec<usize>>,
    representation: Representation,
    weights: Option<Vec<Rational>>,
    connected: bool,
}

impl Partition {
    /// Read components off a label vector. Labels must be `0..k` and every
    /// label must be used. The representation defaults to balanced-uniform.
    pub fn from_labels(g: &Graph, labels: &[usize], k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if labels.len() != g.vertex_count() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for a graph with {} vertices",
                labels.len(),
                g.vertex_count()
            )));
        }
        let mut components = vec![Vec::new(); k];
        for (v, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} has label {l}, outside 0..{k}"
                )));
            }
            components[l].push(v);
        }
        if let Some(empty) = components.iter().position(Vec::is_empty) {
            return Err(Error::InvalidPartition(format!(
                "component {empty} is empty"
            )));
        }
        let connected = components.iter().all(|c| g.induces_connected(c));
        Ok(Partition {
            labels: labels.to_vec(),
            components,
            representation: Representation::BalancedUniform,
            weights: None,
            connected,
        })
    }

    /// Like [`Partition::from_labels`] but rejects components that do not
    /// induce connected subgraphs.
    pub fn from_labels_connected(g: &Graph, labels: &[usize], k: usize) -> Result<Self> {
        let p = Self::from_labels(g, labels, k)?;
        if !p.connected {
            return Err(Error::InvalidPartition(
                "a component does not induce a connected subgraph".into(),
            ));
        }
        Ok(p)
    }

    /// Switch representation. `BalancedWeighted` requires `weights`;
    /// `Unbalanced` uses unit weights when none are given.
    pub fn with_representation(
        mut self,
        representation: Representation,
        weights: Option<Vec<Rational>>,
    ) -> Result<Self> {
        if let Some(w) = &weights {
            if w.len() != self.labels.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} vertex weights for {} vertices",
                    w.len(),
                    self.labels.len()
                )));
            }
            if let Some(v) = w.iter().position(|x| *x <= Rational::zero()) {
                return Err(Error::InvalidArgument(format!(
                    "vertex weight at {v} must be strictly positive"
                )));
            }
        } else if representation == Representation::BalancedWeighted {
            return Err(Error::InvalidArgument(
                "weighted representation needs vertex weights".into(),
            ));
        }
        self.representation = representation;
        self.weights = weights;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[usize] {
        &self.components[i]
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn weights(&self) -> Option<&[Rational]> {
        self.weights.as_deref()
    }

    /// Whether every component induces a connected subgraph.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    fn weight(&self, v: usize) -> Rational {
        self.weights.as_ref().map_or_else(Rational::one, |w| w[v])
    }

    /// Mass distribution of component `i` under the chosen representation.
    pub fn component_distribution(&self, i: usize) -> Result<MassDistribution> {
        let members = self.components.get(i).ok_or_else(|| {
            Error::InvalidArgument(format!("component index {i} out of range 0..{}", self.k()))
        })?;
        let mut masses = vec![Rational::zero(); self.vertex_count()];
        match self.representation {
            Representation::BalancedUniform => {
                let m = Rational::new(1, members.len() as i128);
                for &v in members {
                    masses[v] = m;
                }
            }
            Representation::BalancedWeighted => {
                let total: Rational = members.iter().map(|&v| self.weight(v)).sum();
                for &v in members {
                    masses[v] = self.weight(v) / total;
                }
            }
            Representation::Unbalanced => {
                for &v in members {
                    masses[v] = self.weight(v);
                }
            }
        }
        MassDistribution::new(&masses)
    }

    /// Number of edges joining vertices with different labels.
    pub fn boundary_length(&self, g: &Graph) -> usize {
        g.edges()
            .iter()
            .filter(|e| self.labels[e.tail] != self.labels[e.head])
            .count()
    }

    /// Component vertex sets sorted by minimum vertex id; equal for two
    /// partitions iff they agree up to relabeling.
    pub fn canonical_components(&self) -> Vec<Vec<usize>> {
        let mut c = self.components.clone();
        c.sort_by_key(|members| members[0]);
        c
    }

    /// Sorted list of component sizes.
    pub fn size_multiset(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.components.iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }
}
