//! Optimal-transport distances between partitions of a graph.
//!
//! A partition of a connected graph into `k` components is represented as
//! `k` mass distributions over the vertices. Two partitions are compared by
//! matching their components with a minimum-cost perfect matching, where
//! the cost of pairing two components is a transport distance between
//! their distributions:
//!
//! * [`transport::w1_beckmann`]: balanced 1-Wasserstein distance, solved as
//!   an uncapacitated min-cost flow on the graph edges.
//! * [`transport::unbalanced_cost`]: the `p = 1` unbalanced cost, where
//!   mass may be created or destroyed at price `lambda` per unit.
//! * [`baselines`]: Hamming and total-variation costs for comparison.
//!
//! All distances are computed in exact rational arithmetic: masses, edge
//! weights and penalties are scaled to integers before the flow solve, so
//! identities such as the large-`lambda` collapse can be asserted with `==`.
//!
//! The [`ensemble`] module builds collections of partitions (exhaustive
//! enumeration and flip-walk chains) and their pairwise distance matrices,
//! and [`embedding`] turns a matrix into coordinates with SMACOF.

pub mod assignment;
pub mod baselines;
pub mod embedding;
pub mod ensemble;
pub mod graph;
pub mod io;
pub mod numeric;
pub mod par;
pub mod partition;
pub mod transport;

mod flow;

pub use assignment::{hungarian, lifted_distance, CostMatrix, Matching, Metric};
pub use embedding::{mds, EmbeddingCoords, MdsOptions};
pub use ensemble::{
    enumerate_grid_partitions, enumerate_partitions, flip_chain, pairwise_matrix, BetaSchedule,
    ChainSpec, DistanceMatrix,
};
pub use graph::Graph;
pub use numeric::Rational;
pub use partition::{MassDistribution, Partition, Representation};
pub use transport::{
    kantorovich_oracle, unbalanced_cost, w1_beckmann, FlowSolution, TransportPlan,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// The graph is not connected; `vertex` cannot be reached from vertex 0.
    #[error("vertex {vertex} is unreachable from vertex 0")]
    UnreachableVertex { vertex: usize },

    /// Balanced transport was asked for between distributions of different total mass.
    #[error("total masses differ ({left} vs {right}); use the unbalanced cost")]
    UnbalancedInput { left: Rational, right: Rational },

    #[error("integer overflow while scaling {0} to a common denominator")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
