//! Ensembles of partitions: exhaustive enumeration, flip-walk sampling and
//! pairwise distance matrices.

mod chain;
mod enumerate;
mod matrix;

pub use chain::{flip_chain, AnnealSign, BetaSchedule, ChainSpec};
pub use enumerate::{enumerate_grid_partitions, enumerate_labelings, enumerate_partitions};
pub use matrix::{pairwise_matrix, pairwise_matrix_with_workers, DistanceMatrix};
