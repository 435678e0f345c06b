//! Exact solvers and the structural analyses of transitive subsets.

mod intervals;
mod monotone;
mod poset;
pub(crate) mod search;

use thiserror::Error;

use crate::instances::{Coloring, Tournament, VertexSet};
use crate::reductions::{SolutionKind, SolutionSet};

pub use intervals::{
    beats_ext, best_extension, extendibility_depth, extendibility_depth_among, minimal_intervals,
    one_point_extensions, partition_extendible, slot_index, slot_of, slot_spec, transitive_order, Endpoint,
    IntervalSpec, MinimalInterval, PartitionChoice, PARTITION_LIMIT,
};
pub use monotone::{lex_least_lis, longest_monotone};
pub use poset::poset_extremes;
pub use search::MASK_LIMIT;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("set {0:?} is not transitive")]
    NotTransitive(VertexSet),
    #[error("instance with {n} vertices exceeds the exact-search limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("vertex {0} out of range")]
    VertexRange(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Maximum homogeneous set, lexicographically least among maximums.
pub fn max_homogeneous(c: &Coloring) -> Result<SolutionSet, SolverError> {
    search::check_size(c.n())?;
    let (m, color) = search::max_homogeneous_mask(c);
    Ok(SolutionSet::new(SolutionKind::Homogeneous(color), search::bits(m).collect()))
}

/// Maximum transitive subset, lexicographically least among maximums.
pub fn max_transitive(t: &Tournament) -> Result<SolutionSet, SolverError> {
    search::check_size(t.n())?;
    let m = search::max_transitive_mask(t);
    Ok(SolutionSet::new(SolutionKind::Transitive, search::bits(m).collect()))
}
