//! Forcing conditions: requirement tables, ADS and EM conditions, the
//! settling extension, partition path trees and ground conditions.

mod ads;
mod em;
mod format;
mod ground;
mod requirement;
mod settle;
mod tree;

use thiserror::Error;

use crate::families::FamilyError;
use crate::instances::{InstanceError, VertexSet};
use crate::solvers::SolverError;

pub use ads::*;
pub use em::*;
pub use format::*;
pub use ground::*;
pub use requirement::*;
pub use settle::*;
pub use tree::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForcingError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid condition: {0}")]
    InvalidCondition(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("requirement table has flavor {0}, which does not apply here")]
    FlavorMismatch(&'static str),
    #[error("a_K is undefined at {0:?}")]
    AUndefined(VertexSet),
    #[error("inconsistent requirement table: {0}")]
    Table(String),
    #[error("family too shallow: {0}")]
    Shallow(String),
    #[error("density violated: {0}")]
    DensityViolation(String),
    #[error("split blocks have the wrong shape: {0}")]
    SplitShape(String),
    #[error("search too large ({0})")]
    TooLarge(usize),
    #[error("functional table entry at line {0} has output 0; only monotone tables are supported")]
    NonMonotone(usize),
    #[error("audit failed: {0}")]
    Audit(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Search bounds for bounded essentiality checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EssentialBounds {
    pub x_max: usize,
    pub set_bound: usize,
    pub level_bound: usize,
}
