//! Graph matching through convex relaxations.
//!
//! The crate decides when the relaxed problem `min ‖PA − BP‖_F²` over a convex
//! superset of the permutation matrices has the same solution as the exact
//! matching problem, and solves it:
//!
//! * [`spectral`]: eigendecomposition and the friendliness classification;
//! * [`solver`]: pseudo-stochastic, doubly-stochastic and seeded relaxations,
//!   uniqueness certificates and seed generation;
//! * [`projection`]: the Hungarian method for rounding to a permutation;
//! * [`bounds`]: noise levels under which recovery is guaranteed;
//! * [`oracle`]: exhaustive search for small graphs, used as ground truth;
//! * [`harness`]: the end-to-end pipeline, instance generators and experiments.

pub mod bounds;
pub mod error;
pub mod graph;
pub mod harness;
pub mod io;
pub mod oracle;
pub mod projection;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{distortion, Graph, Permutation, PermutationSet, SetKind};
pub use harness::{rgm, MatchResult, RgmOptions, Verdict};
pub use oracle::Oracle;
pub use solver::{ConstraintKind, RelaxedSolution, SeedSet, SolverOptions};
