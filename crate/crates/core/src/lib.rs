//! Pairwise implication propagation over the clausal cubes of 3SAT
//! instances, built on a small algebra of colored Boolean partitions, plus a
//! brute-force oracle to check it against.
//!
//! - [`bitspace`]: colors, partitions and their combination operators.
//! - [`clausal`]: instances, clauses and the cube-per-triple clausal state.
//! - [`propagate`]: the worklist fixpoint engine and assignment read-out.
//! - [`oracle`]: exhaustive reference answers.
//! - [`dimacs`]: CNF text, random instances and JSON reports.

pub mod bitspace;
pub mod clausal;
pub mod dimacs;
pub mod oracle;
pub mod propagate;

pub use bitspace::{Color, Op, Partition};
pub use clausal::{build_clausal_partition, Assignment, BuildOutcome, ClausalState, Instance, Literal, Triple};
pub use propagate::{fixpoint, Options, Order, PropagationResult, Verdict};
