//! Diverse near-optimal combinatorial solutions.
//!
//! Given an instance, an approximation factor `c ≥ 1` and a count `k`, the solvers return
//! `k` distinct `c`-approximate solutions whose total pairwise Hamming distance is within
//! a constant factor of the best achievable. Each application reduces one farthest
//! insertion step to a budget-constrained optimization problem and plugs a solver for it
//! into the generic [`engine`].

pub mod cli;
pub mod dispersion;
pub mod engine;
pub mod error;
pub mod field;
pub mod io;
pub mod matching;
pub mod matroid;
pub mod model;
pub mod oracle;
pub mod paths;
pub mod rational;
pub mod trees;

pub use error::{Error, Result};
pub use model::{diversity_sum, farness_objective, hamming_distance, occurrence_weights, EdgeId, EdgeSubset, Graph, OccurrenceWeights, Role};
pub use rational::Rational;
